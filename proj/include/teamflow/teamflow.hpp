#pragma once

// Convenience include for the whole library.

#include "teamflow/consistency.hpp"
#include "teamflow/csv.hpp"
#include "teamflow/errors.hpp"
#include "teamflow/io_artifacts.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/logistic.hpp"
#include "teamflow/month.hpp"
#include "teamflow/null_models.hpp"
#include "teamflow/panel.hpp"
#include "teamflow/reunite.hpp"
#include "teamflow/rng.hpp"
#include "teamflow/synth.hpp"
#include "teamflow/team_builder.hpp"
#include "teamflow/team_stats.hpp"
#include "teamflow/window.hpp"
