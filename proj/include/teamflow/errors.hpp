#pragma once

// Typed error hierarchy. Every failure the library can diagnose throws one of
// these; the CLI maps them to machine-readable JSON error reports.

#include <stdexcept>
#include <string>

namespace teamflow {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// --- panel ingestion ---------------------------------------------------

// record file could not be parsed at all (missing columns, bad header, ...)
struct malformed_input : error {
    using error::error;
};

// a month string is not YYYY-MM or the panel has calendar gaps
struct malformed_month : malformed_input {
    using malformed_input::malformed_input;
};

// two records for the same (employee, month)
struct duplicate_record : malformed_input {
    using malformed_input::malformed_input;
};

// a record names the employee as their own supervisor
struct self_supervision : malformed_input {
    using malformed_input::malformed_input;
};

// --- windowing / scoring -----------------------------------------------

// window [t - dt, t + dt] does not fit inside the observed month range
struct window_out_of_range : error {
    using error::error;
};

// 2*dt exceeds the dataset span, no window fits anywhere
struct window_too_large : error {
    using error::error;
};

// consistency score denominator is zero (no repeated links and, when empty
// teams are excluded, nothing else contributes either)
struct undefined_score : error {
    using error::error;
};

// ratio of model reunions to observed reunions with zero observed reunions
struct undefined_ratio : error {
    using error::error;
};

// reunion probability table requested but no reuniting moves exist
struct no_reuniting_moves : error {
    using error::error;
};

// --- null models ---------------------------------------------------------

// a stub class admits no perfect matching without self-loops
// (some team holds more than half of the class's stub endpoints)
struct infeasible_no_self_loop : error {
    using error::error;
};

// --- regression ----------------------------------------------------------

// quasi-complete separation: a coefficient diverges during the fit
struct separation_detected : error {
    using error::error;
};

// a feature column is constant, the information matrix is singular
struct constant_feature : error {
    using error::error;
};

// every observation has the same outcome, nothing to fit
struct all_same_outcome : error {
    using error::error;
};

// fewer observations than the model can support
struct too_few_observations : error {
    using error::error;
};

// --- synthesis -----------------------------------------------------------

// generator configuration that cannot produce a panel (bad rates, absurd
// headcount, zero months, ...)
struct infeasible_config : error {
    using error::error;
};

}  // namespace teamflow
