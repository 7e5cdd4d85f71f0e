#pragma once

// Descriptive statistics over a team history: lifetimes, sizes, member
// tenures, and per-window counts of teams that do / do not keep their label
// across a +-dt window.

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "teamflow/team_builder.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

struct team_stats_summary {
    // per timeline
    std::vector<month_index> lifetimes;  // death - birth (0-based age at death)
    std::vector<bool> lifetime_censored;  // touches either dataset edge
    std::vector<std::int32_t> initial_sizes;
    // per (timeline, month)
    std::vector<std::int32_t> sizes;
    // per maximal consecutive (member, timeline) run, in months
    std::vector<month_index> tenures;

    // undefined means (empty sample) stay NaN
    double mean_lifetime_uncensored = std::numeric_limits<double>::quiet_NaN();
    std::int64_t uncensored_count = 0;
    double mean_lifetime_all = std::numeric_limits<double>::quiet_NaN();
    double mean_initial_size = std::numeric_limits<double>::quiet_NaN();
    double mean_size = std::numeric_limits<double>::quiet_NaN();  // over all team-months
    double mean_tenure = std::numeric_limits<double>::quiet_NaN();
    std::int64_t team_count = 0;
};

inline team_stats_summary team_stats(const team_history& h) {
    team_stats_summary s;
    double life_unc = 0, life_all = 0, init = 0, size_sum = 0, tenure_sum = 0;
    std::int64_t month_samples = 0;
    for (const team_timeline& tl : h.timelines()) {
        s.team_count++;
        const month_index life = tl.lifetime();
        const bool censored = tl.censored_start || tl.censored_end;
        s.lifetimes.push_back(life);
        s.lifetime_censored.push_back(censored);
        life_all += life;
        if (!censored) {
            life_unc += life;
            s.uncensored_count++;
        }
        s.initial_sizes.push_back(static_cast<std::int32_t>(tl.members.front().size()));
        init += static_cast<double>(tl.members.front().size());
        for (const auto& folks : tl.members) {
            s.sizes.push_back(static_cast<std::int32_t>(folks.size()));
            size_sum += static_cast<double>(folks.size());
            ++month_samples;
        }
        // tenure runs: consecutive months each person spends on this timeline
        std::unordered_map<person_id, month_index> run;
        for (std::size_t k = 0; k < tl.members.size(); ++k) {
            std::unordered_map<person_id, month_index> next_run;
            for (person_id q : tl.members[k]) {
                auto it = run.find(q);
                next_run[q] = (it == run.end()) ? 1 : it->second + 1;
            }
            for (const auto& [q, len] : run)
                if (next_run.find(q) == next_run.end()) {
                    s.tenures.push_back(len);
                    tenure_sum += len;
                }
            run = std::move(next_run);
        }
        for (const auto& [q, len] : run) {
            s.tenures.push_back(len);
            tenure_sum += len;
        }
    }
    if (s.uncensored_count) s.mean_lifetime_uncensored = life_unc / static_cast<double>(s.uncensored_count);
    if (s.team_count) {
        s.mean_lifetime_all = life_all / static_cast<double>(s.team_count);
        s.mean_initial_size = init / static_cast<double>(s.team_count);
    }
    if (month_samples) s.mean_size = size_sum / static_cast<double>(month_samples);
    if (!s.tenures.empty()) s.mean_tenure = tenure_sum / static_cast<double>(s.tenures.size());
    return s;
}

// Per center month t: of the teams alive at t, how many keep their label
// over [t-dt, t+dt] versus not, their member slots at t, and person-months
// over the 2*dt months [t-dt, t+dt).
struct window_coverage {
    month_index t = 0;
    std::int64_t continuing_teams = 0;
    std::int64_t other_teams = 0;
    std::int64_t continuing_members = 0;  // sum of sizes at t
    std::int64_t other_members = 0;
    std::int64_t continuing_person_months = 0;
    std::int64_t other_person_months = 0;
};

inline std::vector<window_coverage> coverage_stats(const team_history& h, month_index dt) {
    if (dt <= 0) throw window_out_of_range("dt must be positive");
    const month_index last = h.month_count() - 1;
    if (2 * dt > last) throw window_too_large("2*dt exceeds the observed span");
    std::vector<window_coverage> out;
    for (month_index t = dt; t <= last - dt; ++t) {
        window_coverage c;
        c.t = t;
        for (team_label l : h.alive_at(t)) {
            const team_timeline& tl = h.timeline(l);
            const bool spans = tl.birth <= t - dt && tl.death >= t + dt;
            const auto size_t_now = static_cast<std::int64_t>(tl.members_at(t).size());
            std::int64_t pm = 0;
            for (month_index m = std::max(tl.birth, static_cast<month_index>(t - dt));
                 m <= std::min(tl.death, static_cast<month_index>(t + dt - 1)); ++m)
                pm += static_cast<std::int64_t>(tl.members_at(m).size());
            if (spans) {
                c.continuing_teams++;
                c.continuing_members += size_t_now;
                c.continuing_person_months += pm;
            } else {
                c.other_teams++;
                c.other_members += size_t_now;
                c.other_person_months += pm;
            }
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace teamflow
