#pragma once

// Reunion statistics: who moves back to former coworkers, how the odds
// depend on how large the old team was and how long the pair worked
// together, and how observed reuniting rates compare with the null models.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "teamflow/consistency.hpp"
#include "teamflow/errors.hpp"
#include "teamflow/logistic.hpp"
#include "teamflow/team_builder.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

// employees who entered strictly after the first observed month and were
// employed for at least min_months months in total; entrants_only = false
// drops the entry requirement, which is the only usable mode on panels whose
// whole workforce is present from the first month
inline std::vector<person_id> cohort_filter(const team_history& h, month_index min_months,
                                            bool entrants_only = true) {
    std::vector<person_id> out;
    const auto people = h.source().people().size();
    for (person_id q = 0; q < people; ++q) {
        month_index seen = 0;
        bool at_start = false;
        for (month_index m = 0; m < h.month_count(); ++m) {
            if (h.employed(q, m)) {
                ++seen;
                if (m == 0) at_start = true;
            }
        }
        if ((!at_start || !entrants_only) && seen >= min_months) out.push_back(q);
    }
    return out;
}

// one reuniting uncoordinated move, attributed to a single witness
struct reuniting_move {
    person_id mover = 0;
    month_index month = 0;       // departure month
    team_label destination = 0;  // team of residence at arrival
    person_id witness = 0;       // most recently co-worked former coworker found there
    std::int32_t last_shared_size = 0;  // witness pair's team size at their final co-month
    month_index overlap_months = 0;     // co-months on their last shared timeline
};

namespace detail {

// how a (mover, other) pair relates to a departure month
struct pair_summary {
    bool any_before = false;  // shared a team strictly before the departure month
    bool current = false;     // still together in the departure month itself
    month_index last_month = -1;
    team_label last_team = exterior_team;
    std::int32_t size_at_last = 0;           // team size at the final co-month
    std::int32_t min_size = 0;               // smallest shared team size ever
    month_index overlap_on_last_team = 0;    // co-months on the last shared timeline
};

inline pair_summary summarize_pair(const co_membership_index& idx, person_id a, person_id b,
                                   month_index depart) {
    pair_summary s;
    const auto* v = idx.shared(a, b);
    if (!v) return s;
    for (const auto& e : *v) {
        if (e.month > depart) break;
        if (e.month == depart) {
            s.current = true;
            break;
        }
        s.any_before = true;
        s.last_month = e.month;
        s.last_team = e.team;
        s.size_at_last = e.team_size;
        s.min_size = s.min_size == 0 ? e.team_size : std::min(s.min_size, e.team_size);
    }
    if (s.any_before) {
        for (const auto& e : *v)
            if (e.month < depart && e.team == s.last_team) ++s.overlap_on_last_team;
    }
    return s;
}

// former-coworker test with the boomerang switch applied against `dst`
inline bool counts_as_former(const co_membership_index& idx, const pair_summary& s,
                             person_id a, person_id b, month_index depart, team_label dst,
                             const window_config& cfg) {
    if (!s.any_before || s.current) return false;
    if (cfg.boomerang_counts) return true;
    if (s.last_team != dst) return true;
    const auto* v = idx.shared(a, b);
    for (const auto& e : *v)
        if (e.month < depart && e.team != dst) return true;
    return false;
}

}  // namespace detail

// All reuniting uncoordinated moves by the given movers (empty = everyone),
// each attributed to its most recently co-worked witness in the destination
// (ties broken by smallest witness id).
inline std::vector<reuniting_move> reuniting_moves(const team_history& h,
                                                   const co_membership_index& idx,
                                                   const std::vector<person_id>& movers = {},
                                                   const window_config& cfg = {}) {
    std::vector<bool> wanted;
    if (!movers.empty()) {
        wanted.assign(h.source().people().size(), false);
        for (person_id q : movers) wanted[q] = true;
    }
    std::vector<reuniting_move> out;
    for (const move_event& e : h.events()) {
        if (e.kind != move_kind::uncoordinated) continue;
        const person_id p = e.movers.front();
        if (!wanted.empty() && !wanted[p]) continue;
        const team_label arrival = h.location(p, e.month_from + 1);
        if (arrival == exterior_team) continue;
        const team_timeline& tl = h.timeline(arrival);
        if (!tl.alive(e.month_from + 1)) continue;
        bool found = false;
        month_index found_month = -1;
        reuniting_move best;
        for (person_id q : tl.members_at(e.month_from + 1)) {
            if (q == p) continue;
            const auto s = detail::summarize_pair(idx, p, q, e.month_from);
            if (!detail::counts_as_former(idx, s, p, q, e.month_from, arrival, cfg)) continue;
            if (!found || s.last_month > found_month ||
                (s.last_month == found_month && q < best.witness)) {
                best.mover = p;
                best.month = e.month_from;
                best.destination = arrival;
                best.witness = q;
                best.last_shared_size = s.size_at_last;
                best.overlap_months = s.overlap_on_last_team;
                found_month = s.last_month;
                found = true;
            }
        }
        if (found) out.push_back(best);
    }
    return out;
}

// ---------------------------------------------------------------------------
// binned reunion tables

struct binned_table {
    struct bin {
        std::int64_t lo = 0, hi = 0;  // inclusive range of the binned quantity
        std::int64_t count = 0;
        double share = 0.0;
    };
    std::vector<bin> bins;
    std::int64_t total = 0;
};

// share of reuniting moves by last-shared-team size, bins [2,5], [6,9], ...
inline binned_table p_of_s(const std::vector<reuniting_move>& moves) {
    if (moves.empty()) throw no_reuniting_moves("no reuniting moves to bin by team size");
    binned_table t;
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& m : moves) {
        const std::int64_t idx = (m.last_shared_size - 2) / 4;
        counts[idx]++;
        t.total++;
    }
    const std::int64_t max_idx = counts.rbegin()->first;
    for (std::int64_t i = 0; i <= max_idx; ++i) {
        binned_table::bin b;
        b.lo = 2 + 4 * i;
        b.hi = b.lo + 3;
        b.count = counts.count(i) ? counts[i] : 0;
        b.share = static_cast<double>(b.count) / static_cast<double>(t.total);
        t.bins.push_back(b);
    }
    return t;
}

// share of reuniting moves by months of shared work, yearly bins
// (12(k-1), 12k]
inline binned_table p_of_sigma(const std::vector<reuniting_move>& moves) {
    if (moves.empty()) throw no_reuniting_moves("no reuniting moves to bin by overlap");
    binned_table t;
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& m : moves) {
        const std::int64_t idx = (m.overlap_months + 11) / 12;  // 1-based year bin
        counts[idx]++;
        t.total++;
    }
    const std::int64_t max_idx = counts.rbegin()->first;
    for (std::int64_t i = 1; i <= max_idx; ++i) {
        binned_table::bin b;
        b.lo = 12 * (i - 1) + 1;
        b.hi = 12 * i;
        b.count = counts.count(i) ? counts[i] : 0;
        b.share = static_cast<double>(b.count) / static_cast<double>(t.total);
        t.bins.push_back(b);
    }
    return t;
}

// ---------------------------------------------------------------------------
// regression observations

enum class observation_unit : std::uint8_t { pair, move };

// One row of the reunion regression.  Pair unit: (uncoordinated move x
// former coworker employed at the move month), reunited iff that coworker is
// in the destination at arrival.  Move unit: one row per move with features
// taken from the most favorable candidate (smallest ever-shared size,
// longest last overlap), reunited iff any candidate is found at arrival.
struct reunion_observation {
    person_id mover = 0;
    person_id candidate = 0;  // pair unit only
    month_index month = 0;
    double min_shared_size = 0;    // s: smallest team size the pair ever shared
    double last_overlap = 0;       // sigma: co-months on their last shared timeline
    double last_shared_size = 0;   // team size in their final co-month
    int reunited = 0;
};

inline std::vector<reunion_observation> build_observations(
    const team_history& h, const co_membership_index& idx,
    const std::vector<person_id>& cohort, observation_unit unit = observation_unit::pair,
    const window_config& cfg = {}) {
    std::vector<bool> wanted(h.source().people().size(), false);
    for (person_id q : cohort) wanted[q] = true;
    std::vector<reunion_observation> out;
    for (const move_event& e : h.events()) {
        if (e.kind != move_kind::uncoordinated) continue;
        const person_id p = e.movers.front();
        if (!wanted[p]) continue;
        const month_index m = e.month_from;
        const team_label arrival = h.location(p, m + 1);
        if (arrival == exterior_team) continue;
        const team_timeline& tl = h.timeline(arrival);
        if (!tl.alive(m + 1)) continue;

        std::vector<reunion_observation> rows;
        for (person_id q = 0; q < h.source().people().size(); ++q) {
            if (q == p || !h.employed(q, m)) continue;
            const auto s = detail::summarize_pair(idx, p, q, m);
            if (!detail::counts_as_former(idx, s, p, q, m, arrival, cfg)) continue;
            reunion_observation r;
            r.mover = p;
            r.candidate = q;
            r.month = m;
            r.min_shared_size = s.min_size;
            r.last_overlap = s.overlap_on_last_team;
            r.last_shared_size = s.size_at_last;
            r.reunited = tl.has_member(q, m + 1) ? 1 : 0;
            rows.push_back(r);
        }
        if (rows.empty()) continue;
        if (unit == observation_unit::pair) {
            for (auto& r : rows) out.push_back(r);
        } else {
            reunion_observation agg = rows.front();
            agg.candidate = 0;
            for (const auto& r : rows) {
                agg.min_shared_size = std::min(agg.min_shared_size, r.min_shared_size);
                agg.last_overlap = std::max(agg.last_overlap, r.last_overlap);
                agg.last_shared_size = std::min(agg.last_shared_size, r.last_shared_size);
                agg.reunited = std::max(agg.reunited, r.reunited);
            }
            out.push_back(agg);
        }
    }
    return out;
}

inline logit_fit fit_reunion_regression(const std::vector<reunion_observation>& obs) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    x.reserve(obs.size());
    y.reserve(obs.size());
    for (const auto& r : obs) {
        x.push_back({r.min_shared_size, r.last_overlap});
        y.push_back(r.reunited);
    }
    return fit_logistic(x, y);
}

// ---------------------------------------------------------------------------
// observed-vs-model reuniting rates across windows

struct proportion_comparison {
    null_model model = null_model::sp;
    bool forward = true;
    double observed_mean_prop = 0;  // mean over windows of the observed fraction
    double model_mean_prop = 0;     // mean over windows of realization means
    double mean_lambda = std::numeric_limits<double>::quiet_NaN();
    double stouffer_z = std::numeric_limits<double>::quiet_NaN();
    std::int64_t windows_used = 0;
    std::int64_t windows_skipped = 0;  // no links, no variance, or no observed reunions
    bool lambda_caveat = false;
};

// rows must all belong to one (model, direction)
inline proportion_comparison compare_proportions(const std::vector<window_model_result>& rows) {
    proportion_comparison c;
    if (rows.empty()) return c;
    c.model = rows.front().model;
    c.forward = rows.front().forward;
    c.lambda_caveat = rows.front().lambda_caveat;
    double z_sum = 0, obs_sum = 0, model_sum = 0, lambda_sum = 0;
    std::int64_t lambda_n = 0;
    for (const auto& r : rows) {
        if (std::isnan(r.prop_std_diff)) {
            c.windows_skipped++;
            continue;
        }
        z_sum += r.prop_std_diff;
        obs_sum += r.observed_reun_prop;
        model_sum += r.reun_prop.mean;
        c.windows_used++;
        if (r.lambda.defined > 0) {
            lambda_sum += r.lambda.mean;
            ++lambda_n;
        }
    }
    if (c.windows_used > 0) {
        c.stouffer_z = z_sum / std::sqrt(static_cast<double>(c.windows_used));
        c.observed_mean_prop = obs_sum / static_cast<double>(c.windows_used);
        c.model_mean_prop = model_sum / static_cast<double>(c.windows_used);
    }
    if (lambda_n > 0) c.mean_lambda = lambda_sum / static_cast<double>(lambda_n);
    return c;
}

// reuniting share among all uncoordinated moves in the whole history
inline std::pair<std::int64_t, std::int64_t> overall_reuniting(const team_history& h,
                                                               const co_membership_index& idx,
                                                               const window_config& cfg = {}) {
    std::int64_t reun = 0, total = 0;
    for (const move_event& e : h.events()) {
        if (e.kind != move_kind::uncoordinated) continue;
        ++total;
        if (reunites_actual(h, idx, e.movers.front(), e.month_from, cfg)) ++reun;
    }
    return {reun, total};
}

}  // namespace teamflow
