#pragma once

// Consistency of randomized link sets with the observed flow around a
// window.
//
// z compares, team by team, how much of one half's links a realization
// reproduces against how much the other observed half reproduces.  Forward:
// rewire the after half S and score |E_< ∩ S| style intersections over
// |E_< ∩ E_>| ones, each team's contribution normalized by its before-half
// link count; reverse swaps the halves.  Teams empty on both sides
// contribute an optional +1 to both numerator and denominator ("empty team"
// credit); with the credit disabled those teams simply drop out.  0/0 terms
// are 0.  The ratio may exceed 1; it is reported as computed.
//
// y is the plain multiset overlap of (src, dst) pairs with the reference
// half, normalized by the reference size.  lambda is the ratio of reuniting
// links in a realization to reuniting links in the observed half it
// replaces, with the reuniting predicate re-evaluated semantically against
// the real work histories.  For rsp, lambda is still computed but flagged:
// that model preserves reuniting counts by construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "teamflow/errors.hpp"
#include "teamflow/null_models.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

namespace detail {

// per-team link multisets: out[i] = multiset of destinations, in[i] = sources
struct team_views {
    std::map<team_label, std::map<team_label, std::int64_t>> out, in;
    std::map<team_label, std::int64_t> out_n, in_n;
};

inline team_views make_views(const link_set& ls) {
    team_views v;
    for (const auto& l : ls.links) {
        v.out[l.src][l.dst]++;
        v.in[l.dst][l.src]++;
        v.out_n[l.src]++;
        v.in_n[l.dst]++;
    }
    return v;
}

inline std::int64_t view_overlap(const std::map<team_label, std::map<team_label, std::int64_t>>& a,
                                 const std::map<team_label, std::map<team_label, std::int64_t>>& b,
                                 team_label i) {
    auto ai = a.find(i);
    auto bi = b.find(i);
    if (ai == a.end() || bi == b.end()) return 0;
    std::int64_t total = 0;
    for (const auto& [peer, n] : ai->second) {
        auto it = bi->second.find(peer);
        if (it != bi->second.end()) total += std::min(n, it->second);
    }
    return total;
}

inline std::int64_t count_of(const std::map<team_label, std::int64_t>& m, team_label i) {
    auto it = m.find(i);
    return it == m.end() ? 0 : it->second;
}

}  // namespace detail

// z over an explicit team universe (the window's continuing teams).
// forward: sample replaces the after half; reverse: the before half.
inline double z_score(const link_set& before, const link_set& after, const link_set& sample,
                      bool forward, bool include_empty_teams,
                      const std::vector<team_label>& teams) {
    const auto vb = detail::make_views(before);
    const auto va = detail::make_views(after);
    const auto vs = detail::make_views(sample);
    double num = 0.0, den = 0.0;
    for (team_label i : teams) {
        const std::int64_t nb = detail::count_of(vb.out_n, i) + detail::count_of(vb.in_n, i);
        const std::int64_t na = detail::count_of(va.out_n, i) + detail::count_of(va.in_n, i);
        const std::int64_t w = forward ? nb : na;
        const std::int64_t cross =
            detail::view_overlap(vb.out, va.out, i) + detail::view_overlap(vb.in, va.in, i);
        const std::int64_t with_sample =
            forward ? detail::view_overlap(vb.out, vs.out, i) + detail::view_overlap(vb.in, vs.in, i)
                    : detail::view_overlap(va.out, vs.out, i) + detail::view_overlap(va.in, vs.in, i);
        if (w > 0) {
            num += static_cast<double>(with_sample) / static_cast<double>(w);
            den += static_cast<double>(cross) / static_cast<double>(w);
        }
        if (include_empty_teams && nb + na == 0) {
            num += 1.0;
            den += 1.0;
        }
    }
    if (den == 0.0)
        throw undefined_score("z denominator is zero: no repeated links"
                              " and no empty-team credit applies");
    return num / den;
}

// overlap with the reference half, normalized by the reference size
inline double y_score(const link_set& reference, const link_set& sample) {
    if (reference.links.empty())
        throw undefined_score("y is undefined on an empty reference half");
    return static_cast<double>(pair_overlap(reference.links, sample.links)) /
           static_cast<double>(reference.links.size());
}

inline std::int64_t semantic_reuniting_count(const team_history& h,
                                             const co_membership_index& idx,
                                             const link_set& ls, const window_config& cfg = {}) {
    std::int64_t n = 0;
    for (const auto& l : ls.links)
        n += reunites_with_team(h, idx, l.mover, l.dst, l.month, cfg) ? 1 : 0;
    return n;
}

// model reunions over observed reunions on the replaced half
inline double lambda_ratio(const team_history& h, const co_membership_index& idx,
                           const link_set& observed_half, const link_set& sample,
                           const window_config& cfg = {}) {
    const std::int64_t seen = semantic_reuniting_count(h, idx, observed_half, cfg);
    if (seen == 0) throw undefined_ratio("no reuniting links observed in this half");
    return static_cast<double>(semantic_reuniting_count(h, idx, sample, cfg)) /
           static_cast<double>(seen);
}

// ---------------------------------------------------------------------------
// distribution summaries for the per-realization metric clouds

struct metric_summary {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    double q1 = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double q3 = std::numeric_limits<double>::quiet_NaN();
    double whisker_lo = std::numeric_limits<double>::quiet_NaN();  // 1.5 IQR fences
    double whisker_hi = std::numeric_limits<double>::quiet_NaN();
    double min = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
    std::int64_t defined = 0;
    std::int64_t undefined = 0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline metric_summary summarize_metric(std::vector<double> values, std::int64_t undefined = 0) {
    metric_summary s;
    s.undefined = undefined;
    s.defined = static_cast<std::int64_t>(values.size());
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    s.min = values.front();
    s.max = values.back();
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.max;
    s.whisker_hi = s.min;
    for (double v : values) {
        if (v >= lo_fence && v < s.whisker_lo) s.whisker_lo = v;
        if (v <= hi_fence && v > s.whisker_hi) s.whisker_hi = v;
    }
    return s;
}

// ---------------------------------------------------------------------------
// one window, all requested models and directions

struct consistency_options {
    std::vector<null_model> models{null_model::sp, null_model::osp, null_model::rsp};
    bool run_forward = true;
    bool run_reverse = true;
    std::int64_t realizations = 1000;
    std::uint64_t master_seed = 0;
    bool include_empty_teams = false;  // empty-team credit in the headline z
    bool keep_raw = false;             // retain per-realization metric values
    window_config wcfg;
};

struct window_model_result {
    window_spec window;
    null_model model = null_model::sp;
    bool forward = true;
    std::int64_t continuing = 0;   // continuing team count
    std::int64_t links_before = 0;
    std::int64_t links_after = 0;
    metric_summary z;          // headline variant per options
    metric_summary z_other;    // the other empty-team variant
    metric_summary y;
    metric_summary lambda;     // ratio to observed reunions
    metric_summary reun_prop;  // reuniting fraction inside each realization
    std::int64_t observed_reuniting = 0;  // on the replaced half
    double observed_reun_prop = std::numeric_limits<double>::quiet_NaN();
    double prop_std_diff = std::numeric_limits<double>::quiet_NaN();
    bool lambda_caveat = false;  // rsp preserves reuniting counts by construction
    std::string failure;  // nonempty when this model/direction could not run
    // per-realization values, filled only when options ask for them
    std::vector<double> z_raw, z_other_raw, y_raw, lambda_raw, reun_prop_raw;
};

inline std::vector<window_model_result> evaluate_window(const team_history& h,
                                                        const co_membership_index& idx,
                                                        window_spec w,
                                                        const consistency_options& opt) {
    const auto teams = continuing_teams(h, w);
    const link_set before = extract_links(h, idx, w, window_side::before, opt.wcfg);
    const link_set after = extract_links(h, idx, w, window_side::after, opt.wcfg);

    std::vector<window_model_result> results;
    std::vector<bool> directions;
    if (opt.run_forward) directions.push_back(true);
    if (opt.run_reverse) directions.push_back(false);

    for (null_model model : opt.models) {
        for (bool fwd : directions) {
            const window_side sample_side = fwd ? window_side::after : window_side::before;
            const link_set& replaced = fwd ? after : before;

            window_model_result r;
            r.window = w;
            r.model = model;
            r.forward = fwd;
            r.continuing = static_cast<std::int64_t>(teams.size());
            r.links_before = static_cast<std::int64_t>(before.links.size());
            r.links_after = static_cast<std::int64_t>(after.links.size());
            r.lambda_caveat = model == null_model::rsp;
            r.observed_reuniting = semantic_reuniting_count(h, idx, replaced, opt.wcfg);
            if (!replaced.links.empty())
                r.observed_reun_prop = static_cast<double>(r.observed_reuniting) /
                                       static_cast<double>(replaced.links.size());

            stub_decomposition decomp;
            try {
                decomp = decompose(replaced, model);
                check_feasible(decomp);
            } catch (const error& e) {
                // one unusable model must not take the others down
                r.failure = e.what();
                results.push_back(std::move(r));
                continue;
            }

            std::vector<double> zs, zs_other, ys, lambdas, props;
            std::int64_t z_undef = 0, z_other_undef = 0, y_undef = 0, l_undef = 0;
            for (std::int64_t k = 0; k < opt.realizations; ++k) {
                const auto seed = realization_seed(opt.master_seed, model, w, sample_side, k);
                const link_set s = sample_realization(decomp, seed);
                try {
                    zs.push_back(z_score(before, after, s, fwd, opt.include_empty_teams, teams));
                } catch (const undefined_score&) {
                    ++z_undef;
                }
                try {
                    zs_other.push_back(
                        z_score(before, after, s, fwd, !opt.include_empty_teams, teams));
                } catch (const undefined_score&) {
                    ++z_other_undef;
                }
                try {
                    ys.push_back(y_score(fwd ? before : after, s));
                } catch (const undefined_score&) {
                    ++y_undef;
                }
                // rsp carries its reuniting labels combinatorially; re-running the
                // semantic test there would contradict the constraint definition
                std::int64_t reun = 0;
                if (model == null_model::rsp) {
                    for (const transition_link& l : s.links) reun += l.reuniting ? 1 : 0;
                } else {
                    reun = semantic_reuniting_count(h, idx, s, opt.wcfg);
                }
                if (!s.links.empty())
                    props.push_back(static_cast<double>(reun) /
                                    static_cast<double>(s.links.size()));
                if (r.observed_reuniting > 0)
                    lambdas.push_back(static_cast<double>(reun) /
                                      static_cast<double>(r.observed_reuniting));
                else
                    ++l_undef;
            }
            if (opt.keep_raw) {
                r.z_raw = zs;
                r.z_other_raw = zs_other;
                r.y_raw = ys;
                r.lambda_raw = lambdas;
                r.reun_prop_raw = props;
            }
            r.z = summarize_metric(std::move(zs), z_undef);
            r.z_other = summarize_metric(std::move(zs_other), z_other_undef);
            r.y = summarize_metric(std::move(ys), y_undef);
            r.lambda = summarize_metric(std::move(lambdas), l_undef);
            r.reun_prop = summarize_metric(std::move(props), 0);
            if (r.reun_prop.defined > 1 && r.reun_prop.sd > 0 &&
                !std::isnan(r.observed_reun_prop))
                r.prop_std_diff = (r.observed_reun_prop - r.reun_prop.mean) / r.reun_prop.sd;
            results.push_back(std::move(r));
        }
    }
    return results;
}

// every admissible window center for a given half-width
inline std::vector<window_spec> window_centers(const team_history& h, month_index dt) {
    const month_index last = h.month_count() - 1;
    if (2 * dt > last) throw window_too_large("2*dt exceeds the observed span");
    std::vector<window_spec> out;
    for (month_index t = dt; t <= last - dt; ++t) out.push_back(window_spec{t, dt});
    return out;
}

}  // namespace teamflow
