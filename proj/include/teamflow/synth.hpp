#pragma once

// Synthetic organization generator: a fixed workforce arranged into teams
// with stable supervisors, evolving month by month through single and
// coordinated between-team moves.  Movers prefer destinations holding former
// coworkers with configurable propensity, which gives downstream reunion
// statistics a known ground truth.  Every generated move is logged, so the
// whole pipeline can be verified in a closed loop against the log.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "teamflow/csv.hpp"
#include "teamflow/errors.hpp"
#include "teamflow/month.hpp"
#include "teamflow/panel.hpp"
#include "teamflow/rng.hpp"
#include "teamflow/team_builder.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

struct synth_config {
    std::int32_t months = 108;
    std::int32_t n_teams = 30;
    double team_size_mean = 7.0;          // target mean of the size law
    double monthly_move_rate = 0.08;      // per employee per month
    double coordinated_move_rate = 0.008; // per team per month
    double reunion_propensity = 0.35;     // chance a mover with a reunion-eligible
                                          // destination picks one
    std::int32_t occupation_count = 6;
    double occupation_switch_prob = 0.4;  // mover adopts the destination's home code
    std::uint64_t seed = 1;
    // planted preferences among reunion-eligible destinations: favour
    // witnesses from smaller former teams / longer shared histories
    bool reunion_size_bias = false;
    bool reunion_duration_bias = false;
};

inline constexpr std::int32_t min_team_size = 2;
inline constexpr std::int32_t max_team_size = 60;
inline constexpr std::int64_t max_headcount = 100000;

inline void validate(const synth_config& c) {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (c.months < 2) throw infeasible_config("months must be at least 2");
    if (c.n_teams < 2) throw infeasible_config("need at least 2 teams for moves");
    if (c.occupation_count < 1) throw infeasible_config("occupation_count must be positive");
    if (!prob(c.monthly_move_rate) || !prob(c.coordinated_move_rate) ||
        !prob(c.reunion_propensity) || !prob(c.occupation_switch_prob))
        throw infeasible_config("probabilities must lie in [0, 1]");
    // a decaying exponential on [2, 60] cannot have mean past the uniform's 31
    if (!(c.team_size_mean >= 2.0) || c.team_size_mean >= 31.0)
        throw infeasible_config("team_size_mean must lie in [2, 31)");
    if (static_cast<double>(c.n_teams) * c.team_size_mean >
        static_cast<double>(max_headcount))
        throw infeasible_config("n_teams x team_size_mean exceeds the headcount bound");
}

// Probability table over sizes 2..60 of the discrete exponential
// P(s) ~ exp(-(s-2)/theta), with theta solved so the truncated mean equals
// the requested value.
inline std::vector<double> team_size_pmf(double mean) {
    const int n = max_team_size - min_team_size + 1;
    std::vector<double> p(n);
    if (mean <= 2.0) {
        p[0] = 1.0;
        return p;
    }
    auto mean_at = [&](double theta) {
        double num = 0, den = 0;
        for (int i = 0; i < n; ++i) {
            const double w = std::exp(-static_cast<double>(i) / theta);
            num += w * (min_team_size + i);
            den += w;
        }
        return num / den;
    };
    double lo = 1e-6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_at(mid) < mean ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    double den = 0;
    for (int i = 0; i < n; ++i) {
        p[i] = std::exp(-static_cast<double>(i) / theta);
        den += p[i];
    }
    for (double& v : p) v /= den;
    return p;
}

// inverse-CDF draw from the size law
inline std::int32_t sample_team_size(const std::vector<double>& pmf, rng64& g) {
    double r = next_unit(g);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        r -= pmf[i];
        if (r < 0.0) return min_team_size + static_cast<std::int32_t>(i);
    }
    return max_team_size;
}

// one generated between-team move: a single mover, or a coordinated pair
struct synth_move {
    month_index month = 0;  // departure month
    std::vector<std::string> movers;
    std::string src_supervisor;
    std::string dst_supervisor;
    bool coordinated = false;
    bool intended_reunion = false;        // generator chose a reunion destination
    bool dst_had_former_coworker = false; // realized, on the arrival month's roster
    std::vector<std::string> eligible_reunion_destinations;  // supervisors, at choice time
};

struct ground_truth_log {
    std::vector<synth_move> moves;
};

struct synth_result {
    std::string panel_csv;
    ground_truth_log log;
};

namespace detail {

inline std::string tagged(const char* prefix, std::uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s%04u", prefix, i);
    return buf;
}

}  // namespace detail

inline synth_result generate(const synth_config& cfg) {
    validate(cfg);
    rng64 g = make_rng(mix_seed({cfg.seed, 0x73796e7468ULL}));  // generator stream

    // --- staffing ---------------------------------------------------------
    const auto pmf = team_size_pmf(cfg.team_size_mean);
    const std::int32_t T = cfg.n_teams;
    std::vector<std::int32_t> reports_of(T);  // head counts excluding the supervisor
    std::int32_t R = 0;
    for (std::int32_t i = 0; i < T; ++i) {
        reports_of[i] = sample_team_size(pmf, g) - 1;
        R += reports_of[i];
    }
    if (R + T > max_headcount) throw infeasible_config("sampled headcount exceeds bound");

    // dense ids: reports 0..R-1, supervisor of team i = R+i; names sort the same way
    const std::int32_t N = R + T;
    std::vector<std::string> name(N);
    std::vector<std::int32_t> team_of(R);  // reports only; supervisors never move
    std::vector<std::int32_t> occ(N);
    std::vector<std::int32_t> home_occ(T);
    {
        std::int32_t next = 0;
        for (std::int32_t i = 0; i < T; ++i) {
            home_occ[i] = i % cfg.occupation_count;
            name[R + i] = detail::tagged("m", static_cast<std::uint32_t>(i));
            occ[R + i] = home_occ[i];
            for (std::int32_t k = 0; k < reports_of[i]; ++k, ++next) {
                name[next] = detail::tagged("e", static_cast<std::uint32_t>(next));
                team_of[next] = i;
                occ[next] = home_occ[i];
            }
        }
    }
    const std::string ceo = "root";

    // --- pair history (who worked with whom, when, how closely) ------------
    // last co-month, smallest team size ever shared, months together on the
    // team they last shared; indexed by unordered dense pair
    std::vector<month_index> last_together(static_cast<std::size_t>(N) * N, -1);
    std::vector<std::int32_t> min_size(static_cast<std::size_t>(N) * N, 0);
    std::vector<std::int32_t> last_team(static_cast<std::size_t>(N) * N, -1);
    std::vector<std::int32_t> overlap(static_cast<std::size_t>(N) * N, 0);
    auto pr = [N](std::int32_t a, std::int32_t b) {
        if (a > b) std::swap(a, b);
        return static_cast<std::size_t>(a) * N + b;
    };

    std::vector<std::vector<std::int32_t>> roster(T);  // report ids per team
    auto rebuild_roster = [&] {
        for (auto& v : roster) v.clear();
        for (std::int32_t p = 0; p < R; ++p) roster[team_of[p]].push_back(p);
    };
    auto update_pairs = [&](month_index u) {
        for (std::int32_t i = 0; i < T; ++i) {
            std::vector<std::int32_t> folks = roster[i];
            folks.push_back(R + i);
            const auto size = static_cast<std::int32_t>(folks.size());
            for (std::size_t a = 0; a < folks.size(); ++a)
                for (std::size_t b = a + 1; b < folks.size(); ++b) {
                    const std::size_t k = pr(folks[a], folks[b]);
                    last_together[k] = u;
                    min_size[k] = min_size[k] == 0 ? size : std::min(min_size[k], size);
                    if (last_team[k] == i) {
                        ++overlap[k];
                    } else {
                        last_team[k] = i;
                        overlap[k] = 1;
                    }
                }
        }
    };
    // shared before the departure month and no longer teammates then
    auto former = [&](std::int32_t p, std::int32_t q, month_index depart) {
        const std::size_t k = pr(p, q);
        return last_together[k] != -1 && last_together[k] < depart;
    };

    // --- panel rows ---------------------------------------------------------
    const calendar_month origin{2015, 1};
    std::string csv = "employee_id,month,supervisor_id,occupation,pay_grade\n";
    auto emit_month = [&](month_index m) {
        const std::string ym = format_calendar_month(shift(origin, m));
        for (std::int32_t p = 0; p < R; ++p) {
            csv += name[p];
            csv += ',';
            csv += ym;
            csv += ',';
            csv += name[R + team_of[p]];
            csv += ',';
            csv += detail::tagged("occ", static_cast<std::uint32_t>(occ[p]));
            csv += ",g1\n";
        }
        for (std::int32_t i = 0; i < T; ++i) {
            csv += name[R + i];
            csv += ',';
            csv += ym;
            csv += ",";
            csv += ceo;
            csv += ',';
            csv += detail::tagged("occ", static_cast<std::uint32_t>(occ[R + i]));
            csv += ",g2\n";
        }
    };

    rebuild_roster();
    emit_month(0);

    ground_truth_log log;

    struct pending {
        std::vector<std::int32_t> movers;
        std::int32_t src, dst;
        bool coordinated, intended;
        std::vector<std::string> eligible;
    };

    for (month_index t = 0; t + 1 < cfg.months; ++t) {
        update_pairs(t);

        std::vector<pending> plan;
        std::vector<bool> moving(R, false);
        std::vector<std::vector<bool>> used(T, std::vector<bool>(T, false));
        std::vector<std::int32_t> remaining(T);  // heads left after scheduled departures
        for (std::int32_t i = 0; i < T; ++i) remaining[i] = static_cast<std::int32_t>(roster[i].size());

        // coordinated pair moves, one coin per team
        for (std::int32_t i = 0; i < T; ++i) {
            if (next_unit(g) >= cfg.coordinated_move_rate) continue;
            if (remaining[i] < 3) continue;  // keep the source team above two heads
            std::vector<std::int32_t> cand;
            for (std::int32_t p : roster[i])
                if (!moving[p]) cand.push_back(p);
            std::vector<std::int32_t> dsts;
            for (std::int32_t j = 0; j < T; ++j)
                if (j != i && !used[i][j]) dsts.push_back(j);
            if (dsts.empty()) continue;
            const std::int32_t a = cand[next_below(g, cand.size())];
            std::int32_t b = a;
            while (b == a) b = cand[next_below(g, cand.size())];
            const std::int32_t j = dsts[next_below(g, dsts.size())];
            used[i][j] = true;
            moving[a] = moving[b] = true;
            remaining[i] -= 2;
            pending m;
            m.movers = {std::min(a, b), std::max(a, b)};
            m.src = i;
            m.dst = j;
            m.coordinated = true;
            m.intended = false;
            plan.push_back(std::move(m));
        }

        // who moves alone this month
        std::vector<std::int32_t> solo;
        for (std::int32_t p = 0; p < R; ++p) {
            if (moving[p] || remaining[team_of[p]] < 2) continue;
            if (next_unit(g) < cfg.monthly_move_rate) {
                solo.push_back(p);
                moving[p] = true;
                remaining[team_of[p]] -= 1;
            }
        }

        // destinations, assigned serially so no two single movers share a
        // (source, destination) pair — the builder would read that as a
        // coordinated move
        for (std::int32_t p : solo) {
            const std::int32_t i = team_of[p];
            std::vector<std::int32_t> open;
            for (std::int32_t j = 0; j < T; ++j)
                if (j != i && !used[i][j]) open.push_back(j);
            if (open.empty()) {
                moving[p] = false;
                remaining[i] += 1;
                continue;
            }
            // reunion-eligible destinations: a former coworker is there now
            // and is not scheduled to leave, so they will greet the arrival
            std::vector<std::int32_t> reunion;
            std::vector<double> weight;
            for (std::int32_t j : open) {
                double best = 0.0;
                for (std::int32_t q : roster[j]) {
                    if (moving[q] || !former(p, q, t)) continue;
                    const std::size_t k = pr(p, q);
                    double w = 1.0;
                    if (cfg.reunion_size_bias) w *= 1.0 / std::max(1, min_size[k]);
                    if (cfg.reunion_duration_bias) w *= static_cast<double>(overlap[k]);
                    best = std::max(best, w);
                }
                if (former(p, R + j, t)) {  // the supervisor counts too
                    const std::size_t k = pr(p, R + j);
                    double w = 1.0;
                    if (cfg.reunion_size_bias) w *= 1.0 / std::max(1, min_size[k]);
                    if (cfg.reunion_duration_bias) w *= static_cast<double>(overlap[k]);
                    best = std::max(best, w);
                }
                if (best > 0.0) {
                    reunion.push_back(j);
                    weight.push_back(best);
                }
            }
            pending m;
            m.movers = {p};
            m.src = i;
            m.coordinated = false;
            for (std::int32_t j : reunion) m.eligible.push_back(name[R + j]);
            if (!reunion.empty() && next_unit(g) < cfg.reunion_propensity) {
                m.dst = reunion[weighted_pick(g, weight)];
                m.intended = true;
            } else {
                m.dst = open[next_below(g, open.size())];
                m.intended = false;
            }
            used[i][m.dst] = true;
            plan.push_back(std::move(m));
        }

        // apply the month's moves
        for (const pending& m : plan)
            for (std::int32_t p : m.movers) {
                team_of[p] = m.dst;
                if (next_unit(g) < cfg.occupation_switch_prob) occ[p] = home_occ[m.dst];
            }
        rebuild_roster();

        // realized reunion flags against the arrival month's rosters
        for (const pending& m : plan) {
            synth_move row;
            row.month = t;
            for (std::int32_t p : m.movers) row.movers.push_back(name[p]);
            row.src_supervisor = name[R + m.src];
            row.dst_supervisor = name[R + m.dst];
            row.coordinated = m.coordinated;
            row.intended_reunion = m.intended;
            row.eligible_reunion_destinations = m.eligible;
            const std::int32_t p = m.movers.front();
            bool hit = former(p, R + m.dst, t);
            for (std::int32_t q : roster[m.dst])
                if (q != p && former(p, q, t)) { hit = true; break; }
            row.dst_had_former_coworker = hit;
            log.moves.push_back(std::move(row));
        }

        emit_month(t + 1);
    }

    return synth_result{std::move(csv), std::move(log)};
}

// ---------------------------------------------------------------------------
// closed-loop verification against the builder

struct verify_report {
    bool ok = false;
    std::int64_t log_moves = 0;
    std::int64_t library_moves = 0;  // between-team move events in the built history
    std::int64_t matched = 0;
    std::int64_t unmatched_log = 0;
    std::int64_t unmatched_library = 0;
    std::int64_t flags_checked = 0;
    std::int64_t flag_mismatches = 0;
    std::vector<std::string> notes;  // first few discrepancies, for humans
};

inline verify_report verify_log(const team_history& h, const ground_truth_log& log,
                                const window_config& cfg = {}) {
    const panel& p = h.source();
    std::map<std::string, person_id> by_name;
    for (person_id q = 0; q < p.people().size(); ++q) by_name[p.person_name(q)] = q;

    auto note = [](verify_report& r, std::string s) {
        if (r.notes.size() < 10) r.notes.push_back(std::move(s));
    };

    // multiset match on (kind, month, movers, source sup, destination sup)
    auto log_key = [&](const synth_move& m) {
        std::string k = m.coordinated ? "c|" : "u|";
        k += std::to_string(m.month);
        k += '|';
        std::vector<std::string> ms = m.movers;
        std::sort(ms.begin(), ms.end());
        for (const auto& s : ms) { k += s; k += '+'; }
        k += '|';
        k += m.src_supervisor;
        k += '|';
        k += m.dst_supervisor;
        return k;
    };
    auto event_key = [&](const move_event& e) {
        std::string k = e.kind == move_kind::coordinated ? "c|" : "u|";
        k += std::to_string(e.month_from);
        k += '|';
        std::vector<std::string> ms;
        for (person_id q : e.movers) ms.push_back(p.person_name(q));
        std::sort(ms.begin(), ms.end());
        for (const auto& s : ms) { k += s; k += '+'; }
        k += '|';
        k += p.person_name(h.timeline(e.from_team).supervisor_at(e.month_from));
        k += '|';
        // the destination label can be replaced in the same step (coordinated
        // arrivals relabel the receiving team), so resolve the arrival roster
        // through the mover's own location instead of e.to_team
        const team_label arr = h.location(e.movers.front(), e.month_from + 1);
        k += p.person_name(h.timeline(arr).supervisor_at(e.month_from + 1));
        return k;
    };

    verify_report r;
    std::map<std::string, std::int64_t> tally;
    for (const synth_move& m : log.moves) {
        ++r.log_moves;
        ++tally[log_key(m)];
    }
    for (const move_event& e : h.events()) {
        if (e.kind != move_kind::uncoordinated && e.kind != move_kind::coordinated) continue;
        ++r.library_moves;
        --tally[event_key(e)];
    }
    for (const auto& [k, v] : tally) {
        if (v > 0) {
            r.unmatched_log += v;
            note(r, "log move without builder event: " + k);
        } else if (v < 0) {
            r.unmatched_library -= v;
            note(r, "builder event without log move: " + k);
        }
    }
    r.matched = r.log_moves - r.unmatched_log;

    // semantic reuniting flags must agree with the realized ground truth
    co_membership_index idx(h);
    for (const synth_move& m : log.moves) {
        if (m.coordinated) continue;
        const person_id mover = by_name.at(m.movers.front());
        ++r.flags_checked;
        if (reunites_actual(h, idx, mover, m.month, cfg) != m.dst_had_former_coworker) {
            ++r.flag_mismatches;
            note(r, "reunion flag mismatch: " + m.movers.front() + " at month " +
                        std::to_string(m.month));
        }
    }

    r.ok = r.unmatched_log == 0 && r.unmatched_library == 0 && r.flag_mismatches == 0;
    return r;
}

}  // namespace teamflow
