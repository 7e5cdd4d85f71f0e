#pragma once

// Constrained randomizations of a window-half link set.
//
// Every link is cut into an out-stub (keeps mover, source team, month,
// origin occupation, reuniting flag) and an in-stub (keeps destination team
// and destination occupation).  A realization re-pairs out-stubs with
// in-stubs uniformly at random inside each constraint class:
//
//   sp   one class per link set              (per-team out/in strengths kept)
//   osp  one class per (occ_from, occ_to)    (adds occupation-pair strengths)
//   rsp  one class per reuniting flag        (adds reuniting/non-reuniting strengths)
//
// By default self-loops (source == destination) are rejected: the class is
// reshuffled up to a retry cap and then repaired by random pair swaps.  A
// class where one team owns more than half of all stub endpoints cannot
// avoid self-loops; that is detected up front and reported as infeasible.
// Multi-edges are allowed by default.  Both choices are switchable through
// rewire_config.  Sampling is driven by mt19937_64 plus portable
// helpers only, so a seed pins the realization bit for bit on any platform.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "teamflow/errors.hpp"
#include "teamflow/rng.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

enum class null_model : std::uint8_t { sp, osp, rsp };

inline const char* to_string(null_model m) {
    switch (m) {
        case null_model::sp: return "SP";
        case null_model::osp: return "OSP";
        case null_model::rsp: return "RSP";
    }
    return "?";
}

inline null_model parse_null_model(const std::string& s) {
    if (s == "SP" || s == "sp") return null_model::sp;
    if (s == "OSP" || s == "osp") return null_model::osp;
    if (s == "RSP" || s == "rsp") return null_model::rsp;
    throw malformed_input("unknown null model: " + s);
}

struct out_stub {
    person_id mover = 0;
    team_label src = 0;
    month_index month = 0;
    occ_id occ_from = no_occupation;
    bool reuniting = false;
};

struct in_stub {
    team_label dst = 0;
    occ_id occ_to = no_occupation;
};

struct stub_class {
    // class identity, only one part is meaningful per model
    occ_id occ_from = no_occupation;
    occ_id occ_to = no_occupation;
    bool reuniting = false;
    std::vector<out_stub> outs;
    std::vector<in_stub> ins;
};

struct stub_decomposition {
    null_model model = null_model::sp;
    window_spec window;
    window_side side = window_side::before;
    std::vector<stub_class> classes;  // deterministic order
};

inline stub_decomposition decompose(const link_set& ls, null_model model) {
    stub_decomposition d;
    d.model = model;
    d.window = ls.window;
    d.side = ls.side;
    std::map<std::tuple<occ_id, occ_id, bool>, std::size_t> index;
    for (const transition_link& l : ls.links) {
        std::tuple<occ_id, occ_id, bool> key{no_occupation, no_occupation, false};
        if (model == null_model::osp) key = {l.occ_from, l.occ_to, false};
        if (model == null_model::rsp) key = {no_occupation, no_occupation, l.reuniting};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, d.classes.size()).first;
            stub_class c;
            c.occ_from = std::get<0>(key);
            c.occ_to = std::get<1>(key);
            c.reuniting = std::get<2>(key);
            d.classes.push_back(std::move(c));
        }
        stub_class& c = d.classes[it->second];
        c.outs.push_back(out_stub{l.mover, l.src, l.month, l.occ_from, l.reuniting});
        c.ins.push_back(in_stub{l.dst, l.occ_to});
    }
    return d;
}

// a class admits a self-loop-free perfect matching iff no team holds more
// than half of its stub endpoints (Hall's condition collapses to this)
inline bool class_feasible(const stub_class& c) {
    std::map<team_label, std::int64_t> endpoints;
    for (const auto& o : c.outs) endpoints[o.src]++;
    for (const auto& i : c.ins) endpoints[i.dst]++;
    const auto total = static_cast<std::int64_t>(c.outs.size());
    for (const auto& [team, n] : endpoints)
        if (n > total) return false;
    return true;
}

inline void check_feasible(const stub_decomposition& d) {
    for (const auto& c : d.classes)
        if (!class_feasible(c))
            throw infeasible_no_self_loop(
                std::string("no self-loop-free matching exists for a ") + to_string(d.model) +
                " stub class of " + std::to_string(c.outs.size()) + " links");
}

struct sample_stats {
    std::int64_t reshuffles = 0;    // full class re-draws beyond the first
    std::int64_t repair_swaps = 0;  // pair swaps after the retry cap
};

// The data never shows a move from a team to itself, and repeated (src, dst)
// pairs do occur, so these are the defaults; both are switchable.
struct rewire_config {
    bool forbid_self_loops = true;
    bool forbid_multi_edges = false;
};

inline constexpr int resample_retry_cap = 100;

// One realization.  The result carries the same window/side as the input
// and is sorted canonically; reuniting flags are inherited from the
// out-stub (for rsp that equals the class flag by construction).
inline link_set sample_realization(const stub_decomposition& d, std::uint64_t seed,
                                   sample_stats* stats = nullptr,
                                   const rewire_config& cfg = {}) {
    if (cfg.forbid_self_loops) check_feasible(d);
    rng64 g = make_rng(seed);

    std::vector<std::vector<std::size_t>> perms(d.classes.size());

    auto class_self_loops = [&](std::size_t ci) {
        const stub_class& c = d.classes[ci];
        std::size_t bad = 0;
        for (std::size_t i = 0; i < c.outs.size(); ++i)
            if (c.outs[i].src == c.ins[perms[ci][i]].dst) ++bad;
        return bad;
    };

    // one valid-within-class assignment: uniform, retried, then swap-repaired
    auto draw_class = [&](std::size_t ci) {
        const stub_class& c = d.classes[ci];
        const std::size_t n = c.outs.size();
        auto& perm = perms[ci];
        perm.resize(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        shuffle_vec(perm, g);
        if (!cfg.forbid_self_loops) return;
        int rounds = 0;
        while (class_self_loops(ci) > 0 && rounds < resample_retry_cap) {
            shuffle_vec(perm, g);
            ++rounds;
            if (stats) stats->reshuffles++;
        }
        std::size_t guard = 0;
        const std::size_t guard_cap = 1000 * (n + 1);
        while (class_self_loops(ci) > 0) {
            if (++guard > guard_cap)
                throw error("self-loop repair did not converge (feasibility bug)");
            std::size_t i = 0;
            while (c.outs[i].src != c.ins[perm[i]].dst) ++i;  // first self-loop
            std::size_t j = static_cast<std::size_t>(next_below(g, n));
            if (j == i) continue;
            // after swapping targets, neither pair may self-loop
            if (c.outs[i].src == c.ins[perm[j]].dst) continue;
            if (c.outs[j].src == c.ins[perm[i]].dst) continue;
            std::swap(perm[i], perm[j]);
            if (stats) stats->repair_swaps++;
        }
    };

    for (std::size_t ci = 0; ci < d.classes.size(); ++ci) draw_class(ci);

    if (cfg.forbid_multi_edges) {
        // duplicated (src, dst) pairs across the whole sample
        auto duplicates = [&] {
            std::map<std::pair<team_label, team_label>, std::int64_t> seen;
            for (std::size_t ci = 0; ci < d.classes.size(); ++ci) {
                const stub_class& c = d.classes[ci];
                for (std::size_t i = 0; i < c.outs.size(); ++i)
                    seen[{c.outs[i].src, c.ins[perms[ci][i]].dst}]++;
            }
            std::int64_t extra = 0;
            for (const auto& [key, n] : seen) extra += n - 1;
            return extra;
        };
        int rounds = 0;
        while (duplicates() > 0 && rounds < resample_retry_cap) {
            for (std::size_t ci = 0; ci < d.classes.size(); ++ci) draw_class(ci);
            ++rounds;
            if (stats) stats->reshuffles++;
        }
        // in-class swaps that strictly reduce duplicates, never adding self-loops
        std::size_t total = 0;
        for (const auto& c : d.classes) total += c.outs.size();
        std::size_t guard = 0;
        const std::size_t guard_cap = 1000 * (total + 1);
        std::int64_t bad = duplicates();
        while (bad > 0) {
            if (++guard > guard_cap)
                throw error("multi-edge repair did not converge; instance may admit none");
            const std::size_t ci = static_cast<std::size_t>(next_below(g, d.classes.size()));
            const stub_class& c = d.classes[ci];
            if (c.outs.size() < 2) continue;
            const std::size_t i = static_cast<std::size_t>(next_below(g, c.outs.size()));
            const std::size_t j = static_cast<std::size_t>(next_below(g, c.outs.size()));
            if (i == j) continue;
            if (cfg.forbid_self_loops && (c.outs[i].src == c.ins[perms[ci][j]].dst ||
                                          c.outs[j].src == c.ins[perms[ci][i]].dst))
                continue;
            std::swap(perms[ci][i], perms[ci][j]);
            const std::int64_t after = duplicates();
            if (after < bad) {
                bad = after;
                if (stats) stats->repair_swaps++;
            } else {
                std::swap(perms[ci][i], perms[ci][j]);
            }
        }
    }

    link_set out;
    out.window = d.window;
    out.side = d.side;
    for (std::size_t ci = 0; ci < d.classes.size(); ++ci) {
        const stub_class& c = d.classes[ci];
        for (std::size_t i = 0; i < c.outs.size(); ++i) {
            transition_link l;
            l.mover = c.outs[i].mover;
            l.src = c.outs[i].src;
            l.month = c.outs[i].month;
            l.occ_from = c.outs[i].occ_from;
            l.reuniting = c.outs[i].reuniting;
            l.dst = c.ins[perms[ci][i]].dst;
            l.occ_to = c.ins[perms[ci][i]].occ_to;
            out.links.push_back(l);
        }
    }
    out.sort_links();
    out.rebuild_strengths();
    return out;
}

// documented seed schedule: one 64-bit seed per realization
inline std::uint64_t realization_seed(std::uint64_t master, null_model m, window_spec w,
                                      window_side side, std::int64_t index) {
    return mix_seed({master, static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(static_cast<std::int64_t>(w.t)),
                     static_cast<std::uint64_t>(static_cast<std::int64_t>(w.dt)),
                     static_cast<std::uint64_t>(side), static_cast<std::uint64_t>(index)});
}

// ---------------------------------------------------------------------------
// constraint verification (exercised heavily by the test suites)

namespace detail {
// per-team counts of one link set restricted to a predicate
template <typename Pred>
std::map<team_label, std::int64_t> out_counts_if(const link_set& ls, Pred pred) {
    std::map<team_label, std::int64_t> m;
    for (const auto& l : ls.links)
        if (pred(l)) m[l.src]++;
    return m;
}
template <typename Pred>
std::map<team_label, std::int64_t> in_counts_if(const link_set& ls, Pred pred) {
    std::map<team_label, std::int64_t> m;
    for (const auto& l : ls.links)
        if (pred(l)) m[l.dst]++;
    return m;
}
}  // namespace detail

// true iff `sample` preserves every marginal the model promises to keep,
// relative to `observed`, and contains no self-loop
inline bool preserves_constraints(const link_set& observed, const link_set& sample,
                                  null_model model) {
    if (observed.links.size() != sample.links.size()) return false;
    for (const auto& l : sample.links)
        if (l.src == l.dst) return false;
    auto all = [](const transition_link&) { return true; };
    if (detail::out_counts_if(observed, all) != detail::out_counts_if(sample, all)) return false;
    if (detail::in_counts_if(observed, all) != detail::in_counts_if(sample, all)) return false;
    if (model == null_model::osp) {
        std::map<std::pair<occ_id, occ_id>, std::int64_t> seen;
        for (const auto& l : observed.links) seen[{l.occ_from, l.occ_to}]++;
        for (const auto& [key, n] : seen) {
            auto match = [&key](const transition_link& l) {
                return l.occ_from == key.first && l.occ_to == key.second;
            };
            if (detail::out_counts_if(observed, match) != detail::out_counts_if(sample, match))
                return false;
            if (detail::in_counts_if(observed, match) != detail::in_counts_if(sample, match))
                return false;
        }
    }
    if (model == null_model::rsp) {
        for (bool flag : {false, true}) {
            auto match = [flag](const transition_link& l) { return l.reuniting == flag; };
            if (detail::out_counts_if(observed, match) != detail::out_counts_if(sample, match))
                return false;
            if (detail::in_counts_if(observed, match) != detail::in_counts_if(sample, match))
                return false;
        }
    }
    return true;
}

}  // namespace teamflow
