#pragma once

// Windowed transition networks.  A window (t, dt) splits the 2*dt month
// steps around t into a before half [t-dt, t) and an after half [t, t+dt):
// a move whose departure month is exactly t belongs to the after half, so no
// step is counted twice.  Only uncoordinated moves between *continuing*
// teams become links; continuing means the label is alive over the whole
// closed range [t-dt, t+dt] and the team is terminal at every month of it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "teamflow/errors.hpp"
#include "teamflow/team_builder.hpp"

namespace teamflow {

inline constexpr occ_id no_occupation = 0xFFFFFFFFu;  // mover had no record that month

struct window_spec {
    month_index t = 0;
    month_index dt = 0;
};

enum class window_side : std::uint8_t { before, after };

inline const char* to_string(window_side s) {
    return s == window_side::before ? "before" : "after";
}

struct transition_link {
    person_id mover = 0;
    team_label src = 0;
    team_label dst = 0;
    month_index month = 0;  // departure month; arrival is month + 1
    occ_id occ_from = no_occupation;
    occ_id occ_to = no_occupation;
    bool reuniting = false;
};

struct link_set {
    window_spec window;
    window_side side = window_side::before;
    std::vector<transition_link> links;  // sorted by (month, src, dst, mover)
    std::map<team_label, std::int64_t> out_strength;  // links leaving each team
    std::map<team_label, std::int64_t> in_strength;   // links entering each team

    void rebuild_strengths() {
        out_strength.clear();
        in_strength.clear();
        for (const auto& l : links) {
            out_strength[l.src]++;
            in_strength[l.dst]++;
        }
    }
    void sort_links() {
        std::sort(links.begin(), links.end(),
                  [](const transition_link& a, const transition_link& b) {
                      if (a.month != b.month) return a.month < b.month;
                      if (a.src != b.src) return a.src < b.src;
                      if (a.dst != b.dst) return a.dst < b.dst;
                      if (a.mover != b.mover) return a.mover < b.mover;
                      return a.occ_to < b.occ_to;
                  });
    }
};

inline void validate_window(const team_history& h, window_spec w) {
    if (w.dt <= 0) throw window_out_of_range("window dt must be positive");
    if (2 * w.dt > h.month_count() - 1)
        throw window_too_large("2*dt exceeds the observed span");
    if (w.t - w.dt < 0 || w.t + w.dt > h.month_count() - 1)
        throw window_out_of_range("window [t-dt, t+dt] leaves the observed range");
}

// labels alive over [t-dt, t+dt] and terminal at every month of it
inline std::vector<team_label> continuing_teams(const team_history& h, window_spec w) {
    validate_window(h, w);
    std::vector<team_label> out;
    for (team_label l : h.alive_at(w.t)) {
        const team_timeline& tl = h.timeline(l);
        if (tl.birth > w.t - w.dt || tl.death < w.t + w.dt) continue;
        bool clean = true;
        for (month_index m = w.t - w.dt; m <= w.t + w.dt && clean; ++m)
            if (tl.non_terminal_at(m)) clean = false;
        if (clean) out.push_back(l);
    }
    return out;
}

// ---------------------------------------------------------------------------
// co-membership: who has shared a team with whom, when, and at what size

class co_membership_index {
  public:
    struct entry {
        month_index month;
        team_label team;
        std::int32_t team_size;
    };

    explicit co_membership_index(const team_history& h) {
        for (const team_timeline& tl : h.timelines()) {
            for (month_index m = tl.birth; m <= tl.death; ++m) {
                const auto& folks = tl.members_at(m);
                const auto size = static_cast<std::int32_t>(folks.size());
                for (std::size_t i = 0; i < folks.size(); ++i)
                    for (std::size_t j = i + 1; j < folks.size(); ++j)
                        table_[key(folks[i], folks[j])].push_back(
                            entry{m, tl.label, size});
            }
        }
        // builder emits months in order per timeline but pairs can meet on
        // several timelines; keep each list month-sorted
        for (auto& [k, v] : table_)
            std::sort(v.begin(), v.end(), [](const entry& a, const entry& b) {
                if (a.month != b.month) return a.month < b.month;
                return a.team < b.team;
            });
    }

    // all months p and q spent in one team, oldest first; nullptr when never
    const std::vector<entry>* shared(person_id p, person_id q) const {
        auto it = table_.find(key(p, q));
        return it == table_.end() ? nullptr : &it->second;
    }

    bool together_at(person_id p, person_id q, month_index m) const {
        const auto* v = shared(p, q);
        if (!v) return false;
        auto lo = std::lower_bound(v->begin(), v->end(), m,
                                   [](const entry& e, month_index x) { return e.month < x; });
        return lo != v->end() && lo->month == m;
    }

    // some shared month strictly before m
    bool together_before(person_id p, person_id q, month_index m) const {
        const auto* v = shared(p, q);
        return v && !v->empty() && v->front().month < m;
    }

  private:
    static std::uint64_t key(person_id a, person_id b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    std::unordered_map<std::uint64_t, std::vector<entry>> table_;
};

struct window_config {
    // whether returning to one's own former team, greeted only by teammates
    // from that same team, counts as reuniting
    bool boomerang_counts = true;
};

// True iff the destination team contains, in the arrival month, somebody the
// mover used to share a team with — where "used to" requires the
// co-membership to have ended: they shared a team strictly before the
// departure month and are not teammates in the departure month itself.
// With boomerang_counts off, evidence coming only from the destination
// team's own timeline is ignored.
inline bool reunites_with_team(const team_history& h, const co_membership_index& idx,
                               person_id mover, team_label dst, month_index depart,
                               const window_config& cfg = {}) {
    const team_timeline& tl = h.timeline(dst);
    const month_index arrival = depart + 1;
    if (!tl.alive(arrival)) return false;
    for (person_id q : tl.members_at(arrival)) {
        if (q == mover) continue;
        const auto* v = idx.shared(mover, q);
        if (!v || v->empty()) continue;
        bool current = false, past = false;
        for (const auto& e : *v) {
            if (e.month >= depart) {
                if (e.month == depart) current = true;
                break;
            }
            if (cfg.boomerang_counts || e.team != dst) past = true;
        }
        if (past && !current) return true;
    }
    return false;
}

// Same predicate for a move that actually happened: the arrival team is
// wherever the mover's record puts them next month.
inline bool reunites_actual(const team_history& h, const co_membership_index& idx,
                            person_id mover, month_index depart,
                            const window_config& cfg = {}) {
    team_label arr = h.location(mover, depart + 1);
    if (arr == exterior_team) return false;
    return reunites_with_team(h, idx, mover, arr, depart, cfg);
}

// Uncoordinated moves of one window half with both endpoints continuing.
inline link_set extract_links(const team_history& h, const co_membership_index& idx,
                              window_spec w, window_side side,
                              const window_config& cfg = {}) {
    validate_window(h, w);
    auto cont = continuing_teams(h, w);
    std::vector<team_label> sorted_cont = cont;
    std::sort(sorted_cont.begin(), sorted_cont.end());
    auto is_cont = [&](team_label l) {
        return std::binary_search(sorted_cont.begin(), sorted_cont.end(), l);
    };
    const month_index lo = side == window_side::before ? w.t - w.dt : w.t;
    const month_index hi = side == window_side::before ? w.t : w.t + w.dt;  // exclusive

    link_set out;
    out.window = w;
    out.side = side;
    const panel& p = h.source();
    for (const move_event& e : h.events()) {
        if (e.kind != move_kind::uncoordinated) continue;
        if (e.month_from < lo || e.month_from >= hi) continue;
        if (!is_cont(e.from_team) || !is_cont(e.to_team)) continue;
        transition_link l;
        l.mover = e.movers.front();
        l.src = e.from_team;
        l.dst = e.to_team;
        l.month = e.month_from;
        const personnel_record* r0 = p.record(l.mover, e.month_from);
        const personnel_record* r1 = p.record(l.mover, e.month_from + 1);
        l.occ_from = r0 ? r0->occupation : no_occupation;
        l.occ_to = r1 ? r1->occupation : no_occupation;
        l.reuniting = reunites_with_team(h, idx, l.mover, l.dst, l.month, cfg);
        out.links.push_back(l);
    }
    out.sort_links();
    out.rebuild_strengths();
    return out;
}

// multiset intersection size of (src, dst) pairs, min multiplicity per pair
inline std::int64_t pair_overlap(const std::vector<transition_link>& a,
                                 const std::vector<transition_link>& b) {
    std::map<std::pair<team_label, team_label>, std::int64_t> count;
    for (const auto& l : a) count[{l.src, l.dst}]++;
    std::int64_t total = 0;
    for (const auto& l : b) {
        auto it = count.find({l.src, l.dst});
        if (it != count.end() && it->second > 0) {
            --it->second;
            ++total;
        }
    }
    return total;
}

}  // namespace teamflow
