#pragma once

// Team reconstruction from the supervisor links in a monthly panel.
//
// A team in one month is a supervisor together with their direct reports.
// Identity over time is tracked on people, not on the supervisor key: a team
// keeps its label from one month to the next iff at least two of its members
// (supervisor included) are still together in the successor group and no
// coordinated move touches it.  A coordinated move is two or more employees
// leaving one team for the same destination team in the same step; it gives
// fresh labels to both endpoint teams.  Single movers never break identity,
// and neither does supervisor turnover on its own.  Joining or leaving the
// organization never relabels anything.
//
// Team alignment across a month boundary anchors on the supervisor first: a
// supervisor present in both months keeps their team's lineage whenever at
// least two members carry over.  Teams and groups left unanchored (e.g. by
// supervisor turnover) align by greedy maximum member overlap over pairs
// sharing at least two members, ties broken deterministically.  Per-person
// movement is judged on each
// employee's own record: you live in the group of the supervisor your record
// names (a supervisor without a record of their own lives in the group they
// lead).  Full member sets — reports plus supervisor — are what identity
// overlap, team size, and membership queries are defined on.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "teamflow/errors.hpp"
#include "teamflow/panel.hpp"

namespace teamflow {

using team_label = std::int64_t;
inline constexpr team_label exterior_team = -1;  // outside the organization

enum class birth_cause : std::uint8_t {
    dataset_start,
    assembly,
    mutation_coordinated,
    supervisor_status_change,
};

enum class death_cause : std::uint8_t {
    dataset_end,
    disassembly,
    shrink_below_two,
    mutation_coordinated,
    supervisor_status_change,
};

inline const char* to_string(birth_cause c) {
    switch (c) {
        case birth_cause::dataset_start: return "dataset_start";
        case birth_cause::assembly: return "assembly";
        case birth_cause::mutation_coordinated: return "mutation_coordinated";
        case birth_cause::supervisor_status_change: return "supervisor_status_change";
    }
    return "?";
}

inline const char* to_string(death_cause c) {
    switch (c) {
        case death_cause::dataset_end: return "dataset_end";
        case death_cause::disassembly: return "disassembly";
        case death_cause::shrink_below_two: return "shrink_below_two";
        case death_cause::mutation_coordinated: return "mutation_coordinated";
        case death_cause::supervisor_status_change: return "supervisor_status_change";
    }
    return "?";
}

enum class move_kind : std::uint8_t { coordinated, uncoordinated, org_entry, org_exit };

inline const char* to_string(move_kind k) {
    switch (k) {
        case move_kind::coordinated: return "coordinated";
        case move_kind::uncoordinated: return "uncoordinated";
        case move_kind::org_entry: return "org_entry";
        case move_kind::org_exit: return "org_exit";
    }
    return "?";
}

// one movement between the groups of month t and month t+1
struct move_event {
    month_index month_from = 0;  // the t of the t -> t+1 step
    move_kind kind = move_kind::uncoordinated;
    std::vector<person_id> movers;        // sorted; size >= 2 iff coordinated
    team_label from_team = exterior_team;  // exterior for org_entry
    team_label to_team = exterior_team;    // exterior for org_exit
};

struct team_timeline {
    team_label label = 0;
    month_index birth = 0;  // first month of existence
    month_index death = 0;  // last month of existence (inclusive)
    birth_cause born = birth_cause::dataset_start;
    death_cause died = death_cause::dataset_end;            // primary cause
    std::vector<death_cause> death_notes;                   // all causes, primary first
    bool censored_start = false;  // existed in the first observed month
    bool censored_end = false;    // still alive in the last observed month

    // per month of existence, index = month - birth
    std::vector<person_id> supervisor;
    std::vector<std::vector<person_id>> members;  // sorted, supervisor included once
    std::vector<bool> non_terminal;  // some non-supervisor member leads another group

    bool alive(month_index m) const { return m >= birth && m <= death; }
    month_index lifetime() const { return death - birth; }  // 0-based age at death
    const std::vector<person_id>& members_at(month_index m) const {
        return members[static_cast<std::size_t>(m - birth)];
    }
    person_id supervisor_at(month_index m) const {
        return supervisor[static_cast<std::size_t>(m - birth)];
    }
    bool non_terminal_at(month_index m) const {
        return non_terminal[static_cast<std::size_t>(m - birth)];
    }
    bool has_member(person_id p, month_index m) const {
        const auto& v = members_at(m);
        return std::binary_search(v.begin(), v.end(), p);
    }
};

// supervisor -> full member set (reports plus the supervisor, sorted)
inline std::map<person_id, std::vector<person_id>> raw_groups(const panel& p, month_index m) {
    std::map<person_id, std::vector<person_id>> out;
    for (const raw_group& g : p.groups_at(m)) {
        std::vector<person_id> members = g.reports;
        members.insert(std::lower_bound(members.begin(), members.end(), g.supervisor),
                       g.supervisor);
        out.emplace(g.supervisor, std::move(members));
    }
    return out;
}

// Classify person movements between two months given membership partitions
// keyed by team identity: equal keys mean "the same team", keys present only
// on one side mean a team that was born or died at this boundary.  Each
// person must appear at most once per side.  Groups of >= 2 movers sharing
// (source, destination) become one coordinated event; remaining movers yield
// uncoordinated events; appearing/disappearing people yield org_entry /
// org_exit singletons.
inline std::vector<move_event> classify_step(
    const std::map<team_label, std::vector<person_id>>& at_t,
    const std::map<team_label, std::vector<person_id>>& at_t1, month_index t) {
    std::unordered_map<person_id, team_label> loc_t, loc_t1;
    for (const auto& [label, folks] : at_t)
        for (person_id p : folks) loc_t.emplace(p, label);
    for (const auto& [label, folks] : at_t1)
        for (person_id p : folks) loc_t1.emplace(p, label);

    std::map<std::pair<team_label, team_label>, std::vector<person_id>> between;
    std::vector<move_event> events;
    for (const auto& [p, from] : loc_t) {
        auto it = loc_t1.find(p);
        if (it == loc_t1.end()) {
            move_event e;
            e.month_from = t;
            e.kind = move_kind::org_exit;
            e.movers = {p};
            e.from_team = from;
            e.to_team = exterior_team;
            events.push_back(std::move(e));
        } else if (it->second != from) {
            between[{from, it->second}].push_back(p);
        }
    }
    for (const auto& [p, to] : loc_t1) {
        if (loc_t.find(p) != loc_t.end()) continue;
        move_event e;
        e.month_from = t;
        e.kind = move_kind::org_entry;
        e.movers = {p};
        e.from_team = exterior_team;
        e.to_team = to;
        events.push_back(std::move(e));
    }
    for (auto& [pair, movers] : between) {
        std::sort(movers.begin(), movers.end());
        if (movers.size() >= 2) {
            move_event e;
            e.month_from = t;
            e.kind = move_kind::coordinated;
            e.movers = std::move(movers);
            e.from_team = pair.first;
            e.to_team = pair.second;
            events.push_back(std::move(e));
        } else {
            move_event e;
            e.month_from = t;
            e.kind = move_kind::uncoordinated;
            e.movers = std::move(movers);
            e.from_team = pair.first;
            e.to_team = pair.second;
            events.push_back(std::move(e));
        }
    }
    std::sort(events.begin(), events.end(), [](const move_event& a, const move_event& b) {
        if (a.month_from != b.month_from) return a.month_from < b.month_from;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.from_team != b.from_team) return a.from_team < b.from_team;
        if (a.to_team != b.to_team) return a.to_team < b.to_team;
        return a.movers < b.movers;
    });
    return events;
}

class team_history {
  public:
    const panel& source() const { return *panel_; }
    std::shared_ptr<const panel> source_ptr() const { return panel_; }

    const std::vector<team_timeline>& timelines() const { return timelines_; }
    const team_timeline& timeline(team_label l) const {
        return timelines_[static_cast<std::size_t>(l)];
    }
    const std::vector<move_event>& events() const { return events_; }

    // labels alive in month m
    const std::vector<team_label>& alive_at(month_index m) const {
        return alive_[static_cast<std::size_t>(m)];
    }

    // team of residence of p in month m; exterior_team when not employed
    team_label location(person_id p, month_index m) const {
        const auto& row = location_[static_cast<std::size_t>(m)];
        return p < row.size() ? row[p] : exterior_team;
    }

    bool employed(person_id p, month_index m) const {
        return location(p, m) != exterior_team;
    }

    month_index month_count() const { return panel_->month_count(); }

  private:
    friend team_history build_history(std::shared_ptr<const panel> p);
    std::shared_ptr<const panel> panel_;
    std::vector<team_timeline> timelines_;  // label == index
    std::vector<move_event> events_;
    std::vector<std::vector<team_label>> alive_;     // month -> labels
    std::vector<std::vector<team_label>> location_;  // month -> person -> label
};

namespace detail {

// membership partition of one month: each person in exactly one group,
// keyed by the group's supervisor
inline std::map<person_id, std::vector<person_id>> location_partition(const panel& p,
                                                                      month_index m) {
    std::map<person_id, std::vector<person_id>> out;
    for (const raw_group& g : p.groups_at(m)) {
        std::vector<person_id> folks = g.reports;
        if (!p.has_record(g.supervisor, m)) {  // supervisor lives here unless a record says otherwise
            folks.insert(std::lower_bound(folks.begin(), folks.end(), g.supervisor),
                         g.supervisor);
        }
        out.emplace(g.supervisor, std::move(folks));
    }
    return out;
}

inline std::size_t overlap_count(const std::vector<person_id>& a,
                                 const std::vector<person_id>& b) {
    std::size_t n = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

}  // namespace detail

// Run the identity rules over the whole panel.
inline team_history build_history(std::shared_ptr<const panel> pp) {
    const panel& p = *pp;
    team_history h;
    h.panel_ = pp;
    const month_index months = p.month_count();
    h.alive_.resize(static_cast<std::size_t>(months));
    h.location_.assign(static_cast<std::size_t>(months),
                       std::vector<team_label>(p.people().size(), exterior_team));

    auto start_timeline = [&](month_index m, birth_cause cause, person_id sup,
                              std::vector<person_id> members) -> team_label {
        team_timeline t;
        t.label = static_cast<team_label>(h.timelines_.size());
        t.birth = m;
        t.death = m;
        t.born = cause;
        t.censored_start = (m == 0);
        t.supervisor.push_back(sup);
        t.members.push_back(std::move(members));
        t.non_terminal.push_back(false);  // filled in below
        h.timelines_.push_back(std::move(t));
        return h.timelines_.back().label;
    };
    auto extend_timeline = [&](team_label l, month_index m, person_id sup,
                               std::vector<person_id> members) {
        team_timeline& t = h.timelines_[static_cast<std::size_t>(l)];
        t.death = m;
        t.supervisor.push_back(sup);
        t.members.push_back(std::move(members));
        t.non_terminal.push_back(false);
    };

    // groups of the current month with their assigned labels
    struct live_team {
        team_label label;
        person_id sup;
        std::vector<person_id> members;  // full set
    };
    std::vector<live_team> current;

    // month 0: every group starts a timeline
    {
        auto groups = raw_groups(p, 0);
        for (auto& [sup, members] : groups) {
            team_label l = start_timeline(0, birth_cause::dataset_start, sup, members);
            current.push_back(live_team{l, sup, std::move(members)});
        }
    }

    auto stamp_month = [&](month_index m, const std::vector<live_team>& teams) {
        auto& alive = h.alive_[static_cast<std::size_t>(m)];
        for (const auto& t : teams) {
            alive.push_back(t.label);
            // non-terminal: a member other than the supervisor leads some group
            bool nt = false;
            for (person_id q : t.members)
                if (q != t.sup && p.supervises(q, m)) { nt = true; break; }
            h.timelines_[static_cast<std::size_t>(t.label)]
                .non_terminal[static_cast<std::size_t>(m - h.timelines_[static_cast<std::size_t>(t.label)].birth)] = nt;
        }
        auto& loc = h.location_[static_cast<std::size_t>(m)];
        auto parts = detail::location_partition(p, m);
        std::unordered_map<person_id, team_label> label_of_sup;
        for (const auto& t : teams) label_of_sup.emplace(t.sup, t.label);
        for (const auto& [sup, folks] : parts) {
            team_label l = label_of_sup.at(sup);
            for (person_id q : folks) loc[q] = l;
        }
    };
    stamp_month(0, current);

    for (month_index t = 0; t + 1 < months; ++t) {
        const month_index u = t + 1;
        auto next_groups_map = raw_groups(p, u);
        struct next_group {
            person_id sup;
            std::vector<person_id> members;
            int matched_team = -1;  // index into `current`
            bool coord_target = false;
            team_label final_label = exterior_team;
        };
        std::vector<next_group> next;
        next.reserve(next_groups_map.size());
        for (auto& [sup, members] : next_groups_map)
            next.push_back(next_group{sup, std::move(members), -1, false, exterior_team});

        // ---- lineage matching on full member sets -------------------------
        // The administrative anchor comes first: a supervisor present on both
        // sides keeps their team's lineage whenever at least two members (the
        // supervisor included) carry over.  Without that, a bulk arrival can
        // out-overlap the receiving team's own residue and walk off with the
        // source's label, turning a coordinated move into phantom
        // single-person shuffles.  Whatever remains -- supervisor turnover,
        // promotions -- is matched by best member overlap, ties broken
        // deterministically.
        std::vector<int> match_of_team(current.size(), -1);  // -> group idx
        {
            std::unordered_map<person_id, std::size_t> team_of_sup;
            for (std::size_t a = 0; a < current.size(); ++a)
                team_of_sup.emplace(current[a].sup, a);
            for (std::size_t b = 0; b < next.size(); ++b) {
                auto it = team_of_sup.find(next[b].sup);
                if (it == team_of_sup.end()) continue;
                if (detail::overlap_count(current[it->second].members, next[b].members) < 2)
                    continue;
                match_of_team[it->second] = static_cast<int>(b);
                next[b].matched_team = static_cast<int>(it->second);
            }
        }
        struct support_edge {
            std::size_t team_idx, group_idx, overlap;
        };
        std::vector<support_edge> edges;
        for (std::size_t a = 0; a < current.size(); ++a) {
            if (match_of_team[a] != -1) continue;
            for (std::size_t b = 0; b < next.size(); ++b) {
                if (next[b].matched_team != -1) continue;
                std::size_t ov = detail::overlap_count(current[a].members, next[b].members);
                if (ov >= 2) edges.push_back(support_edge{a, b, ov});
            }
        }
        std::sort(edges.begin(), edges.end(), [&](const support_edge& x, const support_edge& y) {
            if (x.overlap != y.overlap) return x.overlap > y.overlap;
            if (current[x.team_idx].label != current[y.team_idx].label)
                return current[x.team_idx].label < current[y.team_idx].label;
            return next[x.group_idx].sup < next[y.group_idx].sup;
        });
        for (const auto& e : edges) {
            if (match_of_team[e.team_idx] != -1 || next[e.group_idx].matched_team != -1) continue;
            match_of_team[e.team_idx] = static_cast<int>(e.group_idx);
            next[e.group_idx].matched_team = static_cast<int>(e.team_idx);
        }

        // ---- person transitions (record-based residence) ------------------
        const auto& loc_now = h.location_[static_cast<std::size_t>(t)];
        auto parts_next = detail::location_partition(p, u);
        std::unordered_map<person_id, std::size_t> group_of_next;  // person -> next idx
        {
            std::unordered_map<person_id, std::size_t> idx_of_sup;
            for (std::size_t b = 0; b < next.size(); ++b) idx_of_sup.emplace(next[b].sup, b);
            for (const auto& [sup, folks] : parts_next) {
                std::size_t b = idx_of_sup.at(sup);
                for (person_id q : folks) group_of_next.emplace(q, b);
            }
        }
        std::unordered_map<team_label, std::size_t> team_idx_of_label;
        for (std::size_t a = 0; a < current.size(); ++a)
            team_idx_of_label.emplace(current[a].label, a);

        // (source team idx, dest group idx) -> movers
        std::map<std::pair<std::size_t, std::size_t>, std::vector<person_id>> flows;
        std::vector<std::pair<person_id, team_label>> exits;   // person, source label
        std::vector<std::pair<person_id, std::size_t>> entries;  // person, dest group idx
        for (person_id q = 0; q < p.people().size(); ++q) {
            team_label from = q < loc_now.size() ? loc_now[q] : exterior_team;
            auto it = group_of_next.find(q);
            if (from == exterior_team) {
                if (it != group_of_next.end()) entries.push_back({q, it->second});
                continue;
            }
            std::size_t a = team_idx_of_label.at(from);
            if (it == group_of_next.end()) {
                exits.push_back({q, from});
            } else if (match_of_team[a] != static_cast<int>(it->second)) {
                flows[{a, it->second}].push_back(q);
            }
        }

        // ---- coordinated endpoints ----------------------------------------
        std::vector<bool> team_coordinated(current.size(), false);
        for (const auto& [pair, movers] : flows) {
            if (movers.size() < 2) continue;
            team_coordinated[pair.first] = true;
            next[pair.second].coord_target = true;
            if (next[pair.second].matched_team >= 0)
                team_coordinated[static_cast<std::size_t>(next[pair.second].matched_team)] = true;
        }

        // ---- supervisor status changes on persisting candidates -----------
        std::vector<bool> team_status_break(current.size(), false);
        for (std::size_t a = 0; a < current.size(); ++a) {
            if (match_of_team[a] < 0 || team_coordinated[a]) continue;
            const auto& g = next[static_cast<std::size_t>(match_of_team[a])];
            for (person_id q : current[a].members) {
                if (q == current[a].sup || q == g.sup) continue;
                if (!std::binary_search(g.members.begin(), g.members.end(), q)) continue;
                bool led_now = p.supervises(q, t);
                bool led_next = p.supervises(q, u);
                if (led_now != led_next) { team_status_break[a] = true; break; }
            }
        }

        // ---- deaths ---------------------------------------------------------
        for (std::size_t a = 0; a < current.size(); ++a) {
            team_timeline& tl = h.timelines_[static_cast<std::size_t>(current[a].label)];
            const bool unmatched = match_of_team[a] < 0;
            std::vector<death_cause> causes;
            if (team_coordinated[a]) causes.push_back(death_cause::mutation_coordinated);
            if (!team_coordinated[a] && !unmatched && team_status_break[a])
                causes.push_back(death_cause::supervisor_status_change);
            if (unmatched) {
                bool anyone_left = false;
                for (person_id q : current[a].members)
                    if (p.employed(q, u)) { anyone_left = true; break; }
                causes.push_back(anyone_left ? death_cause::shrink_below_two
                                             : death_cause::disassembly);
            }
            if (causes.empty()) continue;  // persists
            tl.died = causes.front();
            tl.death_notes = std::move(causes);
        }

        // ---- label assignment for month u -----------------------------------
        std::vector<live_team> upcoming;
        upcoming.reserve(next.size());
        for (auto& g : next) {
            team_label label;
            if (g.matched_team >= 0) {
                const auto a = static_cast<std::size_t>(g.matched_team);
                if (team_coordinated[a]) {
                    label = start_timeline(u, birth_cause::mutation_coordinated, g.sup, g.members);
                } else if (team_status_break[a]) {
                    label = start_timeline(u, birth_cause::supervisor_status_change, g.sup,
                                           g.members);
                } else {
                    label = current[a].label;
                    extend_timeline(label, u, g.sup, g.members);
                }
            } else if (g.coord_target) {
                label = start_timeline(u, birth_cause::mutation_coordinated, g.sup, g.members);
            } else {
                label = start_timeline(u, birth_cause::assembly, g.sup, g.members);
            }
            g.final_label = label;
            upcoming.push_back(live_team{label, g.sup, g.members});
        }

        // ---- events -----------------------------------------------------------
        // destination named by the lineage's label at t when it existed,
        // otherwise by the fresh label just assigned
        auto dest_label = [&](std::size_t b) -> team_label {
            if (next[b].matched_team >= 0)
                return current[static_cast<std::size_t>(next[b].matched_team)].label;
            return next[b].final_label;
        };
        std::vector<move_event> step_events;
        for (auto& [pair, movers] : flows) {
            move_event e;
            e.month_from = t;
            e.kind = movers.size() >= 2 ? move_kind::coordinated : move_kind::uncoordinated;
            std::sort(movers.begin(), movers.end());
            e.movers = std::move(movers);
            e.from_team = current[pair.first].label;
            e.to_team = dest_label(pair.second);
            step_events.push_back(std::move(e));
        }
        for (auto& [q, from] : exits) {
            move_event e;
            e.month_from = t;
            e.kind = move_kind::org_exit;
            e.movers = {q};
            e.from_team = from;
            e.to_team = exterior_team;
            step_events.push_back(std::move(e));
        }
        for (auto& [q, b] : entries) {
            move_event e;
            e.month_from = t;
            e.kind = move_kind::org_entry;
            e.movers = {q};
            e.from_team = exterior_team;
            e.to_team = dest_label(b);
            step_events.push_back(std::move(e));
        }
        std::sort(step_events.begin(), step_events.end(),
                  [](const move_event& a, const move_event& b) {
                      if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                      if (a.from_team != b.from_team) return a.from_team < b.from_team;
                      if (a.to_team != b.to_team) return a.to_team < b.to_team;
                      return a.movers < b.movers;
                  });
        for (auto& e : step_events) h.events_.push_back(std::move(e));

        current = std::move(upcoming);
        stamp_month(u, current);
    }

    // survivors of the last month are censored
    for (const auto& t : current) {
        team_timeline& tl = h.timelines_[static_cast<std::size_t>(t.label)];
        tl.died = death_cause::dataset_end;
        tl.death_notes = {death_cause::dataset_end};
        tl.censored_end = true;
    }
    return h;
}

inline team_history build_history(const panel& p) {
    return build_history(std::make_shared<panel>(p));
}

}  // namespace teamflow
