#pragma once

// Shared scaffolding for the test binaries: fixture loading, tiny panel
// builders, and hand-made link sets.

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "teamflow/csv.hpp"
#include "teamflow/panel.hpp"
#include "teamflow/team_builder.hpp"
#include "teamflow/window.hpp"

namespace tf_test {

inline std::string fixture_path(const std::string& name) {
    return std::string(TEAMFLOW_FIXTURE_DIR) + "/" + name;
}

inline std::string load_fixture(const std::string& name) {
    return teamflow::read_text_file(fixture_path(name));
}

// person id by name; fails loudly on a typo
inline teamflow::person_id pid(const teamflow::panel& p, const std::string& name) {
    for (teamflow::person_id q = 0; q < p.people().size(); ++q)
        if (p.person_name(q) == name) return q;
    throw std::runtime_error("no such person in panel: " + name);
}

inline std::vector<teamflow::person_id> pids(const teamflow::panel& p,
                                             std::initializer_list<const char*> names) {
    std::vector<teamflow::person_id> out;
    for (const char* n : names) out.push_back(pid(p, n));
    return out;
}

// one CSV row of the panel schema
inline void row(std::string& csv, const std::string& emp, const std::string& month,
                const std::string& sup, const std::string& occ,
                const std::string& pay = "g1") {
    csv += emp + "," + month + "," + sup + "," + occ + "," + pay + "\n";
}

inline std::string panel_header() {
    return "employee_id,month,supervisor_id,occupation,pay_grade\n";
}

// (mover, src, dst, month, occ_from, occ_to, reuniting)
using link_row = std::tuple<teamflow::person_id, teamflow::team_label, teamflow::team_label,
                            teamflow::month_index, teamflow::occ_id, teamflow::occ_id, bool>;

inline teamflow::link_set make_links(teamflow::window_spec w, teamflow::window_side side,
                                     const std::vector<link_row>& rows) {
    teamflow::link_set out;
    out.window = w;
    out.side = side;
    for (const auto& [mover, src, dst, month, of, ot, r] : rows) {
        teamflow::transition_link l;
        l.mover = mover;
        l.src = src;
        l.dst = dst;
        l.month = month;
        l.occ_from = of;
        l.occ_to = ot;
        l.reuniting = r;
        out.links.push_back(l);
    }
    out.sort_links();
    out.rebuild_strengths();
    return out;
}

// canonical signature of a link multiset, for outcome histograms
inline std::string link_key(const teamflow::link_set& s) {
    std::string k;
    for (const auto& l : s.links) {
        k += std::to_string(l.mover) + ":" + std::to_string(l.src) + ">" +
             std::to_string(l.dst) + "@" + std::to_string(l.month) + "/" +
             std::to_string(l.occ_from) + ">" + std::to_string(l.occ_to) + "/" +
             (l.reuniting ? "r" : "n") + ";";
    }
    return k;
}

}  // namespace tf_test
