#pragma once

// Every file format the pipeline reads or writes, kept in one place: team
// histories and ground-truth logs as JSON, move events / links / rewired
// samples / consistency reports / reunion tables as CSV, plus the run
// manifest that makes any output reproducible from its recorded config.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "teamflow/consistency.hpp"
#include "teamflow/csv.hpp"
#include "teamflow/io_util.hpp"
#include "teamflow/logistic.hpp"
#include "teamflow/null_models.hpp"
#include "teamflow/panel.hpp"
#include "teamflow/reunite.hpp"
#include "teamflow/synth.hpp"
#include "teamflow/team_builder.hpp"
#include "teamflow/team_stats.hpp"
#include "teamflow/window.hpp"

namespace teamflow {

using json = nlohmann::json;

inline constexpr const char* code_version = "teamflow 1.0.0";

// --- synth config / log -----------------------------------------------------

inline json to_json(const synth_config& c) {
    return json{{"months", c.months},
                {"n_teams", c.n_teams},
                {"team_size_mean", c.team_size_mean},
                {"monthly_move_rate", c.monthly_move_rate},
                {"coordinated_move_rate", c.coordinated_move_rate},
                {"reunion_propensity", c.reunion_propensity},
                {"occupation_count", c.occupation_count},
                {"occupation_switch_prob", c.occupation_switch_prob},
                {"seed", c.seed},
                {"reunion_size_bias", c.reunion_size_bias},
                {"reunion_duration_bias", c.reunion_duration_bias}};
}

inline synth_config synth_config_from_json(const json& j) {
    synth_config c;
    c.months = j.value("months", c.months);
    c.n_teams = j.value("n_teams", c.n_teams);
    c.team_size_mean = j.value("team_size_mean", c.team_size_mean);
    c.monthly_move_rate = j.value("monthly_move_rate", c.monthly_move_rate);
    c.coordinated_move_rate = j.value("coordinated_move_rate", c.coordinated_move_rate);
    c.reunion_propensity = j.value("reunion_propensity", c.reunion_propensity);
    c.occupation_count = j.value("occupation_count", c.occupation_count);
    c.occupation_switch_prob = j.value("occupation_switch_prob", c.occupation_switch_prob);
    c.seed = j.value("seed", c.seed);
    c.reunion_size_bias = j.value("reunion_size_bias", c.reunion_size_bias);
    c.reunion_duration_bias = j.value("reunion_duration_bias", c.reunion_duration_bias);
    return c;
}

inline json to_json(const ground_truth_log& log) {
    json moves = json::array();
    for (const synth_move& m : log.moves)
        moves.push_back(json{{"month", m.month},
                             {"movers", m.movers},
                             {"src_supervisor", m.src_supervisor},
                             {"dst_supervisor", m.dst_supervisor},
                             {"coordinated", m.coordinated},
                             {"intended_reunion", m.intended_reunion},
                             {"dst_had_former_coworker", m.dst_had_former_coworker},
                             {"eligible_reunion_destinations",
                              m.eligible_reunion_destinations}});
    return json{{"schema_version", schema_version}, {"moves", moves}};
}

inline ground_truth_log log_from_json(const json& j) {
    ground_truth_log log;
    for (const json& e : j.at("moves")) {
        synth_move m;
        m.month = e.at("month").get<month_index>();
        m.movers = e.at("movers").get<std::vector<std::string>>();
        m.src_supervisor = e.at("src_supervisor").get<std::string>();
        m.dst_supervisor = e.at("dst_supervisor").get<std::string>();
        m.coordinated = e.at("coordinated").get<bool>();
        m.intended_reunion = e.at("intended_reunion").get<bool>();
        m.dst_had_former_coworker = e.at("dst_had_former_coworker").get<bool>();
        m.eligible_reunion_destinations =
            e.at("eligible_reunion_destinations").get<std::vector<std::string>>();
        log.moves.push_back(std::move(m));
    }
    return log;
}

inline json to_json(const verify_report& r) {
    return json{{"schema_version", schema_version},
                {"ok", r.ok},
                {"log_moves", r.log_moves},
                {"library_moves", r.library_moves},
                {"matched", r.matched},
                {"unmatched_log", r.unmatched_log},
                {"unmatched_library", r.unmatched_library},
                {"flags_checked", r.flags_checked},
                {"flag_mismatches", r.flag_mismatches},
                {"notes", r.notes}};
}

// --- team history ------------------------------------------------------------

// Timelines serialized as an initial roster plus per-month membership deltas.
inline json history_to_json(const team_history& h) {
    const panel& p = h.source();
    json teams = json::array();
    for (const team_timeline& tl : h.timelines()) {
        json months = json::array();
        std::vector<person_id> prev;
        for (month_index m = tl.birth; m <= tl.death; ++m) {
            const auto& cur = tl.members_at(m);
            json entry{{"month", format_calendar_month(shift(p.origin(), m))},
                       {"supervisor", p.person_name(tl.supervisor_at(m))},
                       {"terminal", !tl.non_terminal_at(m)}};
            if (m == tl.birth) {
                json init = json::array();
                for (person_id q : cur) init.push_back(p.person_name(q));
                entry["members"] = init;
            } else {
                json added = json::array(), removed = json::array();
                for (person_id q : cur)
                    if (!std::binary_search(prev.begin(), prev.end(), q))
                        added.push_back(p.person_name(q));
                for (person_id q : prev)
                    if (!std::binary_search(cur.begin(), cur.end(), q))
                        removed.push_back(p.person_name(q));
                entry["added"] = added;
                entry["removed"] = removed;
            }
            months.push_back(std::move(entry));
            prev = cur;
        }
        json notes = json::array();
        for (death_cause c : tl.death_notes) notes.push_back(to_string(c));
        teams.push_back(json{{"label", tl.label},
                             {"birth", tl.birth},
                             {"death", tl.death},
                             {"birth_cause", to_string(tl.born)},
                             {"death_cause", to_string(tl.died)},
                             {"death_notes", std::move(notes)},
                             {"censored_start", tl.censored_start},
                             {"censored_end", tl.censored_end},
                             {"months", std::move(months)}});
    }
    return json{{"schema_version", schema_version},
                {"origin", format_calendar_month(p.origin())},
                {"month_count", h.month_count()},
                {"teams", std::move(teams)}};
}

inline std::string events_to_csv(const team_history& h) {
    const panel& p = h.source();
    std::string out = "schema_version,month,kind,from_team,to_team,movers\n";
    for (const move_event& e : h.events()) {
        std::string movers;
        for (person_id q : e.movers) {
            if (!movers.empty()) movers += '+';
            movers += p.person_name(q);
        }
        out += format_csv_row({std::to_string(schema_version),
                               format_calendar_month(shift(p.origin(), e.month_from)),
                               to_string(e.kind), std::to_string(e.from_team),
                               std::to_string(e.to_team), movers});
    }
    return out;
}

// --- links and rewired samples ----------------------------------------------

inline std::string links_to_csv(const team_history& h, const link_set& ls) {
    const panel& p = h.source();
    std::string out = "mover,src,dst,month,occ_from,occ_to,reuniting\n";
    for (const transition_link& l : ls.links) {
        out += format_csv_row(
            {p.person_name(l.mover), std::to_string(l.src), std::to_string(l.dst),
             format_calendar_month(shift(p.origin(), l.month)),
             l.occ_from == no_occupation ? "" : p.occupation_name(l.occ_from),
             l.occ_to == no_occupation ? "" : p.occupation_name(l.occ_to),
             l.reuniting ? "1" : "0"});
    }
    return out;
}

// all realizations concatenated, one row per rewired link
inline std::string realizations_to_csv(const team_history& h, const link_set& observed,
                                       const std::vector<link_set>& samples) {
    const panel& p = h.source();
    std::string out = "sample_index,mover,src,dst,month,occ_from,occ_to,reuniting\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (const transition_link& l : samples[s].links) {
            out += format_csv_row(
                {std::to_string(s), p.person_name(l.mover), std::to_string(l.src),
                 std::to_string(l.dst), format_calendar_month(shift(p.origin(), l.month)),
                 l.occ_from == no_occupation ? "" : p.occupation_name(l.occ_from),
                 l.occ_to == no_occupation ? "" : p.occupation_name(l.occ_to),
                 l.reuniting ? "1" : "0"});
        }
    }
    (void)observed;
    return out;
}

inline json rewire_metadata(null_model model, window_spec w, window_side side,
                            std::uint64_t master_seed, std::size_t n,
                            const sample_stats& stats) {
    return json{{"schema_version", schema_version},
                {"model", to_string(model)},
                {"window_center", w.t},
                {"window_dt", w.dt},
                {"side", side == window_side::before ? "before" : "after"},
                {"master_seed", master_seed},
                {"realizations", n},
                {"reshuffles", stats.reshuffles},
                {"repair_swaps", stats.repair_swaps}};
}

// --- consistency reports ------------------------------------------------------

namespace detail {

inline void summary_columns(std::string& header, const char* stem) {
    for (const char* part : {"_mean", "_sd", "_q1", "_median", "_q3", "_whisker_lo",
                             "_whisker_hi", "_min", "_max", "_defined", "_undefined"}) {
        header += ',';
        header += stem;
        header += part;
    }
}

inline void summary_values(std::vector<std::string>& row, const metric_summary& s) {
    row.push_back(format_double(s.mean));
    row.push_back(format_double(s.sd));
    row.push_back(format_double(s.q1));
    row.push_back(format_double(s.median));
    row.push_back(format_double(s.q3));
    row.push_back(format_double(s.whisker_lo));
    row.push_back(format_double(s.whisker_hi));
    row.push_back(format_double(s.min));
    row.push_back(format_double(s.max));
    row.push_back(std::to_string(s.defined));
    row.push_back(std::to_string(s.undefined));
}

}  // namespace detail

inline std::string consistency_header() {
    std::string h =
        "schema_version,window,dt,model,direction,continuing_teams,links_before,"
        "links_after,observed_reuniting,observed_reun_prop,prop_std_diff,lambda_caveat";
    detail::summary_columns(h, "z");
    detail::summary_columns(h, "z_with_delta");
    detail::summary_columns(h, "y");
    detail::summary_columns(h, "lambda");
    detail::summary_columns(h, "reun_prop");
    h += '\n';
    return h;
}

inline std::string consistency_row(const window_model_result& r) {
    std::vector<std::string> row{std::to_string(schema_version),
                                 std::to_string(r.window.t),
                                 std::to_string(r.window.dt),
                                 to_string(r.model),
                                 r.forward ? "forward" : "reverse",
                                 std::to_string(r.continuing),
                                 std::to_string(r.links_before),
                                 std::to_string(r.links_after),
                                 std::to_string(r.observed_reuniting),
                                 format_double(r.observed_reun_prop),
                                 format_double(r.prop_std_diff),
                                 r.lambda_caveat ? "1" : "0"};
    detail::summary_values(row, r.z);
    detail::summary_values(row, r.z_other);
    detail::summary_values(row, r.y);
    detail::summary_values(row, r.lambda);
    detail::summary_values(row, r.reun_prop);
    return format_csv_row(row);
}

inline json summary_to_json(const metric_summary& s) {
    return json{{"mean", s.mean},     {"sd", s.sd},
                {"q1", s.q1},         {"median", s.median},
                {"q3", s.q3},         {"whisker_lo", s.whisker_lo},
                {"whisker_hi", s.whisker_hi}, {"min", s.min},
                {"max", s.max},       {"defined", s.defined},
                {"undefined", s.undefined}};
}

// full per-realization detail; raw vectors present when they were kept
inline json consistency_to_json(const std::vector<window_model_result>& rows) {
    json out = json::array();
    for (const window_model_result& r : rows) {
        json j{{"window", r.window.t},
               {"dt", r.window.dt},
               {"model", to_string(r.model)},
               {"direction", r.forward ? "forward" : "reverse"},
               {"continuing_teams", r.continuing},
               {"links_before", r.links_before},
               {"links_after", r.links_after},
               {"observed_reuniting", r.observed_reuniting},
               {"observed_reun_prop", r.observed_reun_prop},
               {"prop_std_diff", r.prop_std_diff},
               {"lambda_caveat", r.lambda_caveat},
               {"z", summary_to_json(r.z)},
               {"z_with_delta", summary_to_json(r.z_other)},
               {"y", summary_to_json(r.y)},
               {"lambda", summary_to_json(r.lambda)},
               {"reun_prop", summary_to_json(r.reun_prop)}};
        if (!r.z_raw.empty()) {
            j["z_raw"] = r.z_raw;
            j["z_with_delta_raw"] = r.z_other_raw;
            j["y_raw"] = r.y_raw;
            j["lambda_raw"] = r.lambda_raw;
            j["reun_prop_raw"] = r.reun_prop_raw;
        }
        out.push_back(std::move(j));
    }
    return json{{"schema_version", schema_version}, {"results", std::move(out)}};
}

// --- reunion statistics --------------------------------------------------------

inline std::string binned_table_to_csv(const binned_table& t) {
    std::string out = "schema_version,lo,hi,count,share\n";
    for (const auto& b : t.bins)
        out += format_csv_row({std::to_string(schema_version), std::to_string(b.lo),
                               std::to_string(b.hi), std::to_string(b.count),
                               format_double(b.share)});
    return out;
}

inline json to_json(const logit_fit& fit, const std::vector<std::string>& names) {
    json terms = json::array();
    for (std::size_t i = 0; i < fit.terms.size(); ++i) {
        const logit_term& t = fit.terms[i];
        terms.push_back(json{{"name", i < names.size() ? names[i] : "b" + std::to_string(i)},
                             {"estimate", t.estimate},
                             {"std_error", t.std_error},
                             {"z_value", t.z_value},
                             {"p_value", t.p_value},
                             {"ci_lo", t.ci_lo},
                             {"ci_hi", t.ci_hi}});
    }
    return json{{"schema_version", schema_version},
                {"terms", std::move(terms)},
                {"converged", fit.converged},
                {"iterations", fit.iterations},
                {"log_likelihood", fit.log_likelihood},
                {"max_abs_gradient", fit.max_abs_gradient},
                {"step_trace", fit.step_trace},
                {"n", fit.n}};
}

inline std::string proportions_to_csv(const std::vector<proportion_comparison>& rows) {
    std::string out =
        "schema_version,model,direction,observed_mean_prop,model_mean_prop,mean_lambda,"
        "stouffer_z,windows_used,windows_skipped,lambda_caveat\n";
    for (const auto& c : rows)
        out += format_csv_row({std::to_string(schema_version), to_string(c.model),
                               c.forward ? "forward" : "reverse",
                               format_double(c.observed_mean_prop),
                               format_double(c.model_mean_prop), format_double(c.mean_lambda),
                               format_double(c.stouffer_z), std::to_string(c.windows_used),
                               std::to_string(c.windows_skipped), c.lambda_caveat ? "1" : "0"});
    return out;
}

// --- coverage / team stats ------------------------------------------------------

inline std::string coverage_to_csv(const std::vector<window_coverage>& rows) {
    std::string out =
        "schema_version,window,continuing_teams,other_teams,continuing_members,"
        "other_members,continuing_person_months,other_person_months\n";
    for (const auto& c : rows)
        out += format_csv_row(
            {std::to_string(schema_version), std::to_string(c.t),
             std::to_string(c.continuing_teams), std::to_string(c.other_teams),
             std::to_string(c.continuing_members), std::to_string(c.other_members),
             std::to_string(c.continuing_person_months),
             std::to_string(c.other_person_months)});
    return out;
}

inline json to_json(const team_stats_summary& s) {
    return json{{"schema_version", schema_version},
                {"teams", s.lifetimes.size()},
                {"mean_lifetime_uncensored", s.mean_lifetime_uncensored},
                {"mean_lifetime_all", s.mean_lifetime_all},
                {"mean_initial_size", s.mean_initial_size},
                {"mean_size", s.mean_size},
                {"mean_tenure", s.mean_tenure},
                {"tenure_count", s.tenures.size()}};
}

// --- manifest --------------------------------------------------------------------

inline json make_manifest(const std::string& command, const json& config,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs) {
    return json{{"schema_version", schema_version}, {"code_version", code_version},
                {"command", command},               {"config", config},
                {"inputs", inputs},                 {"outputs", outputs}};
}

}  // namespace teamflow
