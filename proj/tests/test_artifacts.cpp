// Artifact formats: JSON round-trips, delta-encoded histories, and the CSV
// layouts downstream plotting reads.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "teamflow/io_artifacts.hpp"

using namespace teamflow;
using Catch::Approx;

TEST_CASE("synth config survives a json round-trip") {
    synth_config c;
    c.months = 77;
    c.n_teams = 13;
    c.team_size_mean = 6.5;
    c.monthly_move_rate = 0.11;
    c.coordinated_move_rate = 0.009;
    c.reunion_propensity = 0.42;
    c.occupation_count = 4;
    c.occupation_switch_prob = 0.3;
    c.seed = 987654321;
    c.reunion_size_bias = true;
    c.reunion_duration_bias = true;

    const json j = json::parse(to_json(c).dump());
    const synth_config back = synth_config_from_json(j);
    CHECK(back.months == c.months);
    CHECK(back.n_teams == c.n_teams);
    CHECK(back.team_size_mean == c.team_size_mean);
    CHECK(back.monthly_move_rate == c.monthly_move_rate);
    CHECK(back.coordinated_move_rate == c.coordinated_move_rate);
    CHECK(back.reunion_propensity == c.reunion_propensity);
    CHECK(back.occupation_count == c.occupation_count);
    CHECK(back.occupation_switch_prob == c.occupation_switch_prob);
    CHECK(back.seed == c.seed);
    CHECK(back.reunion_size_bias);
    CHECK(back.reunion_duration_bias);

    // missing keys fall back to defaults
    const synth_config defaults = synth_config_from_json(json::object());
    CHECK(defaults.months == synth_config{}.months);
    CHECK(defaults.seed == synth_config{}.seed);
}

TEST_CASE("ground-truth logs survive a json round-trip") {
    synth_config cfg;
    cfg.months = 30;
    cfg.n_teams = 6;
    cfg.team_size_mean = 5.0;
    cfg.monthly_move_rate = 0.12;
    cfg.coordinated_move_rate = 0.03;
    cfg.seed = 4;
    synth_result res = generate(cfg);
    REQUIRE(!res.log.moves.empty());

    const json j = json::parse(to_json(res.log).dump());
    CHECK(j.at("schema_version") == schema_version);
    const ground_truth_log back = log_from_json(j);
    REQUIRE(back.moves.size() == res.log.moves.size());
    for (std::size_t i = 0; i < back.moves.size(); ++i) {
        const synth_move& a = res.log.moves[i];
        const synth_move& b = back.moves[i];
        CHECK(a.month == b.month);
        CHECK(a.movers == b.movers);
        CHECK(a.src_supervisor == b.src_supervisor);
        CHECK(a.dst_supervisor == b.dst_supervisor);
        CHECK(a.coordinated == b.coordinated);
        CHECK(a.intended_reunion == b.intended_reunion);
        CHECK(a.dst_had_former_coworker == b.dst_had_former_coworker);
        CHECK(a.eligible_reunion_destinations == b.eligible_reunion_destinations);
    }
}

TEST_CASE("delta-encoded histories reconstruct every roster") {
    panel p = panel::parse(tf_test::load_fixture("panel_golden.csv"));
    team_history h = build_history(p);
    const json j = history_to_json(h);
    CHECK(j.at("origin") == "2015-01");
    CHECK(j.at("month_count") == 12);
    REQUIRE(j.at("teams").size() == h.timelines().size());

    for (const json& team : j.at("teams")) {
        const team_timeline& tl = h.timeline(team.at("label").get<team_label>());
        CHECK(team.at("birth").get<month_index>() == tl.birth);
        CHECK(team.at("death").get<month_index>() == tl.death);
        CHECK(team.at("birth_cause").get<std::string>() == to_string(tl.born));
        CHECK(team.at("death_cause").get<std::string>() == to_string(tl.died));
        CHECK(team.at("censored_start").get<bool>() == tl.censored_start);
        CHECK(team.at("censored_end").get<bool>() == tl.censored_end);
        REQUIRE(team.at("months").size() ==
                static_cast<std::size_t>(tl.death - tl.birth + 1));

        std::set<std::string> roster;
        month_index m = tl.birth;
        for (const json& entry : team.at("months")) {
            CHECK(entry.at("month").get<std::string>() ==
                  format_calendar_month(shift(p.origin(), m)));
            if (m == tl.birth) {
                for (const json& q : entry.at("members")) roster.insert(q.get<std::string>());
            } else {
                for (const json& q : entry.at("added")) roster.insert(q.get<std::string>());
                for (const json& q : entry.at("removed")) roster.erase(q.get<std::string>());
            }
            std::set<std::string> expect;
            for (person_id q : tl.members_at(m)) expect.insert(p.person_name(q));
            CHECK(roster == expect);
            CHECK(entry.at("supervisor").get<std::string>() ==
                  p.person_name(tl.supervisor_at(m)));
            CHECK(entry.at("terminal").get<bool>() == !tl.non_terminal_at(m));
            ++m;
        }
    }
}

TEST_CASE("the event table lists one row per move") {
    panel p = panel::parse(tf_test::load_fixture("panel_golden.csv"));
    team_history h = build_history(p);
    const auto rows = parse_csv(events_to_csv(h));
    REQUIRE(rows.size() == 1 + h.events().size());
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == csv_row{"schema_version", "month", "kind", "from_team", "to_team",
                             "movers"});
    // first move of the fixture: b1 leaves team 2 for team 3 in 2015-03
    CHECK(rows[1] == csv_row{"1", "2015-03", "uncoordinated", "2", "3", "b1"});
    // the coordinated pair travels as one row, ids joined in order
    bool saw_pair = false;
    for (const auto& r : rows)
        if (r.size() == 6 && r[2] == "coordinated") {
            CHECK(r[1] == "2015-06");
            CHECK(r[5] == "c1+c2");
            saw_pair = true;
        }
    CHECK(saw_pair);
}

TEST_CASE("link and realization tables") {
    panel p = panel::parse(tf_test::load_fixture("panel_reunite.csv"));
    team_history h = build_history(p);
    co_membership_index idx(h);
    const window_spec w{6, 3};
    const link_set after = extract_links(h, idx, w, window_side::after);
    const auto rows = parse_csv(links_to_csv(h, after));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == csv_row{"mover", "src", "dst", "month", "occ_from", "occ_to",
                             "reuniting"});
    CHECK(rows[1] == csv_row{"r", "2", "1", "2017-07", "ops", "ops", "0"});
    CHECK(rows[2] == csv_row{"r", "1", "2", "2017-09", "ops", "ops", "1"});
    CHECK(rows[3] == csv_row{"p", "2", "0", "2017-09", "ops", "ops", "1"});

    const link_set before = extract_links(h, idx, w, window_side::before);
    auto d = decompose(before, null_model::sp);
    std::vector<link_set> samples{sample_realization(d, 1), sample_realization(d, 2)};
    const auto reals = parse_csv(realizations_to_csv(h, before, samples));
    REQUIRE(reals.size() == 3);
    CHECK(reals[1][0] == "0");
    CHECK(reals[2][0] == "1");
    CHECK(reals[1][1] == "q");
    CHECK(reals[1][4] == "2017-06");

    const json meta = rewire_metadata(null_model::osp, w, window_side::after, 42, 2,
                                      sample_stats{});
    CHECK(meta.at("model") == "OSP");
    CHECK(meta.at("window_center") == 6);
    CHECK(meta.at("side") == "after");
    CHECK(meta.at("realizations") == 2);
}

TEST_CASE("consistency tables carry every summary column") {
    panel p = panel::parse(tf_test::load_fixture("panel_reunite.csv"));
    team_history h = build_history(p);
    co_membership_index idx(h);
    consistency_options opt;
    opt.realizations = 40;
    opt.keep_raw = true;
    const auto results = evaluate_window(h, idx, window_spec{6, 3}, opt);

    const std::string header = consistency_header();
    const auto head_fields = parse_csv(header).at(0);
    REQUIRE(head_fields.size() == 12 + 5 * 11);
    CHECK(head_fields[0] == "schema_version");
    CHECK(head_fields[12] == "z_mean");
    CHECK(head_fields[23] == "z_with_delta_mean");
    CHECK(head_fields[34] == "y_mean");
    CHECK(head_fields[45] == "lambda_mean");
    CHECK(head_fields[56] == "reun_prop_mean");

    std::string table = header;
    for (const auto& r : results) table += consistency_row(r);
    const auto rows = parse_csv(table);
    REQUIRE(rows.size() == 7);
    for (std::size_t i = 1; i < rows.size(); ++i) REQUIRE(rows[i].size() == head_fields.size());
    CHECK(rows[1][1] == "6");
    CHECK(rows[1][2] == "3");
    CHECK(rows[1][3] == "SP");
    CHECK(rows[1][4] == "forward");
    CHECK(rows[1][5] == "3");   // continuing teams
    CHECK(rows[1][6] == "1");   // links before
    CHECK(rows[1][7] == "3");   // links after
    CHECK(rows[1][8] == "2");   // observed reunions on the replaced half
    CHECK(rows[5][3] == "RSP");
    CHECK(rows[5][11] == "1");  // lambda caveat

    const json j = consistency_to_json(results);
    REQUIRE(j.at("results").size() == 6);
    CHECK(j.at("results")[0].contains("z_raw"));
    CHECK(j.at("results")[0].at("z_raw").size() == 40);

    consistency_options no_raw = opt;
    no_raw.keep_raw = false;
    const auto lean = evaluate_window(h, idx, window_spec{6, 3}, no_raw);
    CHECK_FALSE(consistency_to_json(lean).at("results")[0].contains("z_raw"));
}

TEST_CASE("reunion tables and fits serialize") {
    std::vector<reuniting_move> moves;
    for (int s : {3, 3, 7, 11}) {
        reuniting_move m;
        m.last_shared_size = s;
        m.overlap_months = 6;
        moves.push_back(m);
    }
    const auto rows = parse_csv(binned_table_to_csv(p_of_s(moves)));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == csv_row{"schema_version", "lo", "hi", "count", "share"});
    CHECK(rows[1] == csv_row{"1", "2", "5", "2", "0.5"});
    CHECK(rows[2] == csv_row{"1", "6", "9", "1", "0.25"});

    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        x.push_back({static_cast<double>(i % 7)});
        y.push_back(i % 3 == 0 ? 1 : 0);
    }
    const json fit = to_json(fit_logistic(x, y), {"intercept", "s"});
    REQUIRE(fit.at("terms").size() == 2);
    CHECK(fit.at("terms")[0].at("name") == "intercept");
    CHECK(fit.at("terms")[1].at("name") == "s");
    CHECK(fit.at("converged").get<bool>());

    proportion_comparison c;
    c.model = null_model::osp;
    c.forward = false;
    c.windows_used = 5;
    const auto prop_rows = parse_csv(proportions_to_csv({c}));
    REQUIRE(prop_rows.size() == 2);
    CHECK(prop_rows[1][1] == "OSP");
    CHECK(prop_rows[1][2] == "reverse");
    CHECK(prop_rows[1][7] == "5");
}

TEST_CASE("coverage and team-stat summaries serialize") {
    panel p = panel::parse(tf_test::load_fixture("panel_golden.csv"));
    team_history h = build_history(p);

    const auto rows = parse_csv(coverage_to_csv(coverage_stats(h, 2)));
    REQUIRE(rows.size() == 9);  // 8 admissible centers
    CHECK(rows[1] == csv_row{"1", "2", "5", "0", "20", "0", "80", "0"});

    const json s = to_json(team_stats(h));
    CHECK(s.at("teams") == 8);
    CHECK(s.at("mean_lifetime_all").get<double>() == Approx(55.0 / 8.0));
    CHECK(s.at("mean_size").get<double>() == Approx(251.0 / 63.0));
    CHECK(s.at("mean_tenure").get<double>() == Approx(251.0 / 35.0));
    CHECK(s.at("tenure_count") == 35);
    CHECK(std::isnan(s.at("mean_lifetime_uncensored").get<double>()));
}

TEST_CASE("manifests record how to reproduce a run") {
    const json config{{"seed", 7}, {"months", 12}};
    const json m = make_manifest("synth", config, {"in.csv"}, {"out.csv", "log.json"});
    CHECK(m.at("schema_version") == schema_version);
    CHECK(m.at("code_version") == code_version);
    CHECK(m.at("command") == "synth");
    CHECK(m.at("config").at("seed") == 7);
    CHECK(m.at("inputs") == json::array({"in.csv"}));
    CHECK(m.at("outputs").size() == 2);
}
