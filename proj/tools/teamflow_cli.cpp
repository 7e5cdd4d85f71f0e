// Command-line front end for the team-flow pipeline.  Subcommands compose
// through files only: synth writes a panel, build-teams turns a panel into a
// team history, windows/rewire/consistency/reunite-stats/logit read the panel
// again and emit CSV/JSON artifacts plus a manifest that pins every knob, so
// any output can be reproduced from its manifest alone.

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "teamflow/teamflow.hpp"

namespace fs = std::filesystem;
namespace tf = teamflow;
using tf::json;

namespace {

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const tf::malformed_month*>(&e)) return "malformed_month";
    if (dynamic_cast<const tf::duplicate_record*>(&e)) return "duplicate_record";
    if (dynamic_cast<const tf::self_supervision*>(&e)) return "self_supervision";
    if (dynamic_cast<const tf::malformed_input*>(&e)) return "malformed_input";
    if (dynamic_cast<const tf::window_out_of_range*>(&e)) return "window_out_of_range";
    if (dynamic_cast<const tf::window_too_large*>(&e)) return "window_too_large";
    if (dynamic_cast<const tf::undefined_score*>(&e)) return "undefined_score";
    if (dynamic_cast<const tf::undefined_ratio*>(&e)) return "undefined_ratio";
    if (dynamic_cast<const tf::no_reuniting_moves*>(&e)) return "no_reuniting_moves";
    if (dynamic_cast<const tf::infeasible_no_self_loop*>(&e)) return "infeasible_no_self_loop";
    if (dynamic_cast<const tf::separation_detected*>(&e)) return "separation_detected";
    if (dynamic_cast<const tf::constant_feature*>(&e)) return "constant_feature";
    if (dynamic_cast<const tf::all_same_outcome*>(&e)) return "all_same_outcome";
    if (dynamic_cast<const tf::too_few_observations*>(&e)) return "too_few_observations";
    if (dynamic_cast<const tf::infeasible_config*>(&e)) return "infeasible_config";
    if (dynamic_cast<const tf::error*>(&e)) return "error";
    return "internal";
}

struct run_config {
    std::string input;
    std::string out = ".";
    std::string config_path;
    std::vector<int> dts{6};
    std::int64_t n = 1000;
    std::vector<std::string> models{"sp", "osp", "rsp"};
    std::vector<std::string> directions{"forward", "reverse"};
    std::uint64_t seed = 0;
    bool include_empty_teams = false;
    bool boomerang = true;
    std::string cohort = "entrants";
    std::string obs_unit = "pair";
    int window = -1;
    std::string side = "after";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool raw_json = false;
    bool verify = false;
};

// values from --config fill in everything the command line left untouched
void merge_config_file(const run_config& defaults, run_config& c, const CLI::App* cmd) {
    if (c.config_path.empty()) return;
    const json j = json::parse(tf::read_text_file(c.config_path));
    auto unset = [&](const std::string& flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    if (j.contains("input") && unset("--input")) c.input = j["input"].get<std::string>();
    if (j.contains("out") && unset("--out")) c.out = j["out"].get<std::string>();
    if (j.contains("dt") && unset("--dt")) c.dts = j["dt"].get<std::vector<int>>();
    if (j.contains("n") && unset("--n")) c.n = j["n"].get<std::int64_t>();
    if (j.contains("models") && unset("--models"))
        c.models = j["models"].get<std::vector<std::string>>();
    if (j.contains("directions") && unset("--directions"))
        c.directions = j["directions"].get<std::vector<std::string>>();
    if (j.contains("seed") && unset("--seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("include_empty_teams") && unset("--include-empty-teams"))
        c.include_empty_teams = j["include_empty_teams"].get<bool>();
    if (j.contains("boomerang") && unset("--boomerang"))
        c.boomerang = j["boomerang"].get<bool>();
    if (j.contains("cohort") && unset("--cohort")) c.cohort = j["cohort"].get<std::string>();
    if (j.contains("obs_unit") && unset("--obs-unit"))
        c.obs_unit = j["obs_unit"].get<std::string>();
    if (j.contains("window") && unset("--window")) c.window = j["window"].get<int>();
    if (j.contains("side") && unset("--side")) c.side = j["side"].get<std::string>();
    if (j.contains("threads") && unset("--threads"))
        c.threads = j["threads"].get<unsigned>();
    if (j.contains("raw_json") && unset("--raw-json"))
        c.raw_json = j["raw_json"].get<bool>();
    (void)defaults;
}

json config_json(const run_config& c) {
    return json{{"input", c.input},
                {"out", c.out},
                {"dt", c.dts},
                {"n", c.n},
                {"models", c.models},
                {"directions", c.directions},
                {"seed", c.seed},
                {"include_empty_teams", c.include_empty_teams},
                {"boomerang", c.boomerang},
                {"cohort", c.cohort},
                {"obs_unit", c.obs_unit},
                {"window", c.window},
                {"side", c.side},
                {"raw_json", c.raw_json}};
}

void write_file(const fs::path& dir, const std::string& name, const std::string& text,
                std::vector<std::string>& outputs) {
    tf::write_text_file((dir / name).string(), text);
    outputs.push_back(name);
}

void write_json(const fs::path& dir, const std::string& name, const json& j,
                std::vector<std::string>& outputs) {
    write_file(dir, name, j.dump(2) + "\n", outputs);
}

void finish(const fs::path& dir, const std::string& command, const run_config& c,
            std::vector<std::string>& outputs) {
    std::vector<std::string> inputs;
    if (!c.input.empty()) inputs.push_back(c.input);
    if (!c.config_path.empty()) inputs.push_back(c.config_path);
    outputs.push_back("manifest.json");
    tf::write_text_file((dir / "manifest.json").string(),
                        tf::make_manifest(command, config_json(c), inputs, outputs).dump(2) +
                            "\n");
}

std::vector<tf::null_model> parse_models(const std::vector<std::string>& names) {
    std::vector<tf::null_model> out;
    for (const std::string& s : names) out.push_back(tf::parse_null_model(s));
    return out;
}

tf::team_history load_history(const std::string& input) {
    auto p = std::make_shared<tf::panel>(tf::panel::parse(tf::read_text_file(input)));
    return tf::build_history(std::move(p));
}

// fixed-size pool over [0, n); any worker exception is rethrown after join
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n ? n : 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < n;) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n);
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --- subcommands -----------------------------------------------------------

void cmd_synth(const run_config& c) {
    tf::synth_config sc;
    if (!c.config_path.empty())
        sc = tf::synth_config_from_json(json::parse(tf::read_text_file(c.config_path)));
    if (c.seed != 0) sc.seed = c.seed;
    const tf::synth_result r = tf::generate(sc);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir, "panel.csv", r.panel_csv, outputs);
    write_json(dir, "ground_truth.json", tf::to_json(r.log), outputs);
    if (c.verify) {
        auto p = std::make_shared<tf::panel>(tf::panel::parse(r.panel_csv));
        const tf::team_history h = tf::build_history(std::move(p));
        write_json(dir, "verify.json", tf::to_json(tf::verify_log(h, r.log)), outputs);
    }
    run_config eff = c;
    eff.seed = sc.seed;
    std::vector<std::string> inputs;
    if (!c.config_path.empty()) inputs.push_back(c.config_path);
    outputs.push_back("manifest.json");
    json manifest = tf::make_manifest("synth", tf::to_json(sc), inputs, outputs);
    tf::write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

void cmd_ingest(const run_config& c) {
    const tf::panel p = tf::panel::parse(tf::read_text_file(c.input));
    const tf::panel_summary s = tf::summarize(p);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir, "panel.csv", p.serialize(), outputs);
    write_json(dir, "panel_summary.json",
               json{{"schema_version", tf::schema_version},
                    {"months", s.months},
                    {"employees", s.employees},
                    {"supervisors", s.supervisors},
                    {"records", s.records},
                    {"entries", s.entries},
                    {"exits", s.exits},
                    {"headcount", s.headcount}},
               outputs);
    run_config eff = c;
    finish(dir, "ingest", eff, outputs);
}

void cmd_build_teams(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_json(dir, "team_history.json", tf::history_to_json(h), outputs);
    write_file(dir, "move_events.csv", tf::events_to_csv(h), outputs);
    write_json(dir, "team_stats.json", tf::to_json(tf::team_stats(h)), outputs);
    run_config eff = c;
    finish(dir, "build-teams", eff, outputs);
}

void cmd_windows(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (int dt : c.dts) {
        const auto cov = tf::coverage_stats(h, dt);
        write_file(dir, "coverage_dt" + std::to_string(dt) + ".csv", tf::coverage_to_csv(cov),
                   outputs);
    }
    if (c.window >= 0) {
        const tf::co_membership_index idx(h);
        tf::window_config wcfg;
        wcfg.boomerang_counts = c.boomerang;
        const tf::window_spec w{c.window, c.dts.front()};
        write_file(dir, "links_before.csv",
                   tf::links_to_csv(h, tf::extract_links(h, idx, w, tf::window_side::before,
                                                         wcfg)),
                   outputs);
        write_file(dir, "links_after.csv",
                   tf::links_to_csv(h, tf::extract_links(h, idx, w, tf::window_side::after,
                                                         wcfg)),
                   outputs);
    }
    run_config eff = c;
    finish(dir, "windows", eff, outputs);
}

void cmd_rewire(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const tf::co_membership_index idx(h);
    tf::window_config wcfg;
    wcfg.boomerang_counts = c.boomerang;
    const tf::window_spec w{c.window, c.dts.front()};
    const tf::window_side side =
        c.side == "before" ? tf::window_side::before : tf::window_side::after;
    const tf::link_set observed = tf::extract_links(h, idx, w, side, wcfg);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir, "links_observed.csv", tf::links_to_csv(h, observed), outputs);
    for (tf::null_model model : parse_models(c.models)) {
        const auto decomp = tf::decompose(observed, model);
        tf::sample_stats stats;
        std::vector<tf::link_set> samples;
        samples.reserve(static_cast<std::size_t>(c.n));
        for (std::int64_t k = 0; k < c.n; ++k)
            samples.push_back(tf::sample_realization(
                decomp, tf::realization_seed(c.seed, model, w, side, k), &stats));
        const std::string tag = tf::to_string(model);
        write_file(dir, "realizations_" + tag + ".csv",
                   tf::realizations_to_csv(h, observed, samples), outputs);
        write_json(dir, "realizations_" + tag + ".json",
                   tf::rewire_metadata(model, w, side, c.seed,
                                       static_cast<std::size_t>(c.n), stats),
                   outputs);
    }
    run_config eff = c;
    finish(dir, "rewire", eff, outputs);
}

void cmd_consistency(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const tf::co_membership_index idx(h);

    tf::consistency_options opt;
    opt.models = parse_models(c.models);
    opt.run_forward = false;
    opt.run_reverse = false;
    for (const std::string& d : c.directions) {
        if (d == "forward") opt.run_forward = true;
        else if (d == "reverse") opt.run_reverse = true;
        else throw tf::malformed_input("unknown direction: " + d);
    }
    opt.realizations = c.n;
    opt.master_seed = c.seed;
    opt.include_empty_teams = c.include_empty_teams;
    opt.keep_raw = c.raw_json;
    opt.wcfg.boomerang_counts = c.boomerang;

    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (int dt : c.dts) {
        const auto centers = tf::window_centers(h, dt);
        std::vector<std::vector<tf::window_model_result>> per_window(centers.size());
        parallel_for(centers.size(), c.threads, [&](std::size_t k) {
            per_window[k] = tf::evaluate_window(h, idx, centers[k], opt);
        });

        std::vector<tf::window_model_result> rows;
        for (auto& chunk : per_window)
            for (auto& r : chunk) rows.push_back(std::move(r));

        std::string csv = tf::consistency_header();
        for (const auto& r : rows) csv += tf::consistency_row(r);
        const std::string suffix = "_dt" + std::to_string(dt);
        write_file(dir, "consistency" + suffix + ".csv", csv, outputs);
        write_json(dir, "consistency" + suffix + ".json", tf::consistency_to_json(rows),
                   outputs);

        std::vector<tf::proportion_comparison> comps;
        for (tf::null_model model : opt.models)
            for (bool fwd : {true, false}) {
                if ((fwd && !opt.run_forward) || (!fwd && !opt.run_reverse)) continue;
                std::vector<tf::window_model_result> group;
                for (const auto& r : rows)
                    if (r.model == model && r.forward == fwd) group.push_back(r);
                if (!group.empty()) comps.push_back(tf::compare_proportions(group));
            }
        write_file(dir, "proportions" + suffix + ".csv", tf::proportions_to_csv(comps),
                   outputs);
    }
    run_config eff = c;
    finish(dir, "consistency", eff, outputs);
}

void cmd_reunite_stats(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const tf::co_membership_index idx(h);
    tf::window_config wcfg;
    wcfg.boomerang_counts = c.boomerang;
    const int dt = c.dts.front();

    const auto cohort = tf::cohort_filter(h, dt, c.cohort == "entrants");
    if (cohort.empty())  // an empty list would mean "everyone" downstream
        throw tf::no_reuniting_moves(
            "cohort is empty; on a fixed workforce pass --cohort all");
    const auto moves = tf::reuniting_moves(h, idx, cohort, wcfg);
    const auto [reun, total] = tf::overall_reuniting(h, idx, wcfg);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir, "p_of_s.csv", tf::binned_table_to_csv(tf::p_of_s(moves)), outputs);
    write_file(dir, "p_of_sigma.csv", tf::binned_table_to_csv(tf::p_of_sigma(moves)),
               outputs);
    write_json(dir, "reunion_summary.json",
               json{{"schema_version", tf::schema_version},
                    {"cohort_size", cohort.size()},
                    {"cohort_reuniting_moves", moves.size()},
                    {"uncoordinated_moves", total},
                    {"reuniting_moves", reun},
                    {"reuniting_fraction",
                     total ? static_cast<double>(reun) / static_cast<double>(total) : 0.0}},
               outputs);
    run_config eff = c;
    finish(dir, "reunite-stats", eff, outputs);
}

void cmd_logit(const run_config& c) {
    const tf::team_history h = load_history(c.input);
    const tf::co_membership_index idx(h);
    tf::window_config wcfg;
    wcfg.boomerang_counts = c.boomerang;
    const int dt = c.dts.front();
    const auto unit = c.obs_unit == "move" ? tf::observation_unit::move
                                           : tf::observation_unit::pair;

    const auto cohort = tf::cohort_filter(h, dt, c.cohort == "entrants");
    if (cohort.empty())  // an empty list would mean "everyone" downstream
        throw tf::no_reuniting_moves(
            "cohort is empty; on a fixed workforce pass --cohort all");
    const auto obs = tf::build_observations(h, idx, cohort, unit, wcfg);
    const tf::logit_fit fit = tf::fit_reunion_regression(obs);

    json report = tf::to_json(fit, {"intercept", "min_shared_size", "last_overlap"});
    report["observations"] = obs.size();
    report["observation_unit"] = c.obs_unit;
    report["odds_factor_per_10_members"] = tf::odds_factor(fit, 1, 10.0);
    report["odds_factor_per_12_months"] = tf::odds_factor(fit, 2, 12.0);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_json(dir, "logit.json", report, outputs);
    run_config eff = c;
    finish(dir, "logit", eff, outputs);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"team flow analysis pipeline"};
    app.require_subcommand(1);

    run_config c;
    const run_config defaults = c;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        // required inputs are validated after the config merge, not by the
        // parser, so a --config file can supply them on reruns
        (void)needs_input;
        cmd->add_option("--input", c.input, "input panel CSV");
        cmd->add_option("--out", c.out, "output directory");
        cmd->add_option("--config", c.config_path, "JSON config file with defaults");
        cmd->add_option("--dt", c.dts, "window half-widths in months");
        cmd->add_option("--n", c.n, "realizations per window and model");
        cmd->add_option("--models", c.models, "null models: sp osp rsp");
        cmd->add_option("--directions", c.directions, "forward and/or reverse");
        cmd->add_option("--seed", c.seed, "master seed");
        cmd->add_flag("--include-empty-teams,!--no-include-empty-teams",
                      c.include_empty_teams, "empty-team credit in the headline score");
        cmd->add_flag("--boomerang,!--no-boomerang", c.boomerang,
                      "returning to one's own former team counts as reuniting");
        cmd->add_option("--cohort", c.cohort,
                        "movers considered: entrants (hired after the first month) or all")
            ->check(CLI::IsMember({"entrants", "all"}));
        cmd->add_option("--obs-unit", c.obs_unit, "regression rows: pair or move")
            ->check(CLI::IsMember({"pair", "move"}));
        cmd->add_option("--window", c.window, "window center month index");
        cmd->add_option("--side", c.side, "window half to rewire")
            ->check(CLI::IsMember({"before", "after"}));
        cmd->add_option("--threads", c.threads, "worker threads");
        cmd->add_flag("--raw-json", c.raw_json, "keep per-realization values in JSON");
        return cmd;
    };

    auto* synth = add_common(app.add_subcommand("synth", "generate a synthetic panel"), false);
    synth->add_flag("--verify", c.verify, "closed-loop check against the builder");
    auto* ingest = add_common(app.add_subcommand("ingest", "validate and canonicalize a panel"), true);
    auto* build = add_common(app.add_subcommand("build-teams", "reconstruct team timelines"), true);
    auto* windows = add_common(app.add_subcommand("windows", "window coverage and links"), true);
    auto* rewire = add_common(app.add_subcommand("rewire", "resample one window half"), true);
    auto* consistency =
        add_common(app.add_subcommand("consistency", "score models across windows"), true);
    auto* reunite =
        add_common(app.add_subcommand("reunite-stats", "reunion tables and rates"), true);
    auto* logit = add_common(app.add_subcommand("logit", "reunion odds regression"), true);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (cmd != synth) merge_config_file(defaults, c, cmd);  // synth --config is the generator's
        if (cmd != synth && c.input.empty())
            throw tf::malformed_input("--input is required (flag or config file)");
        if (cmd == rewire && c.window < 0)
            throw tf::window_out_of_range("--window is required (flag or config file)");
        if (cmd == synth) cmd_synth(c);
        else if (cmd == ingest) cmd_ingest(c);
        else if (cmd == build) cmd_build_teams(c);
        else if (cmd == windows) cmd_windows(c);
        else if (cmd == rewire) cmd_rewire(c);
        else if (cmd == consistency) cmd_consistency(c);
        else if (cmd == reunite) cmd_reunite_stats(c);
        else if (cmd == logit) cmd_logit(c);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
