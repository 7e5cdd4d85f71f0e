// Consistency metrics: frozen hand-worked z/y/lambda values, distribution
// summaries, and full-window evaluation against a hand-enumerated null
// distribution.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>

#include "helpers.hpp"
#include "teamflow/consistency.hpp"

using namespace teamflow;
using Catch::Approx;
using tf_test::link_key;
using tf_test::make_links;

namespace {

const window_spec W{10, 5};

link_set half(window_side side, const std::vector<tf_test::link_row>& rows) {
    return make_links(W, side, rows);
}

// anonymous movers: z and y ignore them
tf_test::link_row mv(team_label src, team_label dst) {
    static person_id next = 100;
    return {next++, src, dst, 10, 0, 0, false};
}

}  // namespace

TEST_CASE("z worked examples") {
    const std::vector<team_label> abc{1, 2, 3};

    SECTION("no sampled link repeats an observed one") {
        link_set before = half(window_side::before, {mv(1, 2), mv(2, 3)});
        link_set after = half(window_side::after, {mv(1, 2)});
        link_set s = half(window_side::after, {mv(1, 3)});
        CHECK(z_score(before, after, s, true, false, abc) == Approx(0.0));
    }

    SECTION("half the mass comes back") {
        // teams a and b each keep one matching link; c keeps none
        link_set before = half(window_side::before, {mv(1, 2), mv(2, 3)});
        link_set after = half(window_side::after, {mv(1, 2), mv(2, 3)});
        link_set s = half(window_side::after, {mv(1, 2), mv(2, 1)});
        CHECK(z_score(before, after, s, true, false, abc) == Approx(1.5 / 3.0));
        // reverse direction with identical halves scores the same
        CHECK(z_score(before, after, s, false, false, abc) == Approx(1.5 / 3.0));
    }

    SECTION("reproducing the observed half exactly scores one") {
        link_set before = half(window_side::before, {mv(1, 2), mv(2, 3)});
        link_set after = half(window_side::after, {mv(1, 2), mv(2, 3)});
        CHECK(z_score(before, after, after, true, false, abc) == Approx(1.0));
        link_set single = half(window_side::before, {mv(1, 2)});
        CHECK(z_score(single, single, single, true, false, {1, 2}) == Approx(1.0));
    }

    SECTION("the ratio may exceed one") {
        // the sample repeats a->b twice, the observed halves only share it once
        link_set before = half(window_side::before, {mv(1, 2), mv(1, 2)});
        link_set after = half(window_side::after, {mv(1, 2), mv(1, 3)});
        link_set s = half(window_side::after, {mv(1, 2), mv(1, 2)});
        CHECK(z_score(before, after, s, true, false, abc) == Approx(2.0));
    }

    SECTION("empty-team credit enters both sides of the ratio") {
        link_set before = half(window_side::before, {mv(1, 2), mv(2, 3)});
        link_set after = half(window_side::after, {mv(1, 2), mv(2, 3)});
        link_set s = half(window_side::after, {mv(1, 2), mv(2, 1)});
        const std::vector<team_label> abcd{1, 2, 3, 4};  // 4 is linkless
        CHECK(z_score(before, after, s, true, true, abcd) == Approx(2.5 / 4.0));
        // without the credit the silent team drops out
        CHECK(z_score(before, after, s, true, false, abcd) == Approx(0.5));
    }

    SECTION("no shared links and no credit leaves z undefined") {
        link_set before = half(window_side::before, {mv(1, 2)});
        link_set after = half(window_side::after, {mv(3, 4)});
        CHECK_THROWS_AS(z_score(before, after, after, true, false, {1, 2, 3, 4}),
                        undefined_score);
    }
}

TEST_CASE("y worked examples") {
    link_set ref = half(window_side::before, {mv(1, 2), mv(1, 2), mv(2, 3)});
    SECTION("pair overlap respects multiplicity") {
        link_set s = half(window_side::after, {mv(1, 2), mv(3, 1), mv(2, 3)});
        CHECK(y_score(ref, s) == Approx(2.0 / 3.0));
    }
    SECTION("identical pairs score one, disjoint zero") {
        link_set same = half(window_side::after, {mv(2, 3), mv(1, 2), mv(1, 2)});
        CHECK(y_score(ref, same) == Approx(1.0));
        link_set other = half(window_side::after, {mv(3, 2), mv(2, 1), mv(4, 1)});
        CHECK(y_score(ref, other) == Approx(0.0));
    }
    SECTION("an empty reference half is undefined") {
        link_set empty;
        empty.window = W;
        CHECK_THROWS_AS(y_score(empty, ref), undefined_score);
    }
}

TEST_CASE("lambda re-checks reunions against the real histories") {
    panel p = panel::parse(tf_test::load_fixture("panel_reunite.csv"));
    team_history h = build_history(p);
    co_membership_index idx(h);
    const team_label J = 0, K = 2;
    const person_id w = tf_test::pid(p, "w"), pp = tf_test::pid(p, "p"),
                    q = tf_test::pid(p, "q"), r = tf_test::pid(p, "r"),
                    l2 = tf_test::pid(p, "l2"), j1 = tf_test::pid(p, "j1");

    // four link placements that all reunite former teammates (the predicate
    // does not care whether the move really happened)
    link_set observed = make_links(W, window_side::after,
                                   {{w, K, J, 8, 0, 0, false},
                                    {pp, K, J, 8, 0, 0, false},
                                    {r, 1, J, 8, 0, 0, false},
                                    {r, 1, K, 8, 0, 0, false}});
    CHECK(semantic_reuniting_count(h, idx, observed) == 4);

    // one reunion among four sampled links
    link_set sample = make_links(W, window_side::after,
                                 {{pp, K, J, 8, 0, 0, false},
                                  {l2, 1, J, 8, 0, 0, false},
                                  {j1, J, K, 5, 0, 0, false},
                                  {q, K, J, 5, 0, 0, false}});
    CHECK(semantic_reuniting_count(h, idx, sample) == 1);
    CHECK(lambda_ratio(h, idx, observed, sample) == Approx(0.25));
    CHECK(lambda_ratio(h, idx, observed, observed) == Approx(1.0));

    // a half with no observed reunions cannot anchor the ratio
    link_set strangers = make_links(W, window_side::after, {{q, K, J, 5, 0, 0, false}});
    CHECK_THROWS_AS(lambda_ratio(h, idx, strangers, sample), undefined_ratio);
}

TEST_CASE("metric summaries") {
    SECTION("quantiles interpolate linearly") {
        metric_summary s = summarize_metric({4, 1, 3, 2});
        CHECK(s.q1 == Approx(1.75));
        CHECK(s.median == Approx(2.5));
        CHECK(s.q3 == Approx(3.25));
        CHECK(s.mean == Approx(2.5));
        CHECK(s.min == 1.0);
        CHECK(s.max == 4.0);
        CHECK(s.defined == 4);
    }
    SECTION("whiskers stop at the 1.5 IQR fences") {
        metric_summary s = summarize_metric({1, 2, 3, 4, 5, 6, 7, 8, 100}, 3);
        CHECK(s.q1 == 3.0);
        CHECK(s.median == 5.0);
        CHECK(s.q3 == 7.0);
        CHECK(s.whisker_lo == 1.0);   // everything clears the low fence of -3
        CHECK(s.whisker_hi == 8.0);   // 100 sits beyond the high fence of 13
        CHECK(s.max == 100.0);
        CHECK(s.mean == Approx(136.0 / 9.0));
        CHECK(s.undefined == 3);
    }
    SECTION("degenerate inputs") {
        metric_summary empty = summarize_metric({}, 5);
        CHECK(empty.defined == 0);
        CHECK(empty.undefined == 5);
        CHECK(std::isnan(empty.mean));
        metric_summary one = summarize_metric({7.5});
        CHECK(one.mean == 7.5);
        CHECK(one.sd == 0.0);
        CHECK(one.median == 7.5);
    }
}

TEST_CASE("sampled means match a hand-enumerated distribution") {
    // after half {1->2, 1->3, 2->3, 3->1}: six of 24 stub pairings avoid
    // self-loops, collapsing to three equally likely link multisets; against
    // before = {1->2, 2->3} they score z in {0, 1, 1} and y in {0, 1, 1}
    link_set before = half(window_side::before, {{9, 1, 2, 6, 0, 0, false},
                                                 {10, 2, 3, 6, 0, 0, false}});
    link_set after = half(window_side::after, {{1, 1, 2, 11, 0, 0, false},
                                               {2, 1, 3, 11, 0, 0, false},
                                               {3, 2, 3, 11, 0, 0, false},
                                               {4, 3, 1, 11, 0, 0, false}});
    const std::vector<team_label> teams{1, 2, 3};
    auto d = decompose(after, null_model::sp);

    const int n = 2000;
    double z_sum = 0, y_sum = 0;
    std::map<std::string, int> outcomes;
    for (int k = 0; k < n; ++k) {
        link_set s = sample_realization(d, mix_seed({555, static_cast<std::uint64_t>(k)}));
        z_sum += z_score(before, after, s, true, false, teams);
        y_sum += y_score(before, s);
        // histogram over (src,dst) multisets; movers separate two of them
        std::string key;
        for (const auto& l : s.links)
            key += std::to_string(l.src) + ">" + std::to_string(l.dst) + ";";
        outcomes[key]++;
    }
    CHECK(z_sum / n == Approx(2.0 / 3.0).margin(0.05));
    CHECK(y_sum / n == Approx(2.0 / 3.0).margin(0.05));
    // two pair-multisets: the observed one (4 of 6 pairings) and the rewired
    // one (2 of 6)
    REQUIRE(outcomes.size() == 2);
    for (const auto& [key, count] : outcomes) {
        const double expect = key == "1>2;1>3;2>3;3>1;" ? 2.0 / 3.0 : 1.0 / 3.0;
        CHECK(count == Approx(n * expect).margin(4.0 * std::sqrt(n * expect * (1 - expect))));
    }
}

TEST_CASE("evaluating a window runs every model in both directions") {
    panel p = panel::parse(tf_test::load_fixture("panel_reunite.csv"));
    team_history h = build_history(p);
    co_membership_index idx(h);

    consistency_options opt;
    opt.realizations = 200;
    opt.master_seed = 7;
    opt.keep_raw = true;
    auto results = evaluate_window(h, idx, window_spec{6, 3}, opt);
    REQUIRE(results.size() == 6);

    for (const auto& r : results) {
        CHECK(r.failure.empty());
        CHECK(r.continuing == 3);
        CHECK(r.links_before == 1);
        CHECK(r.links_after == 3);
        CHECK(r.lambda_caveat == (r.model == null_model::rsp));
        if (r.forward) {
            // the after half holds one true reunion and one return home
            CHECK(r.observed_reuniting == 2);
            CHECK(r.observed_reun_prop == Approx(2.0 / 3.0));
        } else {
            // the single before-half link joins strangers
            CHECK(r.observed_reuniting == 0);
            CHECK(r.observed_reun_prop == Approx(0.0));
            CHECK(r.lambda.defined == 0);
            CHECK(r.lambda.undefined == 200);
            // one link can only re-pair with itself, so every realization
            // reproduces the before half exactly
            REQUIRE(r.z_raw.size() == 200);
            for (double z : r.z_raw) CHECK(z == Approx(1.0));
            for (double y : r.y_raw) CHECK(y == Approx(1.0 / 3.0));
        }
        if (r.model == null_model::rsp && r.forward) {
            // reuniting flags are conserved, so lambda pins to one
            CHECK(r.lambda.mean == Approx(1.0));
            CHECK(r.lambda.sd == Approx(0.0));
        }
        CHECK(r.z.defined + r.z.undefined == 200);
        CHECK(r.y.defined == 200);
        CHECK(static_cast<std::int64_t>(r.reun_prop_raw.size()) == r.reun_prop.defined);
    }

    // determinism: the whole evaluation repeats bit for bit
    auto again = evaluate_window(h, idx, window_spec{6, 3}, opt);
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(results[i].z_raw == again[i].z_raw);
        CHECK(results[i].y_raw == again[i].y_raw);
        CHECK(results[i].lambda_raw == again[i].lambda_raw);
    }
}

TEST_CASE("a window with no moves is scored by credit alone") {
    panel p = panel::parse(tf_test::load_fixture("panel_small.csv"));
    team_history h = build_history(p);
    co_membership_index idx(h);

    consistency_options opt;
    opt.realizations = 50;
    opt.keep_raw = true;
    auto results = evaluate_window(h, idx, window_spec{1, 1}, opt);
    REQUIRE(results.size() == 6);
    for (const auto& r : results) {
        CHECK(r.failure.empty());
        CHECK(r.continuing == 2);
        CHECK(r.links_before == 0);
        CHECK(r.links_after == 0);
        // headline z (no credit) is undefined on an empty window...
        CHECK(r.z.defined == 0);
        CHECK(r.z.undefined == 50);
        // ...while the credit variant scores a clean one
        CHECK(r.z_other.defined == 50);
        CHECK(r.z_other.mean == Approx(1.0));
        CHECK(r.z_other.sd == Approx(0.0));
        CHECK(r.y.defined == 0);
        CHECK(r.lambda.defined == 0);
        CHECK(std::isnan(r.observed_reun_prop));
        CHECK(std::isnan(r.prop_std_diff));
    }
}

TEST_CASE("window centers cover the admissible range") {
    panel p = panel::parse(tf_test::load_fixture("panel_reunite.csv"));
    team_history h = build_history(p);
    auto centers = window_centers(h, 3);
    REQUIRE(centers.size() == 6);
    CHECK(centers.front().t == 3);
    CHECK(centers.back().t == 8);
    for (const auto& w : centers) CHECK(w.dt == 3);
    CHECK_THROWS_AS(window_centers(h, 6), window_too_large);
}
