// Panel ingestion: canonicalization, indexes, month grouping, summary counts,
// and the rejection of malformed input.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "teamflow/errors.hpp"
#include "teamflow/panel.hpp"

using namespace teamflow;
using tf_test::panel_header;
using tf_test::pid;
using tf_test::row;

TEST_CASE("minimal two-row panel parses") {
    std::string csv = panel_header();
    row(csv, "e1", "2020-05", "boss", "eng");
    row(csv, "e1", "2020-06", "boss", "eng");
    panel p = panel::parse(csv);
    CHECK(p.month_count() == 2);
    CHECK(p.origin() == calendar_month{2020, 5});
    CHECK(p.records().size() == 2);
    auto s = summarize(p);
    CHECK(s.months == 2);
    CHECK(s.employees == 1);
    CHECK(s.supervisors == 1);
    CHECK(s.records == 2);
}

TEST_CASE("single record panel summarizes to ones") {
    std::string csv = panel_header();
    row(csv, "solo", "1999-12", "chief", "ops");
    auto s = summarize(panel::parse(csv));
    CHECK(s.months == 1);
    CHECK(s.employees == 1);
    CHECK(s.records == 1);
    CHECK(s.headcount == std::vector<std::int64_t>{1});
}

TEST_CASE("small fixture groups by supervisor as written") {
    panel p = panel::parse(tf_test::load_fixture("panel_small.csv"));
    CHECK(p.month_count() == 3);
    CHECK(p.origin() == calendar_month{2015, 1});

    // month 1 (2015-02): s1 over {a1, a2}, s2 over {b1, b2}
    const auto& groups = p.groups_at(1);
    REQUIRE(groups.size() == 2);
    std::map<std::string, std::vector<std::string>> named;
    for (const auto& g : groups) {
        std::vector<std::string> reports;
        for (person_id q : g.reports) reports.push_back(p.person_name(q));
        named[p.person_name(g.supervisor)] = reports;
    }
    CHECK(named["s1"] == std::vector<std::string>{"a1", "a2"});
    CHECK(named["s2"] == std::vector<std::string>{"b1", "b2"});

    auto s = summarize(p);
    CHECK(s.months == 3);
    CHECK(s.employees == 4);
    CHECK(s.supervisors == 2);
    CHECK(s.records == 12);
    CHECK(s.entries == 0);
    CHECK(s.exits == 0);
    CHECK(s.headcount == std::vector<std::int64_t>{4, 4, 4});

    // a1's occupation flips to ops from month 1 on
    CHECK(p.occupation_name(p.record(pid(p, "a1"), 0)->occupation) == "eng");
    CHECK(p.occupation_name(p.record(pid(p, "a1"), 1)->occupation) == "ops");
}

TEST_CASE("row order does not matter") {
    const std::string text = tf_test::load_fixture("panel_small.csv");
    auto rows = parse_csv(text);
    std::vector<csv_row> body(rows.begin() + 1, rows.end());
    std::mt19937 g(12345);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(body.begin(), body.end(), g);
        std::string shuffled = format_csv_row(rows.front());
        for (const auto& r : body) shuffled += format_csv_row(r);
        CHECK(panel::parse(shuffled).serialize() == panel::parse(text).serialize());
    }
}

TEST_CASE("serialize then parse is the identity") {
    panel p = panel::parse(tf_test::load_fixture("panel_small.csv"));
    const std::string canon = p.serialize();
    CHECK(panel::parse(canon).serialize() == canon);
}

TEST_CASE("record lookups agree with the raw rows") {
    panel p = panel::parse(tf_test::load_fixture("panel_small.csv"));
    const person_id a1 = pid(p, "a1"), s1 = pid(p, "s1");

    CHECK(p.has_record(a1, 0));
    CHECK_FALSE(p.has_record(s1, 0));  // supervisors have no own rows here
    CHECK(p.supervises(s1, 0));
    CHECK_FALSE(p.supervises(a1, 0));
    CHECK(p.employed(s1, 2));
    CHECK(p.record(a1, 1)->supervisor == s1);
    CHECK(p.record(s1, 1) == nullptr);

    auto [b, e] = p.records_at(2);
    CHECK(e - b == 4);
    for (const auto* r = b; r != e; ++r) CHECK(r->month == 2);
}

TEST_CASE("malformed panels are rejected with typed errors") {
    CHECK_THROWS_AS(panel::parse(""), malformed_input);
    CHECK_THROWS_AS(panel::parse(panel_header()), malformed_input);  // header only
    CHECK_THROWS_AS(panel::parse("employee_id,month,supervisor_id\nx,2015-01,y\n"),
                    malformed_input);  // missing occupation column

    std::string self = panel_header();
    row(self, "x", "2015-01", "x", "eng");
    CHECK_THROWS_AS(panel::parse(self), self_supervision);

    std::string dup = panel_header();
    row(dup, "x", "2015-01", "y", "eng");
    row(dup, "x", "2015-01", "y", "eng");
    CHECK_THROWS_AS(panel::parse(dup), duplicate_record);

    std::string gap = panel_header();
    row(gap, "x", "2015-01", "y", "eng");
    row(gap, "x", "2015-03", "y", "eng");  // nothing in 2015-02
    CHECK_THROWS_AS(panel::parse(gap), malformed_month);

    std::string badmonth = panel_header();
    row(badmonth, "x", "2015-13", "y", "eng");
    CHECK_THROWS_AS(panel::parse(badmonth), malformed_month);

    std::string nosup = panel_header();
    row(nosup, "x", "2015-01", "", "eng");
    CHECK_THROWS_AS(panel::parse(nosup), malformed_input);

    std::string noemp = panel_header();
    row(noemp, "", "2015-01", "y", "eng");
    CHECK_THROWS_AS(panel::parse(noemp), malformed_input);
}

TEST_CASE("entries and exits count record boundaries") {
    std::string csv = panel_header();
    row(csv, "stay", "2015-01", "boss", "eng");
    row(csv, "stay", "2015-02", "boss", "eng");
    row(csv, "stay", "2015-03", "boss", "eng");
    row(csv, "late", "2015-02", "boss", "eng");
    row(csv, "late", "2015-03", "boss", "eng");
    row(csv, "gone", "2015-01", "boss", "eng");
    auto s = summarize(panel::parse(csv));
    CHECK(s.entries == 1);  // late appears at month 1
    CHECK(s.exits == 1);    // gone disappears after month 0
    CHECK(s.headcount == std::vector<std::int64_t>{2, 2, 2});
}
