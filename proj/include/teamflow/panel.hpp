#pragma once

// Monthly personnel panel: one record per (employee, month) naming the
// employee's supervisor and occupation.  Parsing is strict — duplicate
// records, malformed or gapped months, missing supervisors and
// self-supervision are all hard errors — because every downstream structure
// is derived from this table.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "teamflow/csv.hpp"
#include "teamflow/errors.hpp"
#include "teamflow/month.hpp"

namespace teamflow {

using person_id = std::uint32_t;  // index into panel::people()
using occ_id = std::uint32_t;     // index into panel::occupations()

struct personnel_record {
    person_id employee = 0;
    month_index month = 0;  // zero-based, contiguous across the panel
    person_id supervisor = 0;
    occ_id occupation = 0;
    std::string pay_grade;  // opaque, carried through but never interpreted
};

// all direct reports of one supervisor in one month
struct raw_group {
    person_id supervisor = 0;
    std::vector<person_id> reports;  // sorted, never contains the supervisor
};

class panel {
  public:
    // Parse a CSV document with header columns employee_id, month,
    // supervisor_id, occupation and optionally pay_grade (extra columns are
    // ignored).  Row order is irrelevant: records are canonicalized to
    // (month, employee id) order before interning, so equal content yields
    // an identical panel object.
    static panel parse(const std::string& csv_text) {
        auto rows = parse_csv(csv_text);
        if (rows.empty()) throw malformed_input("empty panel file");
        const csv_row& header = rows.front();
        auto col = [&](const std::string& name) -> int {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i] == name) return static_cast<int>(i);
            return -1;
        };
        const int c_emp = col("employee_id");
        const int c_month = col("month");
        const int c_sup = col("supervisor_id");
        const int c_occ = col("occupation");
        const int c_pay = col("pay_grade");
        if (c_emp < 0 || c_month < 0 || c_sup < 0 || c_occ < 0)
            throw malformed_input(
                "panel header must contain employee_id, month, supervisor_id, occupation");

        struct staged {
            std::string employee, supervisor, occupation, pay;
            calendar_month cal;
        };
        std::vector<staged> stage;
        stage.reserve(rows.size() - 1);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const csv_row& row = rows[r];
            auto field = [&](int c) -> std::string {
                return (c >= 0 && static_cast<std::size_t>(c) < row.size())
                           ? row[static_cast<std::size_t>(c)]
                           : std::string();
            };
            staged s;
            s.employee = field(c_emp);
            s.supervisor = field(c_sup);
            s.occupation = field(c_occ);
            s.pay = field(c_pay);
            if (s.employee.empty())
                throw malformed_input("row " + std::to_string(r + 1) + ": empty employee_id");
            if (s.supervisor.empty())
                throw malformed_input("row " + std::to_string(r + 1) +
                                      ": missing supervisor_id (rejected as malformed)");
            if (s.employee == s.supervisor)
                throw self_supervision("row " + std::to_string(r + 1) + ": employee '" +
                                       s.employee + "' supervises themselves");
            s.cal = parse_calendar_month(field(c_month));
            stage.push_back(std::move(s));
        }
        if (stage.empty()) throw malformed_input("panel has a header but no records");

        panel p;
        // month range and contiguity
        std::int64_t lo = stage.front().cal.absolute(), hi = lo;
        for (const auto& s : stage) {
            lo = std::min(lo, s.cal.absolute());
            hi = std::max(hi, s.cal.absolute());
        }
        p.origin_ = shift(calendar_month{0, 1}, static_cast<month_index>(lo));
        p.month_count_ = static_cast<month_index>(hi - lo + 1);

        // canonical order: month, then employee id string
        std::sort(stage.begin(), stage.end(), [&](const staged& a, const staged& b) {
            if (a.cal.absolute() != b.cal.absolute()) return a.cal.absolute() < b.cal.absolute();
            return a.employee < b.employee;
        });

        std::vector<bool> month_seen(static_cast<std::size_t>(p.month_count_), false);
        std::string prev_emp;
        std::int64_t prev_abs = -1;
        for (const auto& s : stage) {
            const auto m = static_cast<month_index>(s.cal.absolute() - lo);
            if (s.cal.absolute() == prev_abs && s.employee == prev_emp)
                throw duplicate_record("duplicate record for employee '" + s.employee +
                                       "' in " + format_calendar_month(s.cal));
            prev_abs = s.cal.absolute();
            prev_emp = s.employee;
            month_seen[static_cast<std::size_t>(m)] = true;
            personnel_record rec;
            rec.employee = p.intern_person(s.employee);
            rec.month = m;
            rec.supervisor = p.intern_person(s.supervisor);
            rec.occupation = p.intern_occupation(s.occupation);
            rec.pay_grade = s.pay;
            p.records_.push_back(std::move(rec));
        }
        for (month_index m = 0; m < p.month_count_; ++m)
            if (!month_seen[static_cast<std::size_t>(m)])
                throw malformed_month("calendar gap: no records in " +
                                      format_calendar_month(shift(p.origin_, m)));

        p.build_indexes();
        return p;
    }

    // canonical CSV; parse(serialize(p)) reproduces p exactly
    std::string serialize() const {
        std::string out = "employee_id,month,supervisor_id,occupation,pay_grade\n";
        for (const auto& r : records_) {
            out += format_csv_row({people_[r.employee],
                                   format_calendar_month(shift(origin_, r.month)),
                                   people_[r.supervisor], occupations_[r.occupation],
                                   r.pay_grade});
        }
        return out;
    }

    calendar_month origin() const { return origin_; }
    month_index month_count() const { return month_count_; }
    month_index last_month() const { return month_count_ - 1; }

    const std::vector<std::string>& people() const { return people_; }
    const std::vector<std::string>& occupations() const { return occupations_; }
    const std::string& person_name(person_id p) const { return people_[p]; }
    const std::string& occupation_name(occ_id o) const { return occupations_[o]; }

    const std::vector<personnel_record>& records() const { return records_; }

    // records of one month (contiguous slice of records())
    std::pair<const personnel_record*, const personnel_record*> records_at(month_index m) const {
        auto b = month_offset_[static_cast<std::size_t>(m)];
        auto e = month_offset_[static_cast<std::size_t>(m) + 1];
        return {records_.data() + b, records_.data() + e};
    }

    // supervisor-keyed groups of one month, sorted by supervisor id
    const std::vector<raw_group>& groups_at(month_index m) const {
        return groups_[static_cast<std::size_t>(m)];
    }

    // employee appears in the records of month m
    bool has_record(person_id p, month_index m) const {
        const auto& row = record_of_[static_cast<std::size_t>(m)];
        return p < row.size() && row[p] >= 0;
    }

    // record of (p, m); nullptr if absent that month
    const personnel_record* record(person_id p, month_index m) const {
        const auto& row = record_of_[static_cast<std::size_t>(m)];
        if (p >= row.size() || row[p] < 0) return nullptr;
        return &records_[static_cast<std::size_t>(row[p])];
    }

    // p supervises at least one report in month m
    bool supervises(person_id p, month_index m) const {
        const auto& row = supervises_[static_cast<std::size_t>(m)];
        return p < row.size() && row[p];
    }

    // employed = has a record or supervises someone that month
    bool employed(person_id p, month_index m) const {
        return has_record(p, m) || supervises(p, m);
    }

  private:
    person_id intern_person(const std::string& name) {
        auto it = person_index_.find(name);
        if (it != person_index_.end()) return it->second;
        auto id = static_cast<person_id>(people_.size());
        people_.push_back(name);
        person_index_.emplace(name, id);
        return id;
    }
    occ_id intern_occupation(const std::string& name) {
        auto it = occ_index_.find(name);
        if (it != occ_index_.end()) return it->second;
        auto id = static_cast<occ_id>(occupations_.size());
        occupations_.push_back(name);
        occ_index_.emplace(name, id);
        return id;
    }

    void build_indexes() {
        const auto m_count = static_cast<std::size_t>(month_count_);
        const auto p_count = people_.size();
        month_offset_.assign(m_count + 1, 0);
        for (const auto& r : records_) month_offset_[static_cast<std::size_t>(r.month) + 1]++;
        for (std::size_t i = 1; i <= m_count; ++i) month_offset_[i] += month_offset_[i - 1];

        record_of_.assign(m_count, std::vector<std::int64_t>(p_count, -1));
        supervises_.assign(m_count, std::vector<bool>(p_count, false));
        groups_.assign(m_count, {});
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            record_of_[static_cast<std::size_t>(r.month)][r.employee] =
                static_cast<std::int64_t>(i);
            supervises_[static_cast<std::size_t>(r.month)][r.supervisor] = true;
        }
        for (month_index m = 0; m < month_count_; ++m) {
            std::map<person_id, std::vector<person_id>> by_sup;
            auto [b, e] = records_at(m);
            for (const auto* r = b; r != e; ++r) by_sup[r->supervisor].push_back(r->employee);
            auto& out = groups_[static_cast<std::size_t>(m)];
            out.reserve(by_sup.size());
            for (auto& [sup, reports] : by_sup) {
                std::sort(reports.begin(), reports.end());
                out.push_back(raw_group{sup, std::move(reports)});
            }
        }
    }

    calendar_month origin_;
    month_index month_count_ = 0;
    std::vector<std::string> people_;
    std::vector<std::string> occupations_;
    std::unordered_map<std::string, person_id> person_index_;
    std::unordered_map<std::string, occ_id> occ_index_;
    std::vector<personnel_record> records_;  // sorted by (month, employee name)
    std::vector<std::size_t> month_offset_;
    std::vector<std::vector<std::int64_t>> record_of_;  // month -> person -> record idx
    std::vector<std::vector<bool>> supervises_;         // month -> person -> leads a group
    std::vector<std::vector<raw_group>> groups_;
};

struct panel_summary {
    month_index months = 0;
    std::int64_t employees = 0;    // distinct employee_id values with records
    std::int64_t supervisors = 0;  // distinct supervisor keys
    std::int64_t records = 0;
    std::int64_t entries = 0;  // record appearances after the first month
    std::int64_t exits = 0;    // record disappearances before the last month
    std::vector<std::int64_t> headcount;  // records per month
};

inline panel_summary summarize(const panel& p) {
    panel_summary s;
    s.months = p.month_count();
    s.records = static_cast<std::int64_t>(p.records().size());
    std::vector<bool> is_employee(p.people().size(), false), is_sup(p.people().size(), false);
    for (const auto& r : p.records()) {
        is_employee[r.employee] = true;
        is_sup[r.supervisor] = true;
    }
    for (bool b : is_employee) s.employees += b;
    for (bool b : is_sup) s.supervisors += b;
    s.headcount.resize(static_cast<std::size_t>(p.month_count()), 0);
    for (month_index m = 0; m < p.month_count(); ++m) {
        auto [b, e] = p.records_at(m);
        s.headcount[static_cast<std::size_t>(m)] = e - b;
    }
    for (person_id q = 0; q < p.people().size(); ++q) {
        for (month_index m = 1; m < p.month_count(); ++m) {
            if (p.has_record(q, m) && !p.has_record(q, m - 1)) s.entries++;
            if (p.has_record(q, m - 1) && !p.has_record(q, m)) s.exits++;
        }
    }
    return s;
}

}  // namespace teamflow
