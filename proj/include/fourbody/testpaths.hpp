#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fourbody/action.hpp"
#include "fourbody/geometry.hpp"

namespace fourbody {

struct RepairEntry {
    std::string t;
    std::string column;
    std::string raw;
    std::string repaired;
    std::string rule;
    std::string note;
};

// Lookup treats every interval as (lo, hi]; lo_closed records how the source states it.
struct TableInterval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
};

struct TestPathTable {
    std::string id;
    Variant variant = Variant::E1;
    RotationAngle theta0;
    TableInterval interval;
    std::vector<std::array<std::string, 7>> cells;  // t, q1x .. q3y as text
    std::vector<std::array<Vec2, 3>> rows;           // t = 0, 0.1, ..., 1; last row unrotated
    std::vector<RepairEntry> repairs;

    static constexpr int kRows = 11;

    Configuration row(int k) const;
    BoundaryParams start_params() const;
    // Read off the unrotated t = 1 row; theta is left for the caller to set.
    BoundaryParams end_params() const;
    std::string csv(bool raw = false) const;
};

TestPathTable parse_table(std::string_view csv_text, std::string_view sidecar_json);
// Throws DomainError naming the first violated invariant.
void validate_table(const TestPathTable& table);

const std::vector<TestPathTable>& all_tables();
const TestPathTable& table_by_id(std::string_view id);
Rational certified_max(Variant v);
const TestPathTable& load_table(Variant v, const RotationAngle& theta);

PolylinePath build_test_path(const TestPathTable& table, const RotationAngle& theta);
PolylinePath build_test_path(Variant v, const RotationAngle& theta);

// exact comparisons of p/q values
int compare(const Rational& a, const Rational& b);
std::string to_string(const Rational& r);
Rational parse_rational(std::string_view s);

struct CertificateRecord {
    Rational theta;  // multiple of pi
    std::string table;
    double action = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool extrapolated = false;  // outside the table's certified range
    bool passed() const { return margin > 0.0; }
};

struct CertificateReport {
    Variant variant = Variant::E1;
    Rational step;
    Rational range_hi;
    std::vector<CertificateRecord> records;
    bool overall_pass = false;
    double min_margin = 0.0;
    Rational min_margin_theta;
    std::string min_margin_table;
};

struct SweepOptions {
    Rational step{1, 10000};
    std::optional<Rational> range_hi;  // default: the certified maximum
    unsigned threads = 0;              // 0: hardware concurrency
};

CertificateReport certificate_sweep(Variant v, const SweepOptions& opts = {});

}  // namespace fourbody
