#include <cmath>
#include <random>

#include "doctest.h"
#include "fourbody/action.hpp"
#include "fourbody/bounds.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/testpaths.hpp"

using namespace fourbody;
using doctest::Approx;

namespace {
RotationAngle pi_frac(std::int64_t p, std::int64_t q) { return RotationAngle::pi_fraction(p, q); }
}  // namespace

TEST_CASE("embedded tables") {
    int e1 = 0, e2 = 0;
    for (const auto& t : all_tables()) {
        (t.variant == Variant::E1 ? e1 : e2)++;
        CHECK(t.rows.size() == 11);
        CHECK_NOTHROW(validate_table(t));
    }
    CHECK(e1 == 7);
    CHECK(e2 == 9);
    CHECK(to_string(certified_max(Variant::E1)) == "539/10000");
    CHECK(to_string(certified_max(Variant::E2)) == "83/1250");
    CHECK_THROWS_AS(table_by_id("e1-9999"), DomainError);
}

TEST_CASE("load_table picks the covering interval") {
    CHECK(load_table(Variant::E1, pi_frac(53, 1000)).id == "e1-0539");
    CHECK(load_table(Variant::E1, pi_frac(1, 100)).id == "e1-0150");
    CHECK(load_table(Variant::E2, pi_frac(1, 1000)).id == "e2-0012");
    // seams belong to the lower interval's upper end
    CHECK(load_table(Variant::E1, pi_frac(13, 250)).id == "e1-0500");
    CHECK_THROWS_AS(load_table(Variant::E1, pi_frac(54, 1000)), DomainError);
    CHECK_THROWS_AS(load_table(Variant::E2, RotationAngle{}), DomainError);
}

TEST_CASE("e1-0539 row values and repairs") {
    const auto& t = table_by_id("e1-0539");
    const Configuration r0 = t.row(0);
    const PairDistance d = min_pair_distance(r0);
    CHECK(d.distance == Approx(1.2570).epsilon(1e-4));
    CHECK(d.pair == Pair{0, 1});
    // decimal-shift repairs at t = 0.3 and 0.4
    REQUIRE(t.repairs.size() == 2);
    CHECK(t.repairs[0].column == "q3y");
    CHECK(t.row(3)[2].y > 0.7);
    CHECK(t.row(4)[2].y > 0.7);
    const std::string raw = t.csv(true), fixed = t.csv(false);
    CHECK(raw.find(t.repairs[0].raw) != std::string::npos);
    CHECK(fixed.find(t.repairs[0].raw) == std::string::npos);
    CHECK(std::count(fixed.begin(), fixed.end(), '\n') == 12);

    const auto& t3 = table_by_id("e1-0400");
    REQUIRE(t3.repairs.size() == 1);
    CHECK(t3.repairs[0].raw == "-0.4.8401120");
}

TEST_CASE("build_test_path rotates only the last node") {
    const auto& t = table_by_id("e1-0539");
    const PolylinePath a = build_test_path(Variant::E1, pi_frac(539, 10000));
    // 0.052 pi is the seam; lookup would hand it to e1-0500, so name the table
    const PolylinePath b = build_test_path(t, pi_frac(52, 1000));
    for (int k = 0; k < 10; ++k) CHECK(max_abs_diff(a.nodes()[k], b.nodes()[k]) == 0.0);
    CHECK(max_abs_diff(a.nodes()[10], t.row(10) * rotation(pi_frac(539, 10000))) < 1e-7);
    CHECK(max_abs_diff(b.nodes()[10], t.row(10) * rotation(pi_frac(52, 1000))) < 1e-7);
}

TEST_CASE("node 10 stays in the end family") {
    std::mt19937_64 rng(29);
    for (Variant v : {Variant::E1, Variant::E2}) {
        const Rational hi = certified_max(v);
        std::uniform_int_distribution<std::int64_t> k(1, hi.p * (100000 / hi.q));
        for (int i = 0; i < 100; ++i) {
            const auto th = pi_frac(k(rng), 100000);
            const PolylinePath p = build_test_path(v, th);
            CHECK(in_family(p.nodes()[10], end_side(v), th, 1e-9));
            CHECK(in_family(p.nodes()[0], Side::Start, RotationAngle{}, 1e-6));
        }
    }
}

TEST_CASE("every table is collision-free and below g at both interval ends") {
    for (const auto& t : all_tables()) {
        for (const Rational& r : {t.interval.lo, t.interval.hi}) {
            if (r.p == 0) continue;
            const auto th = pi_frac(r.p, r.q);
            const PolylinePath p = build_test_path(t, th);
            double a = 0.0;
            REQUIRE_NOTHROW(a = polyline_action(p).total);
            CHECK(a < g_bound(t.variant, th.radians()));
        }
    }
}

// Measured worst case is 190 per radian (e2-0012); the small-theta tables are the steep ones.
TEST_CASE("test-path action is Lipschitz within a table") {
    const double h = 1e-5 * M_PI;
    const double C = 200.0;
    for (const auto& t : all_tables()) {
        const double lo = t.interval.lo.p * M_PI / t.interval.lo.q, hi = t.interval.hi.p * M_PI / t.interval.hi.q;
        for (int k = 1; k < 10; ++k) {
            const double th = lo + (hi - lo) * k / 10.0;
            const double a0 = polyline_action(build_test_path(t, RotationAngle::irrational(th))).total;
            const double a1 = polyline_action(build_test_path(t, RotationAngle::irrational(th + h))).total;
            CHECK(std::abs(a1 - a0) <= C * h);
        }
    }
}

TEST_CASE("parse_table rejects malformed input") {
    const auto& t = table_by_id("e2-0300");
    const std::string sidecar = R"({"id":"x","variant":"e2","theta0":"3/100","interval":{"lo":"1/40","hi":"4/125","lo_closed":true},"repairs":[]})";
    CHECK_NOTHROW(parse_table(t.csv(), sidecar));
    std::string bad = t.csv();
    bad.replace(bad.find("0.1,"), 4, "0.15,");
    CHECK_THROWS_AS(parse_table(bad, sidecar), DomainError);
    std::string literal = t.csv();
    const auto comma = literal.find(',', literal.find("0.5,") + 4);
    literal.insert(comma, ".3");
    CHECK_THROWS_AS(parse_table(literal, sidecar), DomainError);
    std::string shortened = t.csv();
    shortened.erase(shortened.rfind("1,"));
    CHECK_THROWS_AS(parse_table(shortened, sidecar), DomainError);
}

TEST_CASE("certificate sweeps") {
    const CertificateReport e1 = certificate_sweep(Variant::E1);
    CHECK(e1.overall_pass);
    CHECK(e1.records.size() == 545);
    CHECK(e1.min_margin == Approx(4.21994e-4).epsilon(1e-5));
    CHECK(to_string(e1.min_margin_theta) == "539/10000");
    for (const auto& r : e1.records) CHECK(r.passed());

    const CertificateReport e2 = certificate_sweep(Variant::E2);
    CHECK(e2.overall_pass);
    CHECK(e2.records.size() == 672);
    CHECK(e2.min_margin == Approx(6.78397e-4).epsilon(1e-5));
    CHECK(e2.min_margin_table == "e2-0660");

    // every seam is evaluated under both neighbouring tables
    int seams = 0;
    for (std::size_t i = 1; i < e1.records.size(); ++i) {
        if (compare(e1.records[i].theta, e1.records[i - 1].theta) == 0) {
            ++seams;
            CHECK(e1.records[i].table != e1.records[i - 1].table);
        }
    }
    CHECK(seams == 6);
}

TEST_CASE("the E1 certificate does not extend past its range") {
    SweepOptions o;
    o.range_hi = Rational{6, 100};
    bool failed = false;
    try {
        const CertificateReport r = certificate_sweep(Variant::E1, o);
        failed = !r.overall_pass;
        for (const auto& x : r.records) {
            if (compare(x.theta, certified_max(Variant::E1)) > 0) CHECK(x.extrapolated);
        }
    } catch (const DomainError&) {
        failed = true;
    }
    CHECK(failed);
    o.range_hi = Rational{11, 100};
    CHECK_THROWS_AS(certificate_sweep(Variant::E1, o), DomainError);
}
