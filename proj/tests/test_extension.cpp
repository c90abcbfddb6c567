#include <cmath>
#include <random>

#include "doctest.h"
#include "fourbody/errors.hpp"
#include "fourbody/extension.hpp"
#include "fourbody/minimizer.hpp"
#include "fourbody/testpaths.hpp"
#include "support.hpp"

using namespace fourbody;
using doctest::Approx;

namespace {

const RotationAngle kPi20 = RotationAngle::pi_fraction(1, 20);

PolylinePath minimizer_path(Variant v, int N) {
    MinimizeOptions o;
    o.restarts = 1;
    o.threads = 1;
    return minimize(v, kPi20, N, o).path.polyline();
}

// Flat near both ends, so every one-sided velocity at a junction is zero.
PolylinePath flat_ended(Variant v) {
    DiscretePath p = test_path_seed(v, kPi20, 20);
    const auto nodes = p.nodes();
    p.interior[0] = p.interior[1] = nodes.front();
    p.interior[p.N - 2] = p.interior[p.N - 3] = nodes.back();
    return p.polyline();
}

}  // namespace

TEST_CASE("period classification") {
    PeriodClass e1 = classify_period(Variant::E1, kPi20);
    CHECK(e1.periodic);
    CHECK(e1.period == 160.0);
    CHECK(e1.minimal_period == 40.0);
    PeriodClass e2 = classify_period(Variant::E2, kPi20);
    CHECK(e2.periodic);
    CHECK(e2.period == 80.0);
    CHECK_FALSE(classify_period(Variant::E2, RotationAngle::irrational(std::sqrt(2.0) / 100 * M_PI)).periodic);
    CHECK(classify_period(Variant::E1, RotationAngle{}).minimal_period == 8.0);

    for (std::int64_t q : {7, 20, 33, 10000}) {
        const auto th = RotationAngle::pi_fraction(3, q);
        const PeriodClass pc = classify_period(Variant::E1, th);
        const Mat2 r = rotation(RotationAngle::pi_fraction(3 * static_cast<std::int64_t>(pc.period), q));
        CHECK(std::abs(r.m00 - 1.0) < 1e-12);
        CHECK(std::abs(r.m01) < 1e-12);
        const Mat2 m = rotation(RotationAngle::pi_fraction(3 * static_cast<std::int64_t>(pc.minimal_period), q));
        CHECK(std::abs(m.m00 - 1.0) < 1e-12);
    }
}

TEST_CASE("block relation on a minimizer") {
    std::mt19937_64 rng(53);
    for (Variant v : {Variant::E1, Variant::E2}) {
        const Extension ext(minimizer_path(v, 40), v, kPi20);
        const int L = block_length(v);
        const Mat2 R = rotation(kPi20.scaled(L));
        std::uniform_real_distribution<double> u(-3.0 * L, 5.0 * L);
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng);
            CHECK(max_abs_diff(ext.at(t + L), ext.at(t) * R) <= 1e-10);
        }
        // discrete velocity at the block end
        const double h = 1e-3;
        const Configuration v0 = (1.0 / h) * (ext.at(h) - ext.at(0));
        const Configuration vL = (1.0 / h) * (ext.at(L + h) - ext.at(L));
        CHECK(max_abs_diff(vL, v0 * R) <= 1e-8);
    }
}

TEST_CASE("E1 branches agree at t = 2") {
    const PolylinePath base = minimizer_path(Variant::E1, 40);
    const Extension ext(base, Variant::E1, kPi20);
    const Configuration u = base.at(0.0);
    const Mat2 r2 = rotation(kPi20.scaled(2));
    const Configuration second = Configuration{-u[3], -u[2], -u[1], -u[0]} * (kReflectX * r2);
    const Configuration third = Configuration{-u[2], -u[3], -u[1], -u[0]} * r2;
    CHECK(max_abs_diff(second, third) < 1e-12);
    CHECK(max_abs_diff(ext.at(2.0), third) < 1e-12);
}

TEST_CASE("theta = 0 gives a mirror-periodic orbit") {
    const auto& t = table_by_id("e1-0020");
    const Extension ext(build_test_path(t, RotationAngle{}), Variant::E1, RotationAngle{});
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double s = u(rng);
        CHECK(max_abs_diff(ext.at(s + 8.0), ext.at(s)) <= 1e-10);
    }
}

TEST_CASE("backward reflection matches the block formula") {
    for (Variant v : {Variant::E1, Variant::E2}) {
        const PolylinePath base = minimizer_path(v, 40);
        const Extension ext(base, v, kPi20);
        for (double t : {-1.0, -0.73, -0.5, -0.1, 0.0}) {
            CHECK(max_abs_diff(backward_reflection(base, t), ext.at(t)) < 1e-12);
        }
        const Extension direct(base, v, kPi20, true);
        CHECK(max_abs_diff(direct.at(-0.4), ext.at(-0.4)) < 1e-12);
    }
    CHECK_THROWS_AS(backward_reflection(flat_ended(Variant::E1), 0.5), DomainError);
}

TEST_CASE("extend samples, junctions and errors") {
    const PolylinePath base = minimizer_path(Variant::E2, 40);
    ExtendOptions o;
    o.samples_per_unit = 10;
    const ExtendedTrajectory tr = extend(base, Variant::E2, kPi20, 0.0, 80.0, o);
    CHECK(tr.samples.size() == 801);
    CHECK(tr.times.back() == 80.0);
    CHECK(tr.period.period == 80.0);
    CHECK(max_abs_diff(tr.samples.back(), tr.samples.front()) < 1e-10);
    CHECK(tr.junctions.size() == 61);  // 20 blocks of three, plus t = 80
    CHECK_THROWS_AS(extend(base, Variant::E2, kPi20, 1.0, 1.0), DomainError);

    // a start configuration with q1 = q2
    DiscretePath bad = test_path_seed(Variant::E1, kPi20, 10);
    bad.start.c = 0.0;
    CHECK_THROWS_AS(extend(bad.polyline(), Variant::E1, kPi20, 0.0, 8.0), EndpointCollisionError);
}

TEST_CASE("C1 junction check") {
    for (Variant v : {Variant::E1, Variant::E2}) {
        const ExtendedTrajectory flat = extend(flat_ended(v), v, kPi20, 0.0, block_length(v));
        const JunctionReport fr = c1_junction_check(flat);
        CHECK(fr.pass);
        CHECK(fr.max_jump < 1e-12);
        CHECK(fr.junctions.size() == block_junctions(v).size());

        // a test path is not a critical point
        const auto th = RotationAngle::pi_fraction(1, 25);
        const ExtendedTrajectory tp = extend(test_path_seed(v, th, 40).polyline(), v, th, 0.0, block_length(v));
        const JunctionReport tr = c1_junction_check(tp);
        CHECK_FALSE(tr.pass);
    }
}

TEST_CASE("newton acceleration and residual") {
    const Configuration a = newton_acceleration(fbtest::square());
    CHECK(a[0].x == Approx(-0.338388348).epsilon(1e-9));
    CHECK(a[0].y == Approx(-0.338388348).epsilon(1e-9));
    const Vec2 sum = a[0] + a[1] + a[2] + a[3];
    CHECK(std::abs(sum.x) < 1e-15);

    // static configuration: the discrete second difference vanishes
    const std::vector<Configuration> still(3, fbtest::square());
    const NewtonResidual r = newton_residual(still, 0.1);
    CHECK(r.max == Approx(norm(a[0])).epsilon(1e-15));
    CHECK(r.count == 4);

    // rigidly rotating square, a relative equilibrium: error is (omega h)^2 / 12 relative
    const double omega = std::sqrt(norm(a[0]) / std::sqrt(2.0));
    double prev = 0.0;
    for (double h : {0.1, 0.05}) {
        std::vector<Configuration> s;
        for (int k = 0; k < 200; ++k) s.push_back(fbtest::square() * rotation(omega * h * k));
        const NewtonResidual nr = newton_residual(s, h);
        CHECK(nr.max <= norm(a[0]) * (omega * h) * (omega * h) / 12.0 * 1.01);
        if (prev > 0.0) CHECK(prev / nr.rms == Approx(4.0).epsilon(1e-2));
        prev = nr.rms;
    }
}

TEST_CASE("energy drift shrinks with the mesh") {
    double prev = 0.0;
    for (int N : {40, 80}) {
        ExtendOptions o;
        o.samples_per_unit = N;
        const ExtendedTrajectory tr = extend(minimizer_path(Variant::E1, N), Variant::E1, kPi20, 0.0, 8.0, o);
        const double d = energy_drift(tr);
        if (prev > 0.0) CHECK(d < prev / 2.0);
        prev = d;
    }
}
