#include <cmath>
#include <random>

#include "doctest.h"
#include "fourbody/action.hpp"
#include "fourbody/bounds.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/testpaths.hpp"
#include "support.hpp"

using namespace fourbody;
using doctest::Approx;

namespace {

PolylinePath static_square() { return PolylinePath::uniform({fbtest::square(), fbtest::square()}); }

// The closed form exactly as it is usually written, no stabilization.
double naive_log_form(const Vec2& A, const Vec2& B) {
    const double S = norm(A) + norm(B), L = norm(B - A);
    return std::log((S + L) / (S - L)) / L;
}

}  // namespace

TEST_CASE("segment_kinetic") {
    const Configuration q = fbtest::square();
    CHECK(segment_kinetic(q, q, 0.3) == 0.0);
    Configuration moved = q;
    moved[0].x += 1;
    moved[1].x += 1;
    moved[2].x -= 1;
    moved[3].x -= 1;
    CHECK(segment_kinetic(q, moved, 1.0) == Approx(2.0));

    const auto& t = table_by_id("e1-0539");
    const Configuration a = t.row(0), b = t.row(1);
    double by_hand = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 v = (1.0 / 0.1) * (b[i] - a[i]);
        by_hand += 0.5 * dot(v, v) * 0.1;
    }
    CHECK(segment_kinetic(a, b, 0.1) == Approx(by_hand).epsilon(1e-14));
}

TEST_CASE("line_inverse_distance_integral") {
    CHECK(line_inverse_distance_integral(1, 0, 0, 0) == Approx(1.0).epsilon(1e-15));
    CHECK(line_inverse_distance_integral(1, 0, 0, 1) == Approx(std::log(1 + std::sqrt(2.0))).epsilon(1e-15));
    CHECK_THROWS_AS(line_inverse_distance_integral(0, 1, 0, 0), CollisionError);
    // passes straight through the origin at u = 1/2
    CHECK_THROWS_AS(line_inverse_distance_integral(-1, 2, 0, 0), CollisionError);
    // passes within 1e-15 of it
    CHECK_THROWS_AS(line_inverse_distance_integral(-1, 2, 1e-15, 0), DegenerateSegmentError);
}

TEST_CASE("stabilized closed form agrees with the plain log form where both are accurate") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 2000; ++k) {
        const Vec2 A{u(rng), u(rng)}, B{u(rng), u(rng)};
        if (segment_origin_distance(A, B) < 0.05) continue;
        CHECK(segment_inverse_distance(A, B) == Approx(naive_log_form(A, B)).epsilon(1e-11));
    }
    // near-collision at the start: the plain form loses digits, the stable one does not
    const Vec2 A{1e-9, 1e-9}, B{1.0, 0.0};
    CHECK(segment_inverse_distance(A, B) == Approx(20.535039451436066).epsilon(1e-13));  // mpmath, 40 digits
}

TEST_CASE("inverse-distance gradient matches finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    int checked = 0;
    while (checked < 300) {
        const Vec2 A{u(rng), u(rng)}, B{u(rng), u(rng)};
        if (segment_origin_distance(A, B) < 0.1) continue;
        ++checked;
        const auto g = segment_inverse_distance_gradient(A, B);
        CHECK(g.value == Approx(segment_inverse_distance(A, B)).epsilon(1e-15));
        const double h = 1e-6;
        const double fdAx = (segment_inverse_distance(A + Vec2{h, 0}, B) - segment_inverse_distance(A - Vec2{h, 0}, B)) / (2 * h);
        const double fdAy = (segment_inverse_distance(A + Vec2{0, h}, B) - segment_inverse_distance(A - Vec2{0, h}, B)) / (2 * h);
        const double fdBx = (segment_inverse_distance(A, B + Vec2{h, 0}) - segment_inverse_distance(A, B - Vec2{h, 0})) / (2 * h);
        const double fdBy = (segment_inverse_distance(A, B + Vec2{0, h}) - segment_inverse_distance(A, B - Vec2{0, h})) / (2 * h);
        CHECK(g.dA.x == Approx(fdAx).epsilon(1e-6).scale(1.0));
        CHECK(g.dA.y == Approx(fdAy).epsilon(1e-6).scale(1.0));
        CHECK(g.dB.x == Approx(fdBx).epsilon(1e-6).scale(1.0));
        CHECK(g.dB.y == Approx(fdBy).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("static square action") {
    const ActionBreakdown a = polyline_action(static_square());
    CHECK(a.kinetic == 0.0);
    CHECK(a.total == Approx(2.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(a.pairwise_quarter_sum() == Approx(a.total).epsilon(1e-14));
    CHECK(action_quadrature_oracle(static_square(), 1e-10) == Approx(a.total).epsilon(1e-10));
}

TEST_CASE("e1-0539 path: below g1 and matching the oracle") {
    const auto th = RotationAngle::pi_fraction(539, 10000);
    const PolylinePath p = build_test_path(Variant::E1, th);
    const ActionBreakdown a = polyline_action(p);
    CHECK(a.total == Approx(3.471565008).epsilon(1e-9));
    CHECK(a.total < g1(th.radians()));
    CHECK(std::abs(a.total - action_quadrature_oracle(p, 1e-9)) <= 1e-8);
    CHECK(a.pairwise_quarter_sum() == Approx(a.total).epsilon(1e-10));
}

TEST_CASE("near-collision segment in the oracle") {
    // bodies 1 and 2 pass 1e-6 apart mid-segment
    const Configuration q0 = complete_configuration({-1, 1e-6 / 2}, {1, -1e-6 / 2}, {0, 3});
    const Configuration q1 = complete_configuration({1, 1e-6 / 2}, {-1, -1e-6 / 2}, {0, 3});
    const PolylinePath p = PolylinePath::uniform({q0, q1});
    const double closed = polyline_action(p).total;
    try {
        const double oracle = action_quadrature_oracle(p, 1e-9);
        CHECK(std::abs(oracle - closed) <= 1e-6 * std::max(1.0, closed));
    } catch (const NonConvergenceError&) {
        CHECK(true);  // acceptable outcome, flagged by the throw
    }
}

TEST_CASE("action invariants on random polylines") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 50; ++k) {
        const PolylinePath p = fbtest::random_polyline(rng, 5);
        const ActionBreakdown a = polyline_action(p);
        CHECK(fbtest::rel_close(a.total, a.pairwise_quarter_sum(), 1e-10));
        CHECK(fbtest::rel_close(a.total, polyline_action(p.reversed()).total, 1e-12));

        std::vector<Configuration> rot;
        const Mat2 R = rotation(RotationAngle::pi_fraction(k + 1, 37));
        for (const auto& q : p.nodes()) rot.push_back(q * R);
        CHECK(fbtest::rel_close(a.total, polyline_action(PolylinePath(p.times(), rot)).total, 1e-10));

        const double lambda = 1.7;
        std::vector<Configuration> scaled;
        std::vector<double> times;
        for (const auto& q : p.nodes()) scaled.push_back(lambda * q);
        for (double t : p.times()) times.push_back(std::pow(lambda, 1.5) * t);
        CHECK(fbtest::rel_close(polyline_action(PolylinePath(times, scaled)).total, std::sqrt(lambda) * a.total, 1e-9));
    }
}

TEST_CASE("quarter-sum identity fails without the centroid constraint") {
    std::mt19937_64 rng(23);
    PolylinePath p = fbtest::random_polyline(rng, 4);
    auto nodes = p.nodes();
    // drift body 1 so the velocities no longer sum to zero
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k][0] += static_cast<double>(k) * Vec2{0.3, -0.2};
    const ActionBreakdown a = polyline_action(PolylinePath::unchecked(p.times(), nodes));
    CHECK_FALSE(fbtest::rel_close(a.total, a.pairwise_quarter_sum(), 1e-6));
    CHECK_THROWS_AS(PolylinePath(p.times(), nodes), DomainError);
}

TEST_CASE("path_min_pair_distance sees crossings between nodes") {
    const Configuration q0 = complete_configuration({-1, 0}, {1, 0}, {0, 3});
    const Configuration q1 = complete_configuration({1, 0}, {-1, 0}, {0, 3});
    const PolylinePath p = PolylinePath::uniform({q0, q1});
    CHECK(path_min_pair_distance(p).distance < 1e-12);
    CHECK_THROWS_AS(polyline_action(p), CollisionError);
    try {
        polyline_action(p);
    } catch (const CollisionError& e) {
        CHECK(e.segment == 0);
        CHECK(e.pair == Pair{0, 1});
    }
}
