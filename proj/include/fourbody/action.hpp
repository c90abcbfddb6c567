#pragma once

#include <array>
#include <vector>

#include "fourbody/geometry.hpp"

namespace fourbody {

// Piecewise-linear path, constant velocity on each segment.
class PolylinePath {
public:
    PolylinePath(std::vector<double> times, std::vector<Configuration> nodes);
    // Skips the center-of-mass check (diagnostics and negative controls only).
    static PolylinePath unchecked(std::vector<double> times, std::vector<Configuration> nodes);
    static PolylinePath uniform(std::vector<Configuration> nodes, double t0 = 0.0, double t1 = 1.0);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Configuration>& nodes() const { return nodes_; }
    std::size_t segments() const { return nodes_.size() - 1; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }

    Configuration at(double t) const;
    PolylinePath reversed() const;

private:
    PolylinePath() = default;
    void validate_shape() const;

    std::vector<double> times_;
    std::vector<Configuration> nodes_;
};

struct ActionBreakdown {
    double total = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    std::array<double, 6> pairwise{};  // A_ij in kPairs order, coefficient 4 potential

    double pairwise_quarter_sum() const;
};

double segment_kinetic(const Configuration& from, const Configuration& to, double dt);

// int_0^1 du / |(a + b u, c + d u)|
double line_inverse_distance_integral(double a, double b, double c, double d);

// Same integral written for the separation moving linearly from A to B.
double segment_inverse_distance(const Vec2& A, const Vec2& B);

struct InverseDistanceGradient {
    double value = 0.0;
    Vec2 dA;
    Vec2 dB;
};
InverseDistanceGradient segment_inverse_distance_gradient(const Vec2& A, const Vec2& B);

// Distance from the origin to the segment [A, B].
double segment_origin_distance(const Vec2& A, const Vec2& B);

ActionBreakdown polyline_action(const PolylinePath& path);

// Continuous minimum over the whole path (pairs move linearly on each segment).
PairDistance path_min_pair_distance(const PolylinePath& path);

double action_quadrature_oracle(const PolylinePath& path, double tol = 1e-9, int max_depth = 40);

}  // namespace fourbody
