#pragma once

#include <vector>

#include "fourbody/geometry.hpp"

namespace fourbody {

struct KeplerParams {
    double mu = 1.0;
    double alpha = 1.0;
    double theta = 0.0;  // radians, (0, pi]
    double T = 1.0;
};

// (3/2) (mu alpha^2 theta^2 T)^(1/3); theta -> pi on the collision class.
double kepler_lower_bound(const KeplerParams& p, bool collision);

// (6/4) (3/2) (16 pi^2)^(1/3): every pair collides at one instant.
double total_collision_bound();

inline constexpr double kBoundThetaMax = 0.1;  // in units of pi

double g1(double theta);
double g2(double theta);
double g_bound(Variant v, double theta);

enum class Case2Coefficient { Repaired, Printed };

// Case numbers are 1-based: 1..5 for E1, 1..4 for E2.
double case_bound(Variant v, int case_id, double theta, Case2Coefficient coef = Case2Coefficient::Repaired);
int case_count(Variant v);

}  // namespace fourbody
