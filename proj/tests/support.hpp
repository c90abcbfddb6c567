#pragma once
// Shared fixtures for the unit tests and the acceptance runner.
#include <cmath>
#include <random>
#include <vector>

#include "fourbody/action.hpp"
#include "fourbody/geometry.hpp"

namespace fbtest {

using namespace fourbody;

inline Configuration square() { return {Vec2{1, 1}, Vec2{-1, 1}, Vec2{-1, -1}, Vec2{1, -1}}; }

inline Configuration random_centered(std::mt19937_64& rng, double box) {
    std::uniform_real_distribution<double> u(-box, box);
    return complete_configuration({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
}

// Nodes in a box, COM-projected, rejected until the continuous min pair distance is at least min_sep.
inline PolylinePath random_polyline(std::mt19937_64& rng, int segments, double min_sep = 0.1, double box = 2.0) {
    std::uniform_real_distribution<double> dt(0.05, 0.4);
    for (;;) {
        std::vector<double> times{0.0};
        std::vector<Configuration> nodes{random_centered(rng, box)};
        for (int k = 0; k < segments; ++k) {
            times.push_back(times.back() + dt(rng));
            nodes.push_back(random_centered(rng, box));
        }
        PolylinePath p(times, nodes);
        if (path_min_pair_distance(p).distance >= min_sep) return p;
    }
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace fbtest
