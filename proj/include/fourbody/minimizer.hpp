#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fourbody/action.hpp"
#include "fourbody/geometry.hpp"

namespace fourbody {

// Uniform mesh j/N on [0, 1]. Endpoints are always rebuilt from the boundary params.
struct DiscretePath {
    Variant variant = Variant::E1;
    RotationAngle theta;
    int N = 0;
    BoundaryParams start;
    BoundaryParams end;
    std::vector<Configuration> interior;  // N - 1 nodes

    std::vector<Configuration> nodes() const;
    PolylinePath polyline() const;

    // Free coordinates: a1 b1 c1 a2 b2 c2, then q1..q3 (x, y) of each interior node.
    std::vector<double> pack() const;
    void unpack(const std::vector<double>& x);
    std::size_t dimension() const { return 6 + 6 * static_cast<std::size_t>(N - 1); }

    // Resample a polyline on [t0, t1] at N uniform segments and project its ends onto the families.
    static DiscretePath from_polyline(Variant v, const RotationAngle& theta, const PolylinePath& p, int N);
};

// Indices of b1, c1, b2, c2 in the packed vector.
bool is_bound_index(std::size_t i);

struct ActionGradient {
    double action = 0.0;
    std::vector<double> gradient;
};

ActionGradient discrete_action_gradient(const DiscretePath& path);

// Zero the components that push a variable sitting on its bound further out.
std::vector<double> project_gradient(const std::vector<double>& x, const std::vector<double>& g);

struct FirstVariationResidual {
    std::array<double, 4> start_terms{};  // v1x, v2x, v3x + v4x, v3y - v4y at t = 0
    std::array<double, 4> end_terms{};    // components of the two t = 1 matrix relations
    double start = 0.0;
    double end = 0.0;
    double max() const { return start > end ? start : end; }
};

// Second-order one-sided velocities at t = 0 and t = 1.
FirstVariationResidual first_variation_residual(const DiscretePath& path);

struct MinimizeOptions {
    int restarts = 4;
    std::uint64_t seed = 0;
    int max_iterations = 20000;
    double gradient_tolerance = 1e-9;
    std::vector<int> ladder;         // coarse-to-fine N schedule, ends at the requested N
    bool newton_polish = true;
    double noise = 0.05;             // sigma relative to the configuration scale
    double collapse_tolerance = 1e-5;
    bool record_history = false;
    unsigned threads = 0;
};

struct RestartTrace {
    int restart = 0;
    std::string seed_kind;
    double initial_action = 0.0;
    double final_action = 0.0;
    int iterations = 0;
    int newton_steps = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    double min_pair_distance = 0.0;
    bool collapsed = false;
    std::string note;
    std::vector<double> history;
};

struct MinimizeResult {
    DiscretePath path;
    double action = 0.0;
    bool collision_free = false;
    PairDistance min_pair;
    FirstVariationResidual residuals;
    std::vector<RestartTrace> trace;
    int best_restart = -1;
    bool all_restarts_collapsed = false;
};

// One projected L-BFGS descent (plus optional Newton polish) in place.
RestartTrace descend(DiscretePath& path, const MinimizeOptions& opts);

DiscretePath prolong(const DiscretePath& path, int N);

// The restart-0 seed: the test path (or the nearest table outside the certified range).
DiscretePath test_path_seed(Variant v, const RotationAngle& theta, int N);

MinimizeResult minimize(Variant v, const RotationAngle& theta, int N, const MinimizeOptions& opts = {});

}  // namespace fourbody
