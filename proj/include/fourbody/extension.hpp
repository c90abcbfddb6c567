#pragma once

#include <vector>

#include "fourbody/action.hpp"
#include "fourbody/geometry.hpp"

namespace fourbody {

struct PeriodClass {
    bool periodic = false;
    double period = 0.0;          // block length times the reduced denominator l
    double minimal_period = 0.0;  // smallest T with q(t + T) = q(t); divides period
};

int block_length(Variant v);  // 8 for E1, 4 for E2
PeriodClass classify_period(Variant v, const RotationAngle& theta);

// Junction times inside one block, including the block end.
std::vector<double> block_junctions(Variant v);

// Piecewise reflection/rotation extension of a path on [0, 1], evaluated exactly.
class Extension {
public:
    Extension(PolylinePath base, Variant v, RotationAngle theta, bool backward_reflection = false);

    Configuration at(double t) const;
    const PolylinePath& base() const { return base_; }
    Variant variant() const { return variant_; }
    const RotationAngle& theta() const { return theta_; }

private:
    Configuration in_block(double s) const;

    PolylinePath base_;
    Variant variant_;
    RotationAngle theta_;
    bool backward_;
    Mat2 r2_, br2_, r4_;
};

// Reflection of the start of a path into [-1, 0]: q_{1,2} -> q_{1,2}(-t) B, q3 <- q4(-t) B, q4 <- q3(-t) B.
Configuration backward_reflection(const PolylinePath& base, double t);

struct ExtendOptions {
    double samples_per_unit = 100.0;
    bool backward_reflection = false;
    double endpoint_tolerance = 1e-8;
    unsigned threads = 0;
};

struct ExtendedTrajectory {
    Extension orbit;
    double t_min = 0.0;
    double t_max = 0.0;
    double sample_step = 0.0;
    std::vector<double> times;
    std::vector<Configuration> samples;
    std::vector<double> junctions;
    PeriodClass period;
};

ExtendedTrajectory extend(const PolylinePath& base, Variant v, const RotationAngle& theta, double t_min,
                          double t_max, const ExtendOptions& opts = {});

struct JunctionJump {
    double t = 0.0;
    double jump = 0.0;
};

struct JunctionReport {
    std::vector<JunctionJump> junctions;
    double max_jump = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// One-sided second-order velocities on both sides of every junction in [0, one block],
// with the stencil step equal to the base mesh spacing. tol <= 0 selects 10 / N^2.
JunctionReport c1_junction_check(const ExtendedTrajectory& traj, double tol = 0.0);

Configuration newton_acceleration(const Configuration& q);

struct NewtonResidual {
    double max = 0.0;
    double rms = 0.0;
    std::size_t count = 0;
};

// Second differences of uniformly spaced samples against a(q), interior samples only.
NewtonResidual newton_residual(const std::vector<Configuration>& samples, double step, std::size_t sample_count = 0);
NewtonResidual newton_residual(const ExtendedTrajectory& traj, std::size_t sample_count = 0);

// Spread of K - U over the samples, velocities by central differences.
double energy_drift(const ExtendedTrajectory& traj);

}  // namespace fourbody
