#include "fourbody/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fourbody/errors.hpp"
#include "parallel.hpp"

namespace fourbody {

int block_length(Variant v) { return v == Variant::E1 ? 8 : 4; }

std::vector<double> block_junctions(Variant v) {
    if (v == Variant::E1) return {0.0, 1.0, 2.0, 4.0, 8.0};
    return {0.0, 1.0, 2.0, 4.0};
}

PeriodClass classify_period(Variant v, const RotationAngle& theta) {
    PeriodClass pc;
    if (!theta.is_rational()) return pc;
    const Rational& r = theta.ratio();
    const std::int64_t block = block_length(v);
    pc.periodic = true;
    pc.period = static_cast<double>(block * r.q);
    // smallest m with block * m * p / q even
    std::int64_t m = 1;
    if (r.p != 0) {
        const std::int64_t num = block * (r.p < 0 ? -r.p : r.p);
        m = 2 * r.q / std::gcd(num, 2 * r.q);
    }
    pc.minimal_period = static_cast<double>(block * m);
    return pc;
}

Extension::Extension(PolylinePath base, Variant v, RotationAngle theta, bool backward)
    : base_(std::move(base)), variant_(v), theta_(std::move(theta)), backward_(backward) {
    if (std::abs(base_.t_begin()) > 1e-12 || std::abs(base_.t_end() - 1.0) > 1e-12) {
        throw DomainError("extension needs a base path on [0, 1]");
    }
    r2_ = rotation(theta_.scaled(2));
    br2_ = kReflectX * r2_;
    r4_ = rotation(theta_.scaled(4));
}

Configuration Extension::in_block(double s) const {
    if (s <= 1.0) return base_.at(s);
    if (variant_ == Variant::E1) {
        if (s <= 2.0) {
            const Configuration u = base_.at(2.0 - s);
            return Configuration{-u[3], -u[2], -u[1], -u[0]} * br2_;
        }
        if (s <= 4.0) {
            const Configuration u = in_block(s - 2.0);
            return Configuration{-u[2], -u[3], -u[1], -u[0]} * r2_;
        }
        const Configuration u = in_block(s - 4.0);
        return Configuration{u[1], u[0], u[3], u[2]} * r4_;
    }
    if (s <= 2.0) {
        const Configuration u = base_.at(2.0 - s);
        return Configuration{u[1], u[0], u[3], u[2]} * br2_;
    }
    const Configuration u = in_block(s - 2.0);
    return Configuration{u[1], u[0], u[2], u[3]} * r2_;
}

Configuration Extension::at(double t) const {
    if (backward_ && t >= -1.0 && t < 0.0) return backward_reflection(base_, t);
    const double block = block_length(variant_);
    const double k = std::floor(t / block);
    double s = t - k * block;
    if (s < 0.0) s = 0.0;
    if (s > block) s = block;
    const Configuration q = in_block(s);
    if (k == 0.0) return q;
    return q * rotation(theta_.scaled(static_cast<std::int64_t>(k) * block_length(variant_)));
}

Configuration backward_reflection(const PolylinePath& base, double t) {
    if (t < -1.0 || t > 0.0) throw DomainError("backward reflection is defined on [-1, 0]");
    const Configuration u = base.at(-t);
    return {u[0] * kReflectX, u[1] * kReflectX, u[3] * kReflectX, u[2] * kReflectX};
}

ExtendedTrajectory extend(const PolylinePath& base, Variant v, const RotationAngle& theta, double t_min,
                          double t_max, const ExtendOptions& opts) {
    if (!(t_max > t_min)) throw DomainError("extension window must have t_max > t_min");
    if (!(opts.samples_per_unit > 0.0)) throw DomainError("samples per unit must be positive");
    for (double t : {base.t_begin(), base.t_end()}) {
        const PairDistance d = min_pair_distance(base.at(t));
        if (d.distance < opts.endpoint_tolerance) {
            throw EndpointCollisionError("base path has a collision at t = " + std::to_string(t), t, d.distance);
        }
    }
    ExtendedTrajectory tr{Extension(base, v, theta, opts.backward_reflection), 0.0, 0.0, 0.0, {}, {}, {}, {}};
    tr.t_min = t_min;
    tr.t_max = t_max;
    const auto n = static_cast<std::size_t>(std::llround((t_max - t_min) * opts.samples_per_unit));
    tr.sample_step = (t_max - t_min) / static_cast<double>(std::max<std::size_t>(n, 1));
    tr.times.resize(n + 1);
    tr.samples.resize(n + 1);
    const std::size_t chunk = 4096;
    const std::size_t chunks = (n + 1 + chunk - 1) / chunk;
    detail::parallel_for(chunks, opts.threads, [&](std::size_t c) {
        for (std::size_t i = c * chunk; i < std::min(n + 1, (c + 1) * chunk); ++i) {
            const double t = i == n ? t_max : t_min + static_cast<double>(i) * tr.sample_step;
            tr.times[i] = t;
            tr.samples[i] = tr.orbit.at(t);
        }
    });
    const double block = block_length(v);
    for (double k = std::floor(t_min / block); k * block <= t_max; k += 1.0) {
        for (double j : block_junctions(v)) {
            const double t = k * block + j;
            if (j == block) continue;  // counted as the next block's start
            if (t >= t_min && t <= t_max) tr.junctions.push_back(t);
        }
    }
    tr.period = classify_period(v, theta);
    return tr;
}

JunctionReport c1_junction_check(const ExtendedTrajectory& traj, double tol) {
    const PolylinePath& base = traj.orbit.base();
    const double h = (base.t_end() - base.t_begin()) / static_cast<double>(base.segments());
    const double N = static_cast<double>(base.segments());
    JunctionReport rep;
    rep.tol = tol > 0.0 ? tol : 10.0 / (N * N);
    for (double t : block_junctions(traj.orbit.variant())) {
        const Configuration q0 = traj.orbit.at(t);
        const Configuration l1 = traj.orbit.at(t - h), l2 = traj.orbit.at(t - 2 * h);
        const Configuration r1 = traj.orbit.at(t + h), r2 = traj.orbit.at(t + 2 * h);
        double jump = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Vec2 vl = (1.0 / (2.0 * h)) * (3.0 * q0[i] - 4.0 * l1[i] + l2[i]);
            const Vec2 vr = (1.0 / (2.0 * h)) * (-3.0 * q0[i] + 4.0 * r1[i] - r2[i]);
            jump = std::max({jump, std::abs(vr.x - vl.x), std::abs(vr.y - vl.y)});
        }
        rep.junctions.push_back({t, jump});
        rep.max_jump = std::max(rep.max_jump, jump);
    }
    rep.pass = rep.max_jump <= rep.tol;
    return rep;
}

Configuration newton_acceleration(const Configuration& q) {
    Configuration a{};
    for (const Pair& pr : kPairs) {
        const Vec2 d = q[pr.j] - q[pr.i];
        const double r = norm(d);
        const Vec2 f = (1.0 / (r * r * r)) * d;
        a[pr.i] += f;
        a[pr.j] -= f;
    }
    return a;
}

NewtonResidual newton_residual(const std::vector<Configuration>& samples, double step, std::size_t sample_count) {
    NewtonResidual out;
    if (samples.size() < 3 || !(step > 0.0)) return out;
    const std::size_t interior = samples.size() - 2;
    const std::size_t stride = (sample_count == 0 || sample_count >= interior) ? 1 : interior / sample_count;
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); i += stride) {
        const Configuration a = newton_acceleration(samples[i]);
        for (int b = 0; b < 4; ++b) {
            const Vec2 qdd = (1.0 / (step * step)) * (samples[i + 1][b] - 2.0 * samples[i][b] + samples[i - 1][b]);
            const double e = norm(qdd - a[b]);
            out.max = std::max(out.max, e);
            sum += e * e;
            ++out.count;
        }
    }
    out.rms = std::sqrt(sum / static_cast<double>(out.count));
    return out;
}

NewtonResidual newton_residual(const ExtendedTrajectory& traj, std::size_t sample_count) {
    return newton_residual(traj.samples, traj.sample_step, sample_count);
}

double energy_drift(const ExtendedTrajectory& traj) {
    const auto& q = traj.samples;
    if (q.size() < 3) return 0.0;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        double k = 0.0, u = 0.0;
        for (int b = 0; b < 4; ++b) {
            const Vec2 v = (1.0 / (2.0 * traj.sample_step)) * (q[i + 1][b] - q[i - 1][b]);
            k += 0.5 * dot(v, v);
        }
        for (const Pair& pr : kPairs) u += 1.0 / norm(q[i][pr.i] - q[i][pr.j]);
        lo = std::min(lo, k - u);
        hi = std::max(hi, k - u);
    }
    return hi - lo;
}

}  // namespace fourbody
