#include "fourbody/action.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fourbody/errors.hpp"

namespace fourbody {

// ---- PolylinePath ----

void PolylinePath::validate_shape() const {
    if (nodes_.size() < 2) throw DomainError("polyline path needs at least one segment");
    if (times_.size() != nodes_.size()) throw DomainError("polyline path: times/nodes size mismatch");
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) throw DomainError("polyline path: times must increase strictly");
    }
}

PolylinePath::PolylinePath(std::vector<double> times, std::vector<Configuration> nodes)
    : times_(std::move(times)), nodes_(std::move(nodes)) {
    validate_shape();
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (!is_centered(nodes_[k])) {
            throw DomainError("polyline path: node " + std::to_string(k) + " is not centered");
        }
    }
}

PolylinePath PolylinePath::unchecked(std::vector<double> times, std::vector<Configuration> nodes) {
    PolylinePath p;
    p.times_ = std::move(times);
    p.nodes_ = std::move(nodes);
    p.validate_shape();
    return p;
}

PolylinePath PolylinePath::uniform(std::vector<Configuration> nodes, double t0, double t1) {
    const std::size_t n = nodes.size();
    if (n < 2) throw DomainError("polyline path needs at least one segment");
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) {
        times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    times.back() = t1;
    return PolylinePath(std::move(times), std::move(nodes));
}

Configuration PolylinePath::at(double t) const {
    if (t <= times_.front()) return nodes_.front();
    if (t >= times_.back()) return nodes_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    if (t == times_[k]) return nodes_[k];
    const double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return nodes_[k] + s * (nodes_[k + 1] - nodes_[k]);
}

PolylinePath PolylinePath::reversed() const {
    PolylinePath p;
    const double t0 = times_.front(), t1 = times_.back();
    for (auto it = times_.rbegin(); it != times_.rend(); ++it) p.times_.push_back(t0 + t1 - *it);
    p.nodes_.assign(nodes_.rbegin(), nodes_.rend());
    return p;
}

double ActionBreakdown::pairwise_quarter_sum() const {
    double s = 0.0;
    for (double v : pairwise) s += v;
    return 0.25 * s;
}

// ---- closed forms ----

double segment_kinetic(const Configuration& from, const Configuration& to, double dt) {
    if (!(dt > 0.0)) throw DomainError("segment_kinetic: dt must be positive");
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        Vec2 d = to[i] - from[i];
        s += dot(d, d);
    }
    return s / (2.0 * dt);
}

namespace {

// Quantities shared by the value and its gradient.
// With S = |A| + |B| and L = |B - A| the integral is ln((S + L)/(S - L)) / L.
struct SegmentCore {
    double ra, rb, S, L, half_gap;  // half_gap = (S^2 - L^2)/2, computed without cancellation
    double smL;                     // S - L
};

SegmentCore segment_core(const Vec2& A, const Vec2& B) {
    SegmentCore c{};
    c.ra = norm(A);
    c.rb = norm(B);
    if (c.ra == 0.0 || c.rb == 0.0) throw CollisionError("separation vanishes at a segment endpoint");
    const Vec2 e = B - A;
    c.L = norm(e);
    c.S = c.ra + c.rb;
    const double ab = dot(A, B);
    const double cr = cross(A, B);
    if (c.L > 0.0 && dot(A, e) < 0.0 && dot(B, e) > 0.0) {
        const double h = std::abs(cr) / c.L;
        if (h == 0.0) throw CollisionError("separation passes through zero inside the segment");
        if (h < 1e-13 * std::max(c.ra, c.rb)) {
            throw DegenerateSegmentError("near head-on passage, impact parameter below 1e-13 of segment scale");
        }
    }
    c.half_gap = ab >= 0.0 ? c.ra * c.rb + ab : cr * cr / (c.ra * c.rb - ab);
    c.smL = 2.0 * c.half_gap / (c.S + c.L);
    if (!(c.smL > 0.0)) throw CollisionError("separation passes through zero inside the segment");
    return c;
}

double core_value(const SegmentCore& c) {
    if (c.L == 0.0) return 1.0 / c.ra;
    const double x = c.L / c.S;
    if (x < 0.5) return 2.0 * std::atanh(x) / c.L;
    return std::log((c.S + c.L) / c.smL) / c.L;
}

}  // namespace

double segment_inverse_distance(const Vec2& A, const Vec2& B) { return core_value(segment_core(A, B)); }

double line_inverse_distance_integral(double a, double b, double c, double d) {
    return segment_inverse_distance(Vec2{a, c}, Vec2{a + b, c + d});
}

InverseDistanceGradient segment_inverse_distance_gradient(const Vec2& A, const Vec2& B) {
    const SegmentCore c = segment_core(A, B);
    InverseDistanceGradient g;
    g.value = core_value(c);
    const double x = c.L / c.S;
    // W = (2/L^3) (x/(1-x^2) - atanh x); the series avoids the cancellation at small x
    double W;
    if (x < 0.3) {
        const double y = x * x;
        double phi = 0.0, pw = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double term = (2.0 * k / (2.0 * k + 1.0)) * pw;
            phi += term;
            if (term < 1e-18 * phi) break;
            pw *= y;
        }
        W = 2.0 * phi / (c.S * c.S * c.S);
    } else {
        const double at = 0.5 * std::log((c.S + c.L) / c.smL);
        W = 2.0 / (c.L * c.L * c.L) * (c.L * c.S / (2.0 * c.half_gap) - at);
    }
    const double gS = -1.0 / c.half_gap;
    const Vec2 e = B - A;
    g.dA = (gS / c.ra) * A - W * e;
    g.dB = (gS / c.rb) * B + W * e;
    return g;
}

double segment_origin_distance(const Vec2& A, const Vec2& B) {
    const Vec2 e = B - A;
    const double ee = dot(e, e);
    if (ee == 0.0) return norm(A);
    const double s = std::clamp(-dot(A, e) / ee, 0.0, 1.0);
    return norm(A + s * e);
}

ActionBreakdown polyline_action(const PolylinePath& path) {
    ActionBreakdown out;
    const auto& t = path.times();
    const auto& q = path.nodes();
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        const double dt = t[k + 1] - t[k];
        out.kinetic += segment_kinetic(q[k], q[k + 1], dt);
        for (std::size_t p = 0; p < kPairs.size(); ++p) {
            const Pair pr = kPairs[p];
            const Vec2 A = q[k][pr.i] - q[k][pr.j];
            const Vec2 B = q[k + 1][pr.i] - q[k + 1][pr.j];
            double I;
            try {
                I = segment_inverse_distance(A, B);
            } catch (const DegenerateSegmentError& e) {
                throw DegenerateSegmentError(std::string(e.what()) + " (segment " + std::to_string(k) + ")",
                                             static_cast<int>(k), pr);
            } catch (const CollisionError& e) {
                throw CollisionError(std::string(e.what()) + " (segment " + std::to_string(k) + ", pair " +
                                         std::to_string(pr.i + 1) + "-" + std::to_string(pr.j + 1) + ")",
                                     static_cast<int>(k), pr);
            }
            out.potential += dt * I;
            const Vec2 rel = B - A;
            out.pairwise[p] += 0.5 * dot(rel, rel) / dt + 4.0 * dt * I;
        }
    }
    out.total = out.kinetic + out.potential;
    return out;
}

PairDistance path_min_pair_distance(const PolylinePath& path) {
    PairDistance best{INFINITY, kPairs[0]};
    const auto& q = path.nodes();
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        for (const Pair& pr : kPairs) {
            double d = segment_origin_distance(q[k][pr.i] - q[k][pr.j], q[k + 1][pr.i] - q[k + 1][pr.j]);
            if (d < best.distance) best = {d, pr};
        }
    }
    return best;
}

// ---- quadrature oracle: adaptive Gauss-Kronrod 7/15 ----

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct SegmentIntegrand {
    Configuration p, v;  // q(s) = p + s v, s in [0, 1]
    double kinetic_rate;  // constant K on the segment

    double operator()(double s) const {
        double u = kinetic_rate;
        for (const Pair& pr : kPairs) {
            const Vec2 r = (p[pr.i] - p[pr.j]) + s * (v[pr.i] - v[pr.j]);
            const double d = norm(r);
            if (d == 0.0) throw CollisionError("oracle hit an exact collision");
            u += 1.0 / d;
        }
        return u;
    }
};

void gk15(const SegmentIntegrand& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kWgk[7];
    double rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        rk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    result = rk * h;
    err = std::abs((rk - rg) * h);
}

double adaptive(const SegmentIntegrand& f, double a, double b, double tol, int depth, int max_depth) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= tol) return r;
    if (depth >= max_depth) {
        throw NonConvergenceError("quadrature oracle: depth limit reached (near-collision segment?)");
    }
    const double m = 0.5 * (a + b);
    return adaptive(f, a, m, 0.5 * tol, depth + 1, max_depth) + adaptive(f, m, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double action_quadrature_oracle(const PolylinePath& path, double tol, int max_depth) {
    if (!(tol > 0.0)) throw DomainError("oracle tolerance must be positive");
    const auto& t = path.times();
    const auto& q = path.nodes();
    const double seg_tol = tol / static_cast<double>(path.segments());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        const double dt = t[k + 1] - t[k];
        SegmentIntegrand f{q[k], q[k + 1] - q[k], segment_kinetic(q[k], q[k + 1], dt) / dt};
        // integrate in s = (t - t_k)/dt, so scale the tolerance and the result by dt
        total += dt * adaptive(f, 0.0, 1.0, seg_tol / dt, 0, max_depth);
    }
    return total;
}

}  // namespace fourbody
