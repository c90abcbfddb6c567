#include "fourbody/geometry.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fourbody/errors.hpp"

namespace fourbody {

double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

Configuration operator*(const Configuration& q, const Mat2& m) {
    return {q[0] * m, q[1] * m, q[2] * m, q[3] * m};
}

Configuration operator+(const Configuration& a, const Configuration& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

Configuration operator-(const Configuration& a, const Configuration& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

Configuration operator*(double s, const Configuration& q) {
    return {s * q[0], s * q[1], s * q[2], s * q[3]};
}

Vec2 center_of_mass_sum(const Configuration& q) { return q[0] + q[1] + q[2] + q[3]; }

bool is_centered(const Configuration& q, double tol) {
    Vec2 s = center_of_mass_sum(q);
    return std::abs(s.x) <= tol && std::abs(s.y) <= tol;
}

Configuration complete_configuration(const Vec2& q1, const Vec2& q2, const Vec2& q3) {
    return {q1, q2, q3, -(q1 + q2 + q3)};
}

double max_abs_diff(const Configuration& a, const Configuration& b) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i) {
        m = std::max({m, std::abs(a[i].x - b[i].x), std::abs(a[i].y - b[i].y)});
    }
    return m;
}

// ---- RotationAngle ----

RotationAngle RotationAngle::pi_fraction(std::int64_t p, std::int64_t q) {
    if (q == 0) throw DomainError("rotation angle: zero denominator");
    if (q < 0) { p = -p; q = -q; }
    if (p == 0) {
        q = 1;
    } else {
        std::int64_t g = std::gcd(p < 0 ? -p : p, q);
        p /= g;
        q /= g;
    }
    RotationAngle r;
    r.ratio_ = Rational{p, q};
    r.radians_ = std::numbers::pi * static_cast<double>(p) / static_cast<double>(q);
    return r;
}

RotationAngle RotationAngle::irrational(double radians) {
    if (!std::isfinite(radians)) throw DomainError("rotation angle: non-finite value");
    RotationAngle r;
    r.ratio_.reset();
    r.radians_ = radians;
    return r;
}

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw DomainError("expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

RotationAngle RotationAngle::parse(std::string_view text) {
    std::string_view s = trim(text);
    if (s == "0") return pi_fraction(0, 1);
    if (s.size() < 2 || s.substr(s.size() - 2) != "pi") {
        throw DomainError("angle must look like <p>/<q>pi, got '" + std::string(text) + "'");
    }
    s.remove_suffix(2);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) {
        if (s.empty() || s == "+") return pi_fraction(1, 1);
        if (s == "-") return pi_fraction(-1, 1);
        return pi_fraction(parse_int(s), 1);
    }
    return pi_fraction(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

const Rational& RotationAngle::ratio() const {
    if (!ratio_) throw DomainError("rotation angle is irrational");
    return *ratio_;
}

double RotationAngle::over_pi() const { return radians_ / std::numbers::pi; }

RotationAngle RotationAngle::scaled(std::int64_t k) const {
    if (!ratio_) return irrational(radians_ * static_cast<double>(k));
    return pi_fraction(ratio_->p * k, ratio_->q);
}

std::string RotationAngle::str() const {
    if (!ratio_) return std::to_string(radians_) + " (irrational)";
    if (ratio_->p == 0) return "0";
    return std::to_string(ratio_->p) + "/" + std::to_string(ratio_->q) + "pi";
}

bool operator==(const RotationAngle& a, const RotationAngle& b) {
    if (a.ratio_ && b.ratio_) return a.ratio_->p == b.ratio_->p && a.ratio_->q == b.ratio_->q;
    if (!a.ratio_ && !b.ratio_) return a.radians_ == b.radians_;
    return false;
}

Mat2 rotation(double radians) {
    double c = std::cos(radians), s = std::sin(radians);
    return {c, s, -s, c};
}

Mat2 rotation(const RotationAngle& theta) {
    if (!theta.is_rational()) return rotation(theta.radians());
    const Rational& r = theta.ratio();
    // p/q mod 2, kept in (-1, 1] so multiples of pi/2 come out exact
    std::int64_t two_q = 2 * r.q;
    std::int64_t p = r.p % two_q;
    if (p < 0) p += two_q;
    if (p > r.q) p -= two_q;
    if (p == 0) return {};
    if (2 * p == r.q) return {0.0, 1.0, -1.0, 0.0};
    if (2 * p == -r.q) return {0.0, -1.0, 1.0, 0.0};
    if (p == r.q) return {-1.0, 0.0, 0.0, -1.0};
    return rotation(std::numbers::pi * static_cast<double>(p) / static_cast<double>(r.q));
}

// ---- boundary families ----

Side end_side(Variant v) { return v == Variant::E1 ? Side::EndE1 : Side::EndE2; }

std::string to_string(Variant v) { return v == Variant::E1 ? "e1" : "e2"; }

Variant parse_variant(std::string_view s) {
    if (s == "e1" || s == "E1") return Variant::E1;
    if (s == "e2" || s == "E2") return Variant::E2;
    throw DomainError("unknown variant '" + std::string(s) + "'");
}

Configuration build_boundary(const BoundaryParams& p) {
    if (p.b < 0.0 || p.c < 0.0) throw DomainError("boundary parameters b and c must be >= 0");
    const double a = p.a, b = p.b, c = p.c;
    switch (p.side) {
        case Side::Start: {
            const double m = (2.0 * a + c) / 2.0;
            return {Vec2{-a - c, 0.0}, Vec2{-a, 0.0}, Vec2{m, b}, Vec2{m, -b}};
        }
        case Side::EndE1: {
            Configuration q{Vec2{-b, -a}, Vec2{-c, a}, Vec2{c, a}, Vec2{b, -a}};
            return q * rotation(p.theta);
        }
        case Side::EndE2: {
            Configuration q{Vec2{-a, -b}, Vec2{-a, b}, Vec2{a, c}, Vec2{a, -c}};
            return q * rotation(p.theta);
        }
    }
    return {};
}

std::array<Configuration, 3> boundary_jacobian(Side side, const RotationAngle& theta) {
    std::array<Configuration, 3> j{};
    switch (side) {
        case Side::Start:
            j[0] = {Vec2{-1, 0}, Vec2{-1, 0}, Vec2{1, 0}, Vec2{1, 0}};
            j[1] = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 1}, Vec2{0, -1}};
            j[2] = {Vec2{-1, 0}, Vec2{0, 0}, Vec2{0.5, 0}, Vec2{0.5, 0}};
            return j;
        case Side::EndE1:
            j[0] = {Vec2{0, -1}, Vec2{0, 1}, Vec2{0, 1}, Vec2{0, -1}};
            j[1] = {Vec2{-1, 0}, Vec2{0, 0}, Vec2{0, 0}, Vec2{1, 0}};
            j[2] = {Vec2{0, 0}, Vec2{-1, 0}, Vec2{1, 0}, Vec2{0, 0}};
            break;
        case Side::EndE2:
            j[0] = {Vec2{-1, 0}, Vec2{-1, 0}, Vec2{1, 0}, Vec2{1, 0}};
            j[1] = {Vec2{0, -1}, Vec2{0, 1}, Vec2{0, 0}, Vec2{0, 0}};
            j[2] = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 1}, Vec2{0, -1}};
            break;
    }
    const Mat2 r = rotation(theta);
    for (auto& col : j) col = col * r;
    return j;
}

FamilyFit fit_boundary(const Configuration& q, Side side, const RotationAngle& theta) {
    // The family is linear in (a, b, c): solve the 3x3 normal equations (Cramer).
    auto jac = boundary_jacobian(side, theta);
    double g[3][3], rhs[3];
    for (int k = 0; k < 3; ++k) {
        rhs[k] = 0.0;
        for (int i = 0; i < 4; ++i) rhs[k] += dot(jac[k][i], q[i]);
        for (int l = 0; l < 3; ++l) {
            g[k][l] = 0.0;
            for (int i = 0; i < 4; ++i) g[k][l] += dot(jac[k][i], jac[l][i]);
        }
    }
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det3(g);
    double coef[3];
    for (int k = 0; k < 3; ++k) {
        double mk[3][3];
        for (int r = 0; r < 3; ++r)
            for (int l = 0; l < 3; ++l) mk[r][l] = (l == k) ? rhs[r] : g[r][l];
        coef[k] = det3(mk) / d;
    }
    FamilyFit fit;
    fit.params = BoundaryParams{side, coef[0], coef[1], coef[2], theta};
    Configuration model{};
    for (int k = 0; k < 3; ++k) model = model + coef[k] * jac[k];
    fit.residual = max_abs_diff(model, q);
    return fit;
}

bool in_family(const Configuration& q, Side side, const RotationAngle& theta, double tol) {
    FamilyFit f = fit_boundary(q, side, theta);
    return f.residual <= tol && f.params.b >= -tol && f.params.c >= -tol;
}

PairDistance min_pair_distance(const Configuration& q) {
    PairDistance best{INFINITY, kPairs[0]};
    for (const Pair& pr : kPairs) {
        double d = norm(q[pr.i] - q[pr.j]);
        if (d < best.distance) best = {d, pr};
    }
    return best;
}

bool is_collision_free(const Configuration& q, double tol) {
    return min_pair_distance(q).distance > tol;
}

}  // namespace fourbody
