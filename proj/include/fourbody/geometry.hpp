#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace fourbody {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
double norm(const Vec2& a);

// Row-vector convention: v * M.
struct Mat2 {
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

    friend Mat2 operator*(const Mat2& a, const Mat2& b);
    Mat2 transpose() const { return {m00, m10, m01, m11}; }
    double det() const { return m00 * m11 - m01 * m10; }
};

inline Vec2 operator*(const Vec2& v, const Mat2& m) {
    return {v.x * m.m00 + v.y * m.m10, v.x * m.m01 + v.y * m.m11};
}

// B = diag(1, -1), reflection across the x-axis.
inline constexpr Mat2 kReflectX{1.0, 0.0, 0.0, -1.0};

using Configuration = std::array<Vec2, 4>;

Configuration operator*(const Configuration& q, const Mat2& m);
Configuration operator+(const Configuration& a, const Configuration& b);
Configuration operator-(const Configuration& a, const Configuration& b);
Configuration operator*(double s, const Configuration& q);

Vec2 center_of_mass_sum(const Configuration& q);
bool is_centered(const Configuration& q, double tol = 1e-12);
// q4 = -(q1 + q2 + q3)
Configuration complete_configuration(const Vec2& q1, const Vec2& q2, const Vec2& q3);

struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;
};

// theta = (p/q) pi, or an irrational angle carried only as radians.
class RotationAngle {
public:
    RotationAngle() = default;
    static RotationAngle pi_fraction(std::int64_t p, std::int64_t q);
    static RotationAngle irrational(double radians);
    // "<p>/<q>pi", "<p>pi", "0"
    static RotationAngle parse(std::string_view text);

    bool is_rational() const { return ratio_.has_value(); }
    const Rational& ratio() const;
    double radians() const { return radians_; }
    double over_pi() const;
    RotationAngle scaled(std::int64_t k) const;
    std::string str() const;

    friend bool operator==(const RotationAngle& a, const RotationAngle& b);

private:
    std::optional<Rational> ratio_ = Rational{};
    double radians_ = 0.0;
};

Mat2 rotation(double radians);
// Exact reduction of (p/q) pi mod 2 pi before taking cos/sin.
Mat2 rotation(const RotationAngle& theta);

enum class Side { Start, EndE1, EndE2 };
enum class Variant { E1, E2 };

Side end_side(Variant v);
std::string to_string(Variant v);
Variant parse_variant(std::string_view s);

struct BoundaryParams {
    Side side = Side::Start;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    RotationAngle theta;
};

Configuration build_boundary(const BoundaryParams& params);

// d q / d(a, b, c) for the side's family, in the rotated frame.
std::array<Configuration, 3> boundary_jacobian(Side side, const RotationAngle& theta);

struct FamilyFit {
    BoundaryParams params;
    double residual = 0.0;  // max coordinate deviation from build_boundary(params)
};

// Least-squares projection of a configuration onto a boundary family (b, c unconstrained).
FamilyFit fit_boundary(const Configuration& q, Side side, const RotationAngle& theta);
bool in_family(const Configuration& q, Side side, const RotationAngle& theta, double tol = 1e-6);

struct Pair {
    int i = 0;
    int j = 1;
    friend bool operator==(const Pair&, const Pair&) = default;
};

inline constexpr std::array<Pair, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct PairDistance {
    double distance = 0.0;
    Pair pair;
};

PairDistance min_pair_distance(const Configuration& q);
bool is_collision_free(const Configuration& q, double tol = 1e-8);

double max_abs_diff(const Configuration& a, const Configuration& b);

}  // namespace fourbody
