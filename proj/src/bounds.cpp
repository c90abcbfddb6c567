#include "fourbody/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fourbody/errors.hpp"

namespace fourbody {

namespace {

constexpr double kPi = std::numbers::pi;

// x^(2/3) without pow's domain surprises
double p23(double x) {
    const double c = std::cbrt(x);
    return c * c;
}

const double k16 = std::cbrt(16.0);

void check_domain(double theta) {
    if (!(theta > 0.0) || theta > kBoundThetaMax * kPi * (1.0 + 1e-15)) {
        throw DomainError("collision bounds are only valid for theta in (0, pi/10], got " + std::to_string(theta));
    }
}

}  // namespace

double kepler_lower_bound(const KeplerParams& p, bool collision) {
    if (!(p.mu > 0.0) || !(p.alpha > 0.0) || !(p.T > 0.0)) {
        throw DomainError("kepler_lower_bound: mu, alpha, T must be positive");
    }
    if (!(p.theta > 0.0) || p.theta > kPi) throw DomainError("kepler_lower_bound: theta must lie in (0, pi]");
    const double th = collision ? kPi : p.theta;
    return 1.5 * std::cbrt(p.mu * p.alpha * p.alpha * th * th * p.T);
}

double total_collision_bound() {
    return 6.0 / 4.0 * kepler_lower_bound(KeplerParams{1.0, 4.0, kPi, 1.0}, true);
}

double g1(double theta) {
    check_domain(theta);
    return 3.0 / 8.0 * k16 * (std::cbrt(2.0 * kPi * kPi) + 2.0 * p23(2.0 * theta));
}

double g2(double theta) {
    check_domain(theta);
    return 3.0 / 8.0 * k16 * (p23(kPi) + p23(theta) + 2.0 * p23(2.0 * theta));
}

double g_bound(Variant v, double theta) { return v == Variant::E1 ? g1(theta) : g2(theta); }

int case_count(Variant v) { return v == Variant::E1 ? 5 : 4; }

double case_bound(Variant v, int case_id, double th, Case2Coefficient coef) {
    check_domain(th);
    const double c2pi2 = std::cbrt(2.0 * kPi * kPi);
    if (v == Variant::E1) {
        switch (case_id) {
            case 1:
                return 3.0 / 16.0 * k16 *
                       (2.0 * c2pi2 + p23(kPi / 2 + 2 * th) + p23(kPi / 2 + 3 * th) + p23(th));
            case 2:
                return 3.0 / 16.0 * k16 *
                       (2.0 * c2pi2 + p23(kPi / 2 + 2 * th) + p23(kPi / 2 - 3 * th) + p23(kPi - th));
            case 3:
                return 3.0 / 8.0 * k16 * (c2pi2 + 2.0 * p23(2 * th));
            case 4:
                return 3.0 / 8.0 * k16 * (c2pi2 + 2.0 * p23(th) + p23(2 * th));
            case 5:
                return 3.0 / 4.0 * k16 * p23(kPi);
            default:
                break;
        }
    } else {
        switch (case_id) {
            case 1:
            case 3:
                return 3.0 / 8.0 * k16 * (p23(kPi) + p23(th) + 2.0 * p23(2 * th));
            case 2: {
                const double lead = coef == Case2Coefficient::Repaired ? 3.0 / 8.0 : 3.0 / 2.0;
                return lead * k16 * (p23(4 * th) + p23(kPi / 2 + th) + p23(kPi));
            }
            case 4:
                return 3.0 / 8.0 * k16 * (p23(kPi) + p23(kPi / 2 + th) + 2.0 * p23(2 * th));
            default:
                break;
        }
    }
    throw DomainError("unknown case " + std::to_string(case_id) + " for variant " + to_string(v));
}

}  // namespace fourbody
