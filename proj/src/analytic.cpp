#include "kert/analytic.hpp"

#include <cmath>
#include <numbers>

#include "kert/error.hpp"

namespace kert::analytic {

namespace {

void require_order(int n) {
    if (n < 1) throw InvalidInput("mode order must be >= 1");
}

}  // namespace

void ConcentricSpec::validate() const {
    if (!(r_i > 0.0 && r_i < R)) throw InvalidInput("concentric spec requires 0 < r_i < R");
    if (!(sigma_a > 0.0 && sigma_bg > 0.0)) throw InvalidInput("conductivities must be positive");
}

void CrownSpec::validate() const {
    if (!(r1 > 0.0 && r1 < r2 && r2 < r3)) throw InvalidInput("crown spec requires 0 < r1 < r2 < r3");
    if (!(sigma_a > 0.0 && sigma_bg > 0.0)) throw InvalidInput("conductivities must be positive");
}

double disk_ntd_eigenvalue(int n, double R, double sigma) {
    require_order(n);
    return R / (sigma * n);
}

double concentric_lambda(int n, const ConcentricSpec& s) {
    require_order(n);
    s.validate();
    const double q = std::pow(s.r_i / s.R, n);
    const double num = 2.0 * q * (s.sigma_bg - s.sigma_a);
    const double den = q * (s.sigma_a - s.sigma_bg) + (s.sigma_a + s.sigma_bg) / q;
    return s.R / (s.sigma_bg * n) * num / den;
}

double concentric_power_density(int n, double r, double R, double sigma_bg) {
    require_order(n);
    if (!(r >= 0.0 && r <= R)) throw InvalidInput("radius outside [0, R]");
    return std::pow(r / R, 2 * n - 2) / (sigma_bg * std::numbers::pi);
}

double concentric_region_power(int n, const ConcentricSpec& s) {
    require_order(n);
    s.validate();
    return std::pow(s.r_i / s.R, 2 * n) * s.R / (s.sigma_bg * n);
}

double reconstructed_radius(int n, double lambda, double R, double sigma_bg) {
    require_order(n);
    if (!(lambda > 0.0)) throw InvalidInput("eigenvalue must be positive");
    return R * std::pow(n * sigma_bg * lambda / (R * R), 1.0 / (2.0 * n));
}

double reconstructed_radius_unit_norm(int n, double lambda, double R, double sigma_bg) {
    require_order(n);
    if (!(lambda > 0.0)) throw InvalidInput("eigenvalue must be positive");
    return R * std::pow(n * sigma_bg * lambda / R, 1.0 / (2.0 * n));
}

double crown_lambda(int n, const CrownSpec& s) {
    require_order(n);
    s.validate();
    const double sa = s.sigma_a;
    const double sb = s.sigma_bg;
    const double a12 = std::pow(s.r1 / s.r2, n);
    const double a21 = 1.0 / a12;
    const double a23 = std::pow(s.r2 / s.r3, n);
    const double a32 = 1.0 / a23;
    const double num = 2.0 * a23 * (a12 - a21) * (sb * sb - sa * sa);
    const double den = a12 * (a32 * (sa - sb) * (sa - sb) + a23 * (sa * sa - sb * sb)) -
                       a21 * (a32 * (sa + sb) * (sa + sb) + a23 * (sa * sa - sb * sb));
    return s.r3 / (n * sb) * num / den;
}

double crown_outer_radius(int n, double lambda, double r3, double sigma_bg) {
    return reconstructed_radius(n, lambda, r3, sigma_bg);
}

double crown_outer_radius_unit_norm(int n, double lambda, double r3, double sigma_bg) {
    return reconstructed_radius_unit_norm(n, lambda, r3, sigma_bg);
}

}  // namespace kert::analytic
