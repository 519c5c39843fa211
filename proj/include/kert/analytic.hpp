#pragma once

namespace kert::analytic {

/// Disk of radius r_i and conductivity sigma_a centered in a disk of radius
/// R and conductivity sigma_bg. All lengths in meters.
struct ConcentricSpec {
    double r_i = 0.0;
    double R = 0.0;
    double sigma_a = 0.0;
    double sigma_bg = 0.0;

    void validate() const;
};

/// Crown r1 < r < r2 of conductivity sigma_a inside a disk of radius r3 of
/// conductivity sigma_bg.
struct CrownSpec {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double sigma_a = 0.0;
    double sigma_bg = 0.0;

    void validate() const;
};

/// NtD eigenvalue of a homogeneous disk for the mode cos(n theta): R/(sigma n).
double disk_ntd_eigenvalue(int n, double R, double sigma);

/// Eigenvalue of Lambda_D - Lambda_bg for the concentric configuration.
double concentric_lambda(int n, const ConcentricSpec& spec);

/// sigma_bg |grad u|^2 at radius r for the reference solve driven by
/// g = cos(n theta)/sqrt(pi): (1/(sigma_bg pi)) (r/R)^(2n-2).
double concentric_power_density(int n, double r, double R, double sigma_bg);

/// Power absorbed by the disk r < r_i in the reference configuration for the
/// L2(dOmega)-normalized drive cos(n theta)/sqrt(pi R):
/// r_i^(2n) / (sigma_bg n R^(2n-1)).
double concentric_region_power(int n, const ConcentricSpec& spec);

/// Reconstructed radius R (n sigma_bg lambda / R^2)^(1/(2n)) obtained when the
/// drive is normalized in the angular measure. Lengths in meters; the value
/// at finite n depends on that unit choice.
double reconstructed_radius(int n, double lambda, double R, double sigma_bg);

/// Radius of the threshold disk for an L2(dOmega)-normalized drive,
/// R (n sigma_bg lambda / R)^(1/(2n)). This is what a discrete
/// reconstruction converges to and is independent of the length unit.
double reconstructed_radius_unit_norm(int n, double lambda, double R, double sigma_bg);

/// Eigenvalue of Lambda_D - Lambda_bg for the crown configuration.
double crown_lambda(int n, const CrownSpec& spec);

/// Outer radius r3 (n sigma_bg lambda / r3^2)^(1/(2n)) of the crown
/// reconstruction (angular normalization, meters).
double crown_outer_radius(int n, double lambda, double r3, double sigma_bg);

/// Unit-free counterpart r3 (n sigma_bg lambda / r3)^(1/(2n)).
double crown_outer_radius_unit_norm(int n, double lambda, double r3, double sigma_bg);

}  // namespace kert::analytic
