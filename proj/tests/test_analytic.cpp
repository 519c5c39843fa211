#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "kert/analytic.hpp"
#include "kert/error.hpp"
#include "kert/spectral.hpp"
#include "fixtures.hpp"

using namespace kert;
using namespace kert::analytic;

namespace {

const ConcentricSpec kConc{0.04, 0.1, 1.0, 200.0};
const CrownSpec kCrown{0.02, 0.04, 0.1, 1.0, 200.0};

// Independent high-precision separation-of-variables evaluations.
constexpr double kConcLambda[] = {1.8822416646961456e-4,  1.3002180642105176e-5,  1.3572519144168264e-6,
                                  1.623150675907291e-7,   2.0765003862315067e-8,  2.7684257388831349e-9,
                                  3.7966451821021572e-10, 5.3152913889410591e-11};

double pair_mean(const SpectralDecomposition& d, int n) {
    return 0.5 * (d.eigenvalues[2 * n - 2] + d.eigenvalues[2 * n - 1]);
}

}  // namespace

TEST_CASE("homogeneous disk") {
    CHECK(disk_ntd_eigenvalue(1, 0.1, 200) == doctest::Approx(5e-4).epsilon(1e-15));
    CHECK(disk_ntd_eigenvalue(2, 0.1, 200) == doctest::Approx(2.5e-4).epsilon(1e-15));
    for (int n = 1; n < 100; ++n) CHECK(disk_ntd_eigenvalue(n + 1, 0.1, 200) < disk_ntd_eigenvalue(n, 0.1, 200));
    CHECK_THROWS_AS(disk_ntd_eigenvalue(0, 0.1, 200), InvalidInput);
}

TEST_CASE("concentric eigenvalues") {
    for (int n = 1; n <= 8; ++n) {
        CAPTURE(n);
        CHECK(concentric_lambda(n, kConc) == doctest::Approx(kConcLambda[n - 1]).epsilon(1e-13));
    }
    for (int n = 1; n < 40; ++n) CHECK(concentric_lambda(n + 1, kConc) < concentric_lambda(n, kConc));
    CHECK(concentric_lambda(3, {0.04, 0.1, 200.0, 200.0}) == 0.0);
    CHECK(concentric_lambda(1, {1e-9, 0.1, 1.0, 200.0}) < 1e-18);
    CHECK_THROWS_AS(concentric_lambda(1, {0.2, 0.1, 1.0, 200.0}), InvalidInput);
    CHECK_THROWS_AS(concentric_lambda(1, {0.04, 0.1, -1.0, 200.0}), InvalidInput);
}

TEST_CASE("concentric power density") {
    const double base = 1.0 / (200.0 * testing::kPi);
    CHECK(concentric_power_density(1, 0.03, 0.1, 200) == doctest::Approx(base).epsilon(1e-15));
    CHECK(concentric_power_density(1, 0.0, 0.1, 200) == doctest::Approx(base).epsilon(1e-15));
    CHECK(concentric_power_density(2, 0.0, 0.1, 200) == 0.0);
    CHECK(concentric_power_density(3, 0.1, 0.1, 200) == doctest::Approx(base).epsilon(1e-15));
    CHECK(concentric_region_power(3, kConc) == doctest::Approx(6.8266666666666667e-7).epsilon(1e-14));
}

TEST_CASE("reconstructed radius") {
    CHECK(reconstructed_radius(1, kConcLambda[0], 0.1, 200) == doctest::Approx(0.19402276488578064).epsilon(1e-13));
    CHECK(reconstructed_radius_unit_norm(1, kConcLambda[0], 0.1, 200) ==
          doctest::Approx(0.061355385496240599).epsilon(1e-13));
    CHECK(reconstructed_radius(10, concentric_lambda(10, kConc), 0.1, 200) ==
          doctest::Approx(0.046440227897405635).epsilon(1e-12));
    CHECK(reconstructed_radius_unit_norm(10, concentric_lambda(10, kConc), 0.1, 200) ==
          doctest::Approx(0.041389896680707713).epsilon(1e-12));
    CHECK(reconstructed_radius(20, concentric_lambda(20, kConc), 0.1, 200) ==
          doctest::Approx(0.043099989731845128).epsilon(1e-12));
    CHECK(reconstructed_radius_unit_norm(20, concentric_lambda(20, kConc), 0.1, 200) ==
          doctest::Approx(0.040689014074160011).epsilon(1e-12));

    // Eventually decreasing toward the true radius, from above.
    for (int n = 2; n < 60; ++n) {
        const double a = reconstructed_radius(n, concentric_lambda(n, kConc), 0.1, 200);
        const double b = reconstructed_radius(n + 1, concentric_lambda(n + 1, kConc), 0.1, 200);
        CHECK(b < a);
        CHECK(b > 0.04);
    }
    CHECK(reconstructed_radius(60, concentric_lambda(60, kConc), 0.1, 200) == doctest::Approx(0.04).epsilon(0.02));

    // The angular form depends on the length unit at finite n, the unit-norm form does not.
    const double cm_ang = reconstructed_radius(5, concentric_lambda(5, kConc) * 1e4, 10.0, 2.0) / 100.0;
    const double m_ang = reconstructed_radius(5, concentric_lambda(5, kConc), 0.1, 200.0);
    CHECK(std::abs(cm_ang - m_ang) > 1e-3 * m_ang);
    const double cm_unit = reconstructed_radius_unit_norm(5, concentric_lambda(5, kConc) * 1e4, 10.0, 2.0) / 100.0;
    CHECK(cm_unit == doctest::Approx(reconstructed_radius_unit_norm(5, concentric_lambda(5, kConc), 0.1, 200.0)));
    CHECK_THROWS_AS(reconstructed_radius(1, 0.0, 0.1, 200), InvalidInput);
}

TEST_CASE("crown eigenvalues and outer radius") {
    CHECK(crown_lambda(1, kCrown) == doctest::Approx(1.8675943654825692e-4).epsilon(1e-13));
    CHECK(crown_lambda(2, kCrown) == doctest::Approx(1.2984593948678975e-5).epsilon(1e-13));
    CHECK(crown_lambda(5, kCrown) == doctest::Approx(2.0764601894819658e-8).epsilon(1e-13));
    CHECK(crown_lambda(20, kCrown) == doctest::Approx(5.9844835349081239e-21).epsilon(1e-12));
    for (int n = 1; n < 30; ++n) {
        CHECK(crown_lambda(n, kCrown) > 0.0);
        CHECK(crown_lambda(n + 1, kCrown) < crown_lambda(n, kCrown));
    }
    CHECK(crown_lambda(2, {0.02, 0.04, 0.1, 200.0, 200.0}) == 0.0);
    double thinner = crown_lambda(2, kCrown);
    for (double t : {1e-2, 1e-4, 1e-6, 1e-9}) {
        const double l = crown_lambda(2, {0.04 * (1 - t), 0.04, 0.1, 1.0, 200.0});
        CHECK(l < thinner);
        thinner = l;
    }
    CHECK(thinner < 1e-6 * crown_lambda(2, kCrown));
    CHECK_THROWS_AS(crown_lambda(1, {0.04, 0.02, 0.1, 1.0, 200.0}), InvalidInput);

    const double r2_20 = crown_outer_radius(20, crown_lambda(20, kCrown), 0.1, 200);
    CHECK(r2_20 == doctest::Approx(0.043099989731845108).epsilon(1e-12));
    CHECK(std::abs(r2_20 - 0.04) / 0.04 < 0.15);
    CHECK(crown_outer_radius_unit_norm(20, crown_lambda(20, kCrown), 0.1, 200) ==
          doctest::Approx(0.040689014074159993).epsilon(1e-12));
    CHECK(crown_outer_radius(60, crown_lambda(60, kCrown), 0.1, 200) == doctest::Approx(0.04).epsilon(0.02));

    const CrownSpec small{0.005, 0.01, 0.025, 1.0, 200.0};
    CHECK(crown_outer_radius_unit_norm(10, crown_lambda(10, small), 0.025, 200) ==
          doctest::Approx(0.010347474160406744).epsilon(1e-12));
    CHECK(crown_outer_radius_unit_norm(15, crown_lambda(15, small), 0.025, 200) ==
          doctest::Approx(0.010230328213715074).epsilon(1e-12));
    CHECK(crown_outer_radius_unit_norm(20, crown_lambda(20, small), 0.025, 200) ==
          doctest::Approx(0.010172253518539998).epsilon(1e-12));
}

TEST_CASE("eigenvalues lie between the scaled region powers") {
    const double k_l = (200.0 - 1.0) / 200.0;
    const double k_u = (200.0 - 1.0) / 1.0;
    for (int n = 1; n <= 8; ++n) {
        CAPTURE(n);
        const double p = concentric_region_power(n, kConc);
        CHECK(k_l * p <= concentric_lambda(n, kConc));
        CHECK(concentric_lambda(n, kConc) <= k_u * p);
    }
}

TEST_CASE("FEM agrees with the concentric closed form up to the eighth mode") {
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    for (int n = 1; n <= 8; ++n) {
        CAPTURE(n);
        CHECK(pair_mean(dec, n) == doctest::Approx(concentric_lambda(n, kConc)).epsilon(0.02));
    }
}

TEST_CASE("FEM agrees with the concentric closed form up to the sixteenth mode" * doctest::may_fail()) {
    // The reference mesh trades accuracy at r = 0.4 R for accuracy at
    // the boundary; modes 13 to 16 are under-resolved there.
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    for (int n = 9; n <= 16; ++n) {
        const double rel = pair_mean(dec, n) / concentric_lambda(n, kConc) - 1.0;
        MESSAGE("n = " << n << " relative error " << rel);
        CHECK(std::abs(rel) <= 0.05);
    }
}

TEST_CASE("FEM agrees with the crown closed form") {
    const PhantomSpec crown{200.0, {Anomaly{Annulus{{0.0, 0.0}, 0.02, 0.04}, 1.0}}};
    const auto ops = testing::build_reference(crown, 0.1);
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    for (int n = 1; n <= 4; ++n) {
        CAPTURE(n);
        CHECK(pair_mean(dec, n) == doctest::Approx(crown_lambda(n, kCrown)).epsilon(0.02));
    }
}
