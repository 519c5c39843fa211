#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "kert/analytic.hpp"
#include "kert/error.hpp"
#include "kert/noise.hpp"
#include "kert/spectral.hpp"
#include "fixtures.hpp"

using namespace kert;

namespace {

SpectralDecomposition from_values(std::initializer_list<double> values) {
    SpectralDecomposition d;
    d.eigenvalues = Eigen::VectorXd(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) d.eigenvalues[i++] = v;
    return d;
}

SpectralDecomposition from_vector(const Eigen::VectorXd& v) {
    SpectralDecomposition d;
    d.eigenvalues = v;
    return d;
}

}  // namespace

TEST_CASE("identity and zero operators") {
    const Mesh m = generate_disk_mesh(0.1, 64, 16);
    const ZeroMeanBasis b = ZeroMeanBasis::for_mesh(m);
    const SpectralDecomposition id = eigendecompose(b.gram, b.gram);
    CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-12);
    const SpectralDecomposition zero = eigendecompose(Eigen::MatrixXd::Zero(63, 63), b.gram);
    CHECK(zero.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bad inputs are rejected") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(m, g), InvalidInput);
    g(3, 3) = -1.0;
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd::Identity(4, 4), g), InvalidInput);
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(3, 3)), InvalidInput);
    CHECK_THROWS_AS(noise_floor(from_values({1, 2, 3})), InvalidInput);
    CHECK_THROWS_AS(weyl_check(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(4), 1.0), InvalidInput);
}

TEST_CASE("concentric spectrum: pairs and closed form") {
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    const analytic::ConcentricSpec spec{0.04, 0.1, 1.0, 200.0};
    CHECK(dec.max_residual <= 1e-10);
    for (int n = 1; n <= 8; ++n) {
        CAPTURE(n);
        const double a = dec.eigenvalues[2 * n - 2];
        const double b = dec.eigenvalues[2 * n - 1];
        CHECK(std::abs(a - b) <= 0.01 * a);
        CHECK(0.5 * (a + b) == doctest::Approx(analytic::concentric_lambda(n, spec)).epsilon(0.02));
    }
}

TEST_CASE("eigenvectors are L2 orthonormal zero-mean currents") {
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    const Eigen::MatrixXd& v = dec.eigenvectors;
    const Eigen::MatrixXd gram = v.transpose() * ops.difference.basis.gram * v;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index k = 0; k < dec.size(); k += 17) {
        CHECK(std::abs(total_current(ops.mesh, dec.eigenfunction(ops.difference.basis, k))) < 1e-12);
    }
    for (Eigen::Index k = 1; k < dec.size(); ++k) CHECK(dec.eigenvalues[k] <= dec.eigenvalues[k - 1]);
    for (Eigen::Index k = 0; k < dec.size(); ++k) {
        Eigen::Index i = 0;
        v.col(k).cwiseAbs().maxCoeff(&i);
        CHECK(v(i, k) > 0.0);
    }
}

TEST_CASE("decomposition reconstructs the operator") {
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    const Eigen::MatrixXd& g = ops.difference.basis.gram;
    const Eigen::MatrixXd back = g * dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose() * g;
    CHECK((back - ops.difference.matrix).norm() <= 1e-8 * ops.difference.matrix.norm());
}

TEST_CASE("noise floor estimates") {
    CHECK(noise_floor(from_values({1, 2, 3}), 3e-7) == 3e-7);
    CHECK_THROWS_AS(noise_floor(from_values({1}), -1.0), InvalidInput);

    Eigen::VectorXd plateau(40);
    for (Eigen::Index k = 0; k < 40; ++k) plateau[k] = k < 10 ? std::pow(10.0, -k * 0.5) : 1e-6;
    CHECK(noise_floor(from_vector(plateau)) == 1e-6);

    // A clean, strictly decaying spectrum from the closed form has no plateau:
    // the estimate falls below the retained head.
    const analytic::ConcentricSpec spec{0.04, 0.1, 1.0, 200.0};
    Eigen::VectorXd clean(24);
    for (int n = 1; n <= 12; ++n) clean[2 * n - 2] = clean[2 * n - 1] = analytic::concentric_lambda(n, spec);
    const SpectralDecomposition d = from_vector(clean);
    const double est = noise_floor(d);
    const Eigen::Index k = select_eigenindex(d, est);
    CHECK(est < clean[k]);
    CHECK(k >= 11);
}

TEST_CASE("eigen-index selection") {
    CHECK(select_eigenindex(from_values({1, 0.1, 0.01, 1e-6, 1e-6}), 1e-6, 2.0) == 2);
    CHECK(select_eigenindex(from_values({1, 0.1, 0.01, 1e-6, 1e-6}), 0.0) == 4);
    CHECK_THROWS_AS(select_eigenindex(from_values({1e-6, 1e-6}), 1e-6, 2.0), NoUsableEigenpair);
    CHECK_THROWS_AS(select_eigenindex(from_values({0.0, 0.0}), 0.0), NoUsableEigenpair);
    CHECK_THROWS_AS(select_eigenindex(from_values({1.0}), -1.0), InvalidInput);
    CHECK_THROWS_AS(select_eigenindex(from_values({1.0}), 0.1, 0.5), InvalidInput);

    // Without noise the machine floor decides.
    const auto& ops = testing::concentric_reference();
    const SpectralDecomposition dec = eigendecompose(ops.difference);
    const Eigen::Index k = select_eigenindex(dec, 0.0);
    const double floor = machine_floor(dec);
    CHECK(floor == doctest::Approx(255 * std::numeric_limits<double>::epsilon() * dec.eigenvalues[0]));
    CHECK(dec.eigenvalues[k] >= 2.0 * floor);
    for (Eigen::Index j = k + 1; j < dec.size(); ++j) CHECK(dec.eigenvalues[j] < 2.0 * floor);
}

TEST_CASE("selection on a perturbed concentric spectrum") {
    const auto& ops = testing::concentric_reference();
    const PerturbedOperator p = perturb(ops.difference.matrix, ops.difference.basis.gram, {1e-3, 5});
    const SpectralDecomposition dec = eigendecompose(p.matrix, ops.difference.basis.gram);
    const Eigen::Index k = select_eigenindex(dec, p.delta);
    CHECK(dec.eigenvalues[k] >= 2.0 * p.delta);
    CHECK(dec.eigenvalues[k + 1] < 2.0 * p.delta);
}

TEST_CASE("Weyl check") {
    const Eigen::VectorXd clean = (Eigen::VectorXd(4) << 4.0, 3.0, 2.0, 1.0).finished();
    const WeylReport same = weyl_check(clean, clean, 0.0);
    CHECK(same.pass);
    CHECK(same.worst_deviation == 0.0);
    const WeylReport shifted = weyl_check(clean, (clean.array() + 0.25).matrix(), 0.25);
    CHECK(shifted.pass);
    CHECK(shifted.worst_deviation == doctest::Approx(0.25));
    Eigen::VectorXd bumped = clean;
    bumped[2] += 0.3;
    const WeylReport fail = weyl_check(clean, bumped, 0.25);
    CHECK_FALSE(fail.pass);
    CHECK(fail.worst_index == 2);

    const auto& ops = testing::concentric_reference();
    const Eigen::VectorXd base = eigendecompose(ops.difference).eigenvalues;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PerturbedOperator p = perturb(ops.difference.matrix, ops.difference.basis.gram, {1e-2, seed});
        CHECK(weyl_check(base, eigendecompose(p.matrix, ops.difference.basis.gram).eigenvalues, p.delta).pass);
    }
}
