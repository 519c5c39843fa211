#include "kert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "kert/error.hpp"

namespace kert {

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gram, std::string gram_tag) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n || gram.rows() != n || gram.cols() != n) {
        throw InvalidInput("eigendecompose: operator and Gram matrix must be square and of equal size");
    }
    const double m_norm = m.norm();
    if (m_norm > 0.0 && (m - m.transpose()).norm() > 1e-10 * m_norm) {
        throw InvalidInput("eigendecompose: operator is not symmetric");
    }
    if ((gram - gram.transpose()).norm() > 1e-12 * gram.norm()) {
        throw InvalidInput("eigendecompose: Gram matrix is not symmetric");
    }
    const Eigen::LLT<Eigen::MatrixXd> chol(gram);
    if (chol.info() != Eigen::Success) throw InvalidInput("eigendecompose: Gram matrix is not positive definite");

    // G = L L'; solve L^{-1} M L^{-T} y = lambda y, v = L^{-T} y.
    const Eigen::MatrixXd& l = chol.matrixLLT();
    Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(m);
    c = l.triangularView<Eigen::Lower>().solve(c.transpose()).eval();
    c = 0.5 * (c + c.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigendecompose: symmetric eigensolver did not converge");
    const Eigen::MatrixXd v = l.transpose().triangularView<Eigen::Upper>().solve(solver.eigenvectors());

    // Eigen returns ascending order; re-sort descending with ties kept in
    // first-occurrence order of the descending sequence.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::reverse(order.begin(), order.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return solver.eigenvalues()[a] > solver.eigenvalues()[b]; });

    SpectralDecomposition dec;
    dec.gram_tag = std::move(gram_tag);
    dec.eigenvalues.resize(n);
    dec.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        dec.eigenvalues[k] = solver.eigenvalues()[order[static_cast<std::size_t>(k)]];
        Eigen::VectorXd vk = v.col(order[static_cast<std::size_t>(k)]);
        Eigen::Index imax = 0;
        vk.cwiseAbs().maxCoeff(&imax);
        if (vk[imax] < 0.0) vk = -vk;
        dec.eigenvectors.col(k) = vk;
    }

    const double scale = std::max(m_norm, std::numeric_limits<double>::min());
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::VectorXd vk = dec.eigenvectors.col(k);
        const double r = (m * vk - dec.eigenvalues[k] * (gram * vk)).norm() / scale;
        dec.max_residual = std::max(dec.max_residual, m_norm > 0.0 ? r : 0.0);
    }
    if (dec.max_residual > 1e-10) {
        throw NumericalFailure("eigendecompose: residual " + std::to_string(dec.max_residual) + " exceeds 1e-10");
    }
    return dec;
}

SpectralDecomposition eigendecompose(const NtDMatrix& m) { return eigendecompose(m.matrix, m.basis.gram, m.basis.tag); }

double noise_floor(const SpectralDecomposition& dec, std::optional<double> known_delta) {
    if (known_delta) {
        if (*known_delta < 0.0) throw InvalidInput("noise level must be non-negative");
        return *known_delta;
    }
    const Eigen::Index n = dec.size();
    if (n < 8) throw InvalidInput("noise_floor needs at least 8 eigenvalues");
    const Eigen::Index half = n / 2;
    std::vector<double> tail(static_cast<std::size_t>(half));
    for (Eigen::Index i = 0; i < half; ++i) tail[static_cast<std::size_t>(i)] = std::abs(dec.eigenvalues[n - half + i]);
    std::sort(tail.begin(), tail.end());
    const std::size_t mid = tail.size() / 2;
    return tail.size() % 2 == 1 ? tail[mid] : 0.5 * (tail[mid - 1] + tail[mid]);
}

double machine_floor(const SpectralDecomposition& dec) {
    if (dec.size() == 0) return 0.0;
    return static_cast<double>(dec.size()) * std::numeric_limits<double>::epsilon() *
           dec.eigenvalues.cwiseAbs().maxCoeff();
}

Eigen::Index select_eigenindex(const SpectralDecomposition& dec, double delta, double safety) {
    if (delta < 0.0) throw InvalidInput("noise level must be non-negative");
    if (safety < 1.0) throw InvalidInput("plateau safety factor must be >= 1");
    const double threshold = safety * std::max(delta, machine_floor(dec));
    for (Eigen::Index k = dec.size() - 1; k >= 0; --k) {
        if (dec.eigenvalues[k] >= threshold && dec.eigenvalues[k] > 0.0) return k;
    }
    throw NoUsableEigenpair("all eigenvalues at noise floor");
}

WeylReport weyl_check(std::span<const double> clean, std::span<const double> noisy, double delta) {
    if (clean.size() != noisy.size()) throw InvalidInput("weyl_check: spectra have different lengths");
    WeylReport report;
    for (std::size_t k = 0; k < clean.size(); ++k) {
        const double d = std::abs(noisy[k] - clean[k]);
        if (d > report.worst_deviation) {
            report.worst_deviation = d;
            report.worst_index = static_cast<Eigen::Index>(k);
        }
    }
    report.pass = report.worst_deviation <= delta * (1.0 + 1e-12);
    return report;
}

WeylReport weyl_check(const Eigen::VectorXd& clean, const Eigen::VectorXd& noisy, double delta) {
    return weyl_check(std::span<const double>(clean.data(), static_cast<std::size_t>(clean.size())),
                      std::span<const double>(noisy.data(), static_cast<std::size_t>(noisy.size())), delta);
}

}  // namespace kert
