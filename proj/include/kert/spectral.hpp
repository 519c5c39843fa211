#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "kert/ntd.hpp"

namespace kert {

/// Solution of M v = lambda G v with eigenvalues sorted non-increasing and
/// eigenvectors G-orthonormal, i.e. orthonormal in L2(dOmega) once mapped to
/// boundary currents. Each eigenvector's largest-magnitude coordinate is
/// positive.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // coordinates, one column per eigenvalue
    std::string gram_tag;
    double max_residual = 0.0;     // max_k ||M v_k - lambda_k G v_k|| / ||M||

    Eigen::Index size() const { return eigenvalues.size(); }
    BoundaryCurrent eigenfunction(const ZeroMeanBasis& basis, Eigen::Index k) const {
        return basis.to_current(eigenvectors.col(k));
    }
};

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gram, std::string gram_tag = {});
SpectralDecomposition eigendecompose(const NtDMatrix& m);

/// Noise level used for eigen-selection: known_delta when supplied,
/// otherwise the median of |lambda| over the trailing half of the spectrum.
double noise_floor(const SpectralDecomposition& dec, std::optional<double> known_delta = std::nullopt);

/// Round-off floor of a decomposition: n * machine epsilon * max |lambda|.
double machine_floor(const SpectralDecomposition& dec);

/// Largest (0-based) index k with lambda_k >= safety * max(delta, machine
/// floor). Throws NoUsableEigenpair when no eigenvalue clears the floor.
Eigen::Index select_eigenindex(const SpectralDecomposition& dec, double delta, double safety = 2.0);

struct WeylReport {
    double worst_deviation = 0.0;
    Eigen::Index worst_index = 0;
    bool pass = true;
};

/// Checks |noisy_k - clean_k| <= delta for two descending spectra.
WeylReport weyl_check(std::span<const double> clean, std::span<const double> noisy, double delta);
WeylReport weyl_check(const Eigen::VectorXd& clean, const Eigen::VectorXd& noisy, double delta);

}  // namespace kert
