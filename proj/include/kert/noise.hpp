#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace kert {

struct NoiseSpec {
    double eta = 0.0;
    std::uint64_t seed = 0;
};

struct PerturbedOperator {
    Eigen::MatrixXd matrix;
    double delta = 0.0;            // eta * delta_r * ||N||, the L2(dOmega) norm of the added term
    double delta_r = 0.0;          // max_ij |C_ij| of the input in orthonormal coordinates
    double noise_norm_l2 = 0.0;    // ||N||_2 in orthonormal coordinates, equal to its L2(dOmega) norm
    double noise_norm_coord = 0.0; // ||S N S||_2 as seen in the original coordinates
};

/// Symmetric square root S of the Gram matrix and its inverse. The columns
/// of S^{-1} are the L2(dOmega)-orthonormal combinations of the basis
/// closest to the basis itself.
struct OrthonormalFrame {
    Eigen::MatrixXd root;
    Eigen::MatrixXd inverse_root;

    static OrthonormalFrame for_gram(const Eigen::MatrixXd& gram);
};

/// L2(dOmega) operator norm of the symmetric form n against the Gram
/// matrix: max |mu| over n v = mu G v.
double operator_norm(const Eigen::MatrixXd& n, const Eigen::MatrixXd& gram);

/// Draws the symmetric Gaussian matrix (A + A')/2 with A_ij ~ N(0,1).
/// Entries are drawn row-major from std::mt19937_64 seeded with `seed`,
/// through std::normal_distribution<double>.
Eigen::MatrixXd gaussian_symmetric(Eigen::Index n, std::uint64_t seed);

/// Adds eta delta_r N to the operator expressed in orthonormal coordinates,
/// C = S^{-1} D S^{-1}, with delta_r = max |C_ij|, and maps the result back
/// to the original coordinates. eta = 0 returns the input unchanged.
PerturbedOperator perturb(const Eigen::MatrixXd& difference, const Eigen::MatrixXd& gram, const NoiseSpec& spec);

}  // namespace kert
