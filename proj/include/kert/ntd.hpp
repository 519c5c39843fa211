#pragma once

#include <string>

#include <Eigen/Core>

#include "kert/fem.hpp"

namespace kert {

/// Coordinates for zero-mean piecewise-constant boundary currents.
///
/// Basis vector k (k = 0..N_b-2) is the indicator of edge k minus its
/// length-weighted mean, b_k = chi_k - len_k / |dOmega|. The basis is not
/// orthogonal in L2(dOmega); its Gram matrix
///   G_kl = len_k delta_kl - len_k len_l / |dOmega|
/// is carried explicitly so that every eigenproblem is posed against it.
struct ZeroMeanBasis {
    Eigen::VectorXd edge_lengths;
    double perimeter = 0.0;
    Eigen::MatrixXd gram;
    std::string tag;

    static ZeroMeanBasis for_mesh(const Mesh& mesh);

    Eigen::Index dimension() const { return gram.rows(); }
    std::size_t edge_count() const { return static_cast<std::size_t>(edge_lengths.size()); }

    BoundaryCurrent to_current(const Eigen::VectorXd& coords) const;
    /// Coordinates of a zero-mean current: v_k = g_k - g_{N_b-1}.
    Eigen::VectorXd coordinates(const BoundaryCurrent& g) const;

    bool same_as(const ZeroMeanBasis& other) const;
};

/// Discrete Neumann-to-Dirichlet map as the matrix of its quadratic form in
/// the zero-mean basis: v' M w = <g_v, Lambda g_w>_{L2(dOmega)}.
struct NtDMatrix {
    Eigen::MatrixXd matrix;
    ZeroMeanBasis basis;
    double radius = 0.0;
    double symmetry_defect = 0.0;  // ||M - M'|| / ||M|| before symmetrization
};

/// One Neumann solve per basis current against a shared factorization.
/// Columns are computed in parallel when hardware threads are available;
/// the result does not depend on scheduling.
NtDMatrix assemble_ntd(const Mesh& mesh, const ConductivityField& sigma);
NtDMatrix assemble_ntd(const NeumannSolver& solver);

/// Lambda_D - Lambda_bg on a shared basis.
NtDMatrix difference_operator(const NtDMatrix& lam_d, const NtDMatrix& lam_bg);

/// <g, M g> in L2(dOmega) for a zero-mean current g.
double quadratic_form(const Eigen::MatrixXd& m, const ZeroMeanBasis& basis, const BoundaryCurrent& g);
double quadratic_form(const NtDMatrix& m, const BoundaryCurrent& g);

}  // namespace kert
