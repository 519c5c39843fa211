#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/Sparse>

#include "kert/mesh.hpp"
#include "kert/phantom.hpp"

namespace kert {

/// Piecewise-constant normal current density per boundary edge (A/m in 2D).
struct BoundaryCurrent {
    Eigen::VectorXd per_edge;

    std::size_t size() const { return static_cast<std::size_t>(per_edge.size()); }
};

struct FemSolution {
    Eigen::VectorXd nodal_u;  // V
    BoundaryCurrent applied;  // the compatible current actually imposed
    double compatibility_correction = 0.0;  // L2 norm of the removed mean
};

/// Ohmic power density sigma |grad u|^2 per element.
struct PowerDensityField {
    Eigen::VectorXd per_element;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 stiffness matrix sum_T sigma_T grad(phi_i).grad(phi_j) |T|.
SparseMatrix assemble_stiffness(const Mesh& mesh, const ConductivityField& sigma);

/// Boundary quadrature helpers on piecewise-constant currents and
/// piecewise-linear traces.
Eigen::VectorXd edge_lengths(const Mesh& mesh);
double total_current(const Mesh& mesh, const BoundaryCurrent& g);          // sum g_e len_e
double l2_norm_squared(const Mesh& mesh, const BoundaryCurrent& g);        // sum g_e^2 len_e
Eigen::VectorXd edge_integrals(const Mesh& mesh, const Eigen::VectorXd& u);  // trapezoidal int_e u
double boundary_pairing(const Mesh& mesh, const BoundaryCurrent& g, const Eigen::VectorXd& u);
double boundary_mean_integral(const Mesh& mesh, const Eigen::VectorXd& u);  // int_{dOmega} u

/// Shifts u by a constant so that its boundary integral vanishes.
Eigen::VectorXd regauge(const Mesh& mesh, const Eigen::VectorXd& u);

/// Edge averages of cos(n theta)/sqrt(pi) (or sin), the L2 projection of the
/// Fourier drive onto piecewise constants.
BoundaryCurrent fourier_drive(const Mesh& mesh, int n, bool sine = false);

/// Relative incompatibility |sum g_e len_e| / (||g|| sqrt(|dOmega|)).
double compatibility_defect(const Mesh& mesh, const BoundaryCurrent& g);

/// Removes the length-weighted mean from g. Returns the L2 norm of what was
/// removed.
double project_zero_mean(const Mesh& mesh, BoundaryCurrent& g);

/// Neumann solver for one (mesh, sigma) pair with a cached factorization of
/// the gauge-augmented system
///   [ K  c ] [u]   [f]
///   [ c' 0 ] [m] = [0],   c_i = int_{dOmega} phi_i.
/// solve() is const and safe to call concurrently.
class NeumannSolver {
public:
    /// Currents whose compatibility defect exceeds this are rejected.
    static constexpr double kCompatibilityTolerance = 1e-8;
    static constexpr double kResidualTolerance = 1e-10;

    NeumannSolver(const Mesh& mesh, const ConductivityField& sigma);
    ~NeumannSolver();
    NeumannSolver(NeumannSolver&&) noexcept;
    NeumannSolver& operator=(NeumannSolver&&) noexcept;

    FemSolution solve(const BoundaryCurrent& g) const;

    const Mesh& mesh() const { return *mesh_; }
    const ConductivityField& sigma() const { return sigma_; }

private:
    struct Factorization;
    const Mesh* mesh_;
    ConductivityField sigma_;
    std::unique_ptr<Factorization> factor_;
};

FemSolution solve_neumann(const Mesh& mesh, const ConductivityField& sigma, const BoundaryCurrent& g);

PowerDensityField power_density(const Mesh& mesh, const ConductivityField& sigma, const FemSolution& sol);
PowerDensityField power_density(const Mesh& mesh, const ConductivityField& sigma, const Eigen::VectorXd& nodal_u);

/// Sum over flagged elements of p_T |T|.
double power_in_region(const Mesh& mesh, const PowerDensityField& p, const RegionIndicator& region);
double total_power(const Mesh& mesh, const PowerDensityField& p);

}  // namespace kert
