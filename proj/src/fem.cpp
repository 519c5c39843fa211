#include "kert/fem.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SparseLU>

#include "kert/error.hpp"

namespace kert {

namespace {

struct ElementGradients {
    std::array<Point, 3> grad;  // constant gradients of the three hat functions
    double area;
};

ElementGradients gradients(const Mesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.nodes[tri[0]];
    const Point& p1 = mesh.nodes[tri[1]];
    const Point& p2 = mesh.nodes[tri[2]];
    const double two_a = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    ElementGradients eg;
    eg.area = 0.5 * two_a;
    eg.grad[0] = Point(p1.y() - p2.y(), p2.x() - p1.x()) / two_a;
    eg.grad[1] = Point(p2.y() - p0.y(), p0.x() - p2.x()) / two_a;
    eg.grad[2] = Point(p0.y() - p1.y(), p1.x() - p0.x()) / two_a;
    return eg;
}

void check_sizes(const Mesh& mesh, const ConductivityField& sigma) {
    if (sigma.size() != mesh.element_count()) {
        throw InvalidInput("conductivity field has " + std::to_string(sigma.size()) + " entries, mesh has " +
                           std::to_string(mesh.element_count()) + " elements");
    }
    if ((sigma.per_element.array() <= 0.0).any()) throw InvalidInput("conductivity must be strictly positive");
}

void check_current(const Mesh& mesh, const BoundaryCurrent& g) {
    if (g.size() != mesh.boundary_count()) throw InvalidInput("boundary current size does not match mesh");
}

// c_i = int_{dOmega} phi_i
Eigen::VectorXd boundary_weights(const Mesh& mesh) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.node_count()));
    for (std::size_t e = 0; e < mesh.boundary_count(); ++e) {
        const double half = 0.5 * mesh.edge_length(e);
        c[mesh.boundary_edges[e][0]] += half;
        c[mesh.boundary_edges[e][1]] += half;
    }
    return c;
}

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const ConductivityField& sigma) {
    check_sizes(mesh, sigma);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(9 * mesh.element_count());
    for (std::size_t t = 0; t < mesh.element_count(); ++t) {
        const ElementGradients eg = gradients(mesh, t);
        const double s = sigma.per_element[static_cast<Eigen::Index>(t)] * eg.area;
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], s * eg.grad[i].dot(eg.grad[j]));
    }
    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    SparseMatrix k(n, n);
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

Eigen::VectorXd edge_lengths(const Mesh& mesh) {
    Eigen::VectorXd len(static_cast<Eigen::Index>(mesh.boundary_count()));
    for (std::size_t e = 0; e < mesh.boundary_count(); ++e) len[static_cast<Eigen::Index>(e)] = mesh.edge_length(e);
    return len;
}

double total_current(const Mesh& mesh, const BoundaryCurrent& g) {
    check_current(mesh, g);
    return g.per_edge.dot(edge_lengths(mesh));
}

double l2_norm_squared(const Mesh& mesh, const BoundaryCurrent& g) {
    check_current(mesh, g);
    return g.per_edge.cwiseAbs2().dot(edge_lengths(mesh));
}

Eigen::VectorXd edge_integrals(const Mesh& mesh, const Eigen::VectorXd& u) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.boundary_count()));
    for (std::size_t e = 0; e < mesh.boundary_count(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        out[static_cast<Eigen::Index>(e)] = 0.5 * mesh.edge_length(e) * (u[be[0]] + u[be[1]]);
    }
    return out;
}

double boundary_pairing(const Mesh& mesh, const BoundaryCurrent& g, const Eigen::VectorXd& u) {
    check_current(mesh, g);
    return g.per_edge.dot(edge_integrals(mesh, u));
}

double boundary_mean_integral(const Mesh& mesh, const Eigen::VectorXd& u) { return edge_integrals(mesh, u).sum(); }

Eigen::VectorXd regauge(const Mesh& mesh, const Eigen::VectorXd& u) {
    const double perimeter = edge_lengths(mesh).sum();
    return u.array() - boundary_mean_integral(mesh, u) / perimeter;
}

BoundaryCurrent fourier_drive(const Mesh& mesh, int n, bool sine) {
    if (n < 1) throw InvalidInput("Fourier drive index must be >= 1");
    BoundaryCurrent g{Eigen::VectorXd(static_cast<Eigen::Index>(mesh.boundary_count()))};
    const double scale = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t e = 0; e < mesh.boundary_count(); ++e) {
        const auto [t0, t1] = mesh.edge_angles(e);
        const double avg = sine ? (std::cos(n * t0) - std::cos(n * t1)) / (n * (t1 - t0))
                                : (std::sin(n * t1) - std::sin(n * t0)) / (n * (t1 - t0));
        g.per_edge[static_cast<Eigen::Index>(e)] = scale * avg;
    }
    return g;
}

double compatibility_defect(const Mesh& mesh, const BoundaryCurrent& g) {
    const Eigen::VectorXd len = edge_lengths(mesh);
    const double norm = std::sqrt(g.per_edge.cwiseAbs2().dot(len));
    if (norm == 0.0) return 0.0;
    return std::abs(g.per_edge.dot(len)) / (norm * std::sqrt(len.sum()));
}

double project_zero_mean(const Mesh& mesh, BoundaryCurrent& g) {
    check_current(mesh, g);
    const Eigen::VectorXd len = edge_lengths(mesh);
    const double mean = g.per_edge.dot(len) / len.sum();
    g.per_edge.array() -= mean;
    return std::abs(mean) * std::sqrt(len.sum());
}

struct NeumannSolver::Factorization {
    SparseMatrix augmented;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

NeumannSolver::NeumannSolver(const Mesh& mesh, const ConductivityField& sigma)
    : mesh_(&mesh), sigma_(sigma), factor_(std::make_unique<Factorization>()) {
    const SparseMatrix k = assemble_stiffness(mesh, sigma);
    const Eigen::VectorXd c = boundary_weights(mesh);
    const auto n = static_cast<Eigen::Index>(mesh.node_count());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(k.nonZeros()) + 2 * mesh.boundary_count() * 2);
    for (Eigen::Index col = 0; col < k.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(k, col); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (c[i] == 0.0) continue;
        triplets.emplace_back(i, n, c[i]);
        triplets.emplace_back(n, i, c[i]);
    }
    factor_->augmented.resize(n + 1, n + 1);
    factor_->augmented.setFromTriplets(triplets.begin(), triplets.end());
    factor_->augmented.makeCompressed();
    factor_->lu.compute(factor_->augmented);
    if (factor_->lu.info() != Eigen::Success) {
        throw NumericalFailure("sparse LU factorization of the Neumann system failed: " + factor_->lu.lastErrorMessage());
    }
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

FemSolution NeumannSolver::solve(const BoundaryCurrent& g_in) const {
    const Mesh& mesh = *mesh_;
    check_current(mesh, g_in);
    const double defect = compatibility_defect(mesh, g_in);
    if (defect > kCompatibilityTolerance) {
        throw InvalidInput("boundary current carries a net total current (relative defect " + std::to_string(defect) +
                           "); the Neumann problem has no solution");
    }
    FemSolution sol;
    sol.applied = g_in;
    sol.compatibility_correction = project_zero_mean(mesh, sol.applied);

    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (std::size_t e = 0; e < mesh.boundary_count(); ++e) {
        const double half = 0.5 * sol.applied.per_edge[static_cast<Eigen::Index>(e)] * mesh.edge_length(e);
        rhs[mesh.boundary_edges[e][0]] += half;
        rhs[mesh.boundary_edges[e][1]] += half;
    }
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        sol.nodal_u = Eigen::VectorXd::Zero(n);
        return sol;
    }
    const Eigen::VectorXd x = factor_->lu.solve(rhs);
    if (factor_->lu.info() != Eigen::Success) throw NumericalFailure("sparse LU solve failed");
    const double residual = (factor_->augmented * x - rhs).norm() / rhs_norm;
    if (!(residual <= kResidualTolerance)) {
        throw NumericalFailure("Neumann solve residual " + std::to_string(residual) + " exceeds tolerance");
    }
    sol.nodal_u = x.head(n);
    return sol;
}

FemSolution solve_neumann(const Mesh& mesh, const ConductivityField& sigma, const BoundaryCurrent& g) {
    return NeumannSolver(mesh, sigma).solve(g);
}

PowerDensityField power_density(const Mesh& mesh, const ConductivityField& sigma, const Eigen::VectorXd& nodal_u) {
    check_sizes(mesh, sigma);
    if (static_cast<std::size_t>(nodal_u.size()) != mesh.node_count()) {
        throw InvalidInput("nodal potential size does not match mesh");
    }
    PowerDensityField p{Eigen::VectorXd(static_cast<Eigen::Index>(mesh.element_count()))};
    for (std::size_t t = 0; t < mesh.element_count(); ++t) {
        const ElementGradients eg = gradients(mesh, t);
        const auto& tri = mesh.triangles[t];
        // Differences make the gradient blind to the gauge constant.
        const Point grad = (nodal_u[tri[1]] - nodal_u[tri[0]]) * eg.grad[1] + (nodal_u[tri[2]] - nodal_u[tri[0]]) * eg.grad[2];
        p.per_element[static_cast<Eigen::Index>(t)] = sigma.per_element[static_cast<Eigen::Index>(t)] * grad.squaredNorm();
    }
    return p;
}

PowerDensityField power_density(const Mesh& mesh, const ConductivityField& sigma, const FemSolution& sol) {
    return power_density(mesh, sigma, sol.nodal_u);
}

double power_in_region(const Mesh& mesh, const PowerDensityField& p, const RegionIndicator& region) {
    if (region.size() != mesh.element_count() || static_cast<std::size_t>(p.per_element.size()) != mesh.element_count()) {
        throw InvalidInput("power density / region size does not match mesh");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.element_count(); ++t)
        if (region[t]) total += p.per_element[static_cast<Eigen::Index>(t)] * mesh.area(t);
    return total;
}

double total_power(const Mesh& mesh, const PowerDensityField& p) {
    return power_in_region(mesh, p, RegionIndicator(mesh.element_count(), true));
}

}  // namespace kert
