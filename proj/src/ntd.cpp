#include "kert/ntd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>
#include <vector>

#include "kert/error.hpp"

namespace kert {

ZeroMeanBasis ZeroMeanBasis::for_mesh(const Mesh& mesh) {
    ZeroMeanBasis b;
    b.edge_lengths = kert::edge_lengths(mesh);
    b.perimeter = b.edge_lengths.sum();
    const Eigen::Index m = b.edge_lengths.size() - 1;
    const Eigen::VectorXd len = b.edge_lengths.head(m);
    b.gram = -(len * len.transpose()) / b.perimeter;
    b.gram.diagonal() += len;
    std::ostringstream tag;
    tag << std::setprecision(17) << "edge-indicator-minus-mean;N_b=" << b.edge_lengths.size()
        << ";perimeter=" << b.perimeter;
    b.tag = tag.str();
    return b;
}

BoundaryCurrent ZeroMeanBasis::to_current(const Eigen::VectorXd& coords) const {
    const Eigen::Index m = dimension();
    if (coords.size() != m) throw InvalidInput("coordinate vector has wrong dimension");
    const double shift = coords.dot(edge_lengths.head(m)) / perimeter;
    BoundaryCurrent g{Eigen::VectorXd(m + 1)};
    g.per_edge.head(m) = coords.array() - shift;
    g.per_edge[m] = -shift;
    return g;
}

Eigen::VectorXd ZeroMeanBasis::coordinates(const BoundaryCurrent& g) const {
    const Eigen::Index m = dimension();
    if (g.per_edge.size() != m + 1) throw InvalidInput("boundary current has wrong edge count");
    const double norm = std::sqrt(g.per_edge.cwiseAbs2().dot(edge_lengths));
    if (norm > 0.0 && std::abs(g.per_edge.dot(edge_lengths)) > 1e-8 * norm * std::sqrt(perimeter)) {
        throw InvalidInput("boundary current is not zero-mean");
    }
    return g.per_edge.head(m).array() - g.per_edge[m];
}

bool ZeroMeanBasis::same_as(const ZeroMeanBasis& other) const {
    return tag == other.tag && edge_lengths.size() == other.edge_lengths.size() &&
           (edge_lengths - other.edge_lengths).cwiseAbs().maxCoeff() <= 1e-14 * perimeter;
}

NtDMatrix assemble_ntd(const NeumannSolver& solver) {
    const Mesh& mesh = solver.mesh();
    NtDMatrix out;
    out.basis = ZeroMeanBasis::for_mesh(mesh);
    out.radius = mesh.radius;
    const Eigen::Index m = out.basis.dimension();
    Eigen::MatrixXd raw(m, m);

    auto column = [&](Eigen::Index k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[k] = 1.0;
        const FemSolution sol = solver.solve(out.basis.to_current(e));
        const Eigen::VectorXd traces = edge_integrals(mesh, sol.nodal_u);
        // <b_j, u_k> = int_{e_j} u_k - len_j / |dOmega| int_{dOmega} u_k
        const double total = traces.sum();
        raw.col(k) = traces.head(m) - out.basis.edge_lengths.head(m) * (total / out.basis.perimeter);
    };

    const unsigned workers = std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, 16u);
    if (workers == 1) {
        for (Eigen::Index k = 0; k < m; ++k) column(k);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (Eigen::Index k = w; k < m; k += workers) column(k);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    const double norm = raw.norm();
    out.symmetry_defect = norm > 0.0 ? (raw - raw.transpose()).norm() / norm : 0.0;
    if (out.symmetry_defect > 1e-8) {
        throw NumericalFailure("NtD assembly is not reciprocal: symmetry defect " + std::to_string(out.symmetry_defect));
    }
    out.matrix = 0.5 * (raw + raw.transpose());
    return out;
}

NtDMatrix assemble_ntd(const Mesh& mesh, const ConductivityField& sigma) {
    return assemble_ntd(NeumannSolver(mesh, sigma));
}

NtDMatrix difference_operator(const NtDMatrix& lam_d, const NtDMatrix& lam_bg) {
    if (!lam_d.basis.same_as(lam_bg.basis) || lam_d.matrix.rows() != lam_bg.matrix.rows()) {
        throw InvalidInput("NtD matrices were assembled on different boundary bases");
    }
    NtDMatrix diff;
    diff.basis = lam_bg.basis;
    diff.radius = lam_bg.radius;
    diff.matrix = lam_d.matrix - lam_bg.matrix;
    // Both inputs are exactly symmetric, so is the difference; enforce anyway
    // for matrices loaded from external data.
    diff.matrix = 0.5 * (diff.matrix + diff.matrix.transpose()).eval();
    diff.symmetry_defect = 0.0;
    return diff;
}

double quadratic_form(const Eigen::MatrixXd& m, const ZeroMeanBasis& basis, const BoundaryCurrent& g) {
    const Eigen::VectorXd v = basis.coordinates(g);
    if (m.rows() != v.size() || m.cols() != v.size()) throw InvalidInput("operator and current dimensions differ");
    return v.dot(m * v);
}

double quadratic_form(const NtDMatrix& m, const BoundaryCurrent& g) { return quadratic_form(m.matrix, m.basis, g); }

}  // namespace kert
