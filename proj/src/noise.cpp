#include "kert/noise.hpp"

#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "kert/error.hpp"

namespace kert {

double operator_norm(const Eigen::MatrixXd& n, const Eigen::MatrixXd& gram) {
    if (n.rows() != gram.rows() || n.cols() != gram.cols()) throw InvalidInput("operator_norm: size mismatch");
    const Eigen::LLT<Eigen::MatrixXd> chol(gram);
    if (chol.info() != Eigen::Success) throw InvalidInput("operator_norm: Gram matrix is not positive definite");
    const Eigen::MatrixXd& l = chol.matrixLLT();
    Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(n);
    c = l.triangularView<Eigen::Lower>().solve(c.transpose()).eval();
    c = 0.5 * (c + c.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("operator_norm: eigensolver did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd gaussian_symmetric(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
    return 0.5 * (a + a.transpose());
}

OrthonormalFrame OrthonormalFrame::for_gram(const Eigen::MatrixXd& gram) {
    if (gram.rows() != gram.cols()) throw InvalidInput("Gram matrix must be square");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalFailure("Gram eigensolver did not converge");
    if (gram.size() > 0 && !(eig.eigenvalues().minCoeff() > 0.0)) {
        throw InvalidInput("Gram matrix is not positive definite");
    }
    const Eigen::VectorXd r = eig.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    OrthonormalFrame f;
    f.root = v * r.asDiagonal() * v.transpose();
    f.inverse_root = v * r.cwiseInverse().asDiagonal() * v.transpose();
    f.root = 0.5 * (f.root + f.root.transpose()).eval();
    f.inverse_root = 0.5 * (f.inverse_root + f.inverse_root.transpose()).eval();
    return f;
}

PerturbedOperator perturb(const Eigen::MatrixXd& difference, const Eigen::MatrixXd& gram, const NoiseSpec& spec) {
    if (!(spec.eta >= 0.0)) throw InvalidInput("noise level eta must be non-negative");
    if (difference.rows() != difference.cols()) throw InvalidInput("perturb: operator must be square");
    if (gram.rows() != difference.rows() || gram.cols() != difference.cols()) {
        throw InvalidInput("perturb: operator and Gram matrix differ in size");
    }
    if ((difference - difference.transpose()).norm() > 1e-10 * difference.norm()) {
        throw InvalidInput("perturb: operator must be symmetric");
    }
    const OrthonormalFrame frame = OrthonormalFrame::for_gram(gram);
    const Eigen::MatrixXd c = frame.inverse_root * difference * frame.inverse_root;

    PerturbedOperator out;
    out.matrix = difference;
    out.delta_r = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
    if (spec.eta == 0.0) return out;

    const Eigen::MatrixXd noise = gaussian_symmetric(difference.rows(), spec.seed);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ortho(noise, Eigen::EigenvaluesOnly);
    out.noise_norm_l2 = ortho.eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::MatrixXd added = frame.root * noise * frame.root;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> coord(0.5 * (added + added.transpose()), Eigen::EigenvaluesOnly);
    out.noise_norm_coord = coord.eigenvalues().cwiseAbs().maxCoeff();

    const double scale = spec.eta * out.delta_r;
    out.matrix += scale * added;
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    out.delta = scale * out.noise_norm_l2;
    return out;
}

}  // namespace kert
