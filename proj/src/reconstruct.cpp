#include "kert/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kert/error.hpp"
#include "kert/spectral.hpp"

namespace kert {

void SigmaBounds::validate() const {
    if (!(anomaly_min > 0.0)) throw InvalidInput("sigma_bounds.anomaly_min must be positive");
    if (anomaly_max < anomaly_min) throw InvalidInput("sigma_bounds: anomaly_max < anomaly_min");
    if (background_max < background_min) throw InvalidInput("sigma_bounds: background_max < background_min");
    if (!(anomaly_max < background_min)) {
        throw InvalidInput("sigma_bounds: anomaly range must lie strictly below the background range");
    }
}

void KernelConfig::validate() const {
    bounds.validate();
    if (!(safety >= 1.0)) throw InvalidInput("kernel.safety must be >= 1");
    if (!(degeneracy_tolerance >= 0.0)) throw InvalidInput("kernel.degeneracy_tolerance must be non-negative");
    if (rule == EpsilonRule::explicit_value && !(explicit_epsilon > 0.0)) {
        throw InvalidInput("kernel.epsilon must be positive under the explicit rule");
    }
}

EpsilonInterval epsilon_interval(double lambda, double delta, const SigmaBounds& bounds) {
    bounds.validate();
    const double gap = bounds.gap();
    return {bounds.anomaly_min / gap * (lambda - delta), bounds.background_max / gap * (lambda + delta)};
}

double choose_epsilon(double lambda, double delta, const KernelConfig& cfg) {
    cfg.validate();
    if (delta < 0.0) throw InvalidInput("choose_epsilon: delta must be non-negative");
    if (!(lambda >= delta) || !(lambda > 0.0)) {
        throw InvalidInput("choose_epsilon: eigenvalue is below the noise level");
    }
    const EpsilonInterval iv = epsilon_interval(lambda, delta, cfg.bounds);
    if (iv.empty()) throw NoUsableEigenpair("eigenpair unusable: empty power budget interval");
    double eps = 0.0;
    switch (cfg.rule) {
        case EpsilonRule::eigenvalue: eps = lambda; break;
        case EpsilonRule::midpoint: eps = 0.5 * (iv.lower + iv.upper); break;
        case EpsilonRule::explicit_value: eps = cfg.explicit_epsilon; break;
    }
    if (!iv.contains(eps)) {
        throw NoUsableEigenpair("eigenpair unusable: epsilon " + std::to_string(eps) + " outside [" +
                                std::to_string(iv.lower) + ", " + std::to_string(iv.upper) + "]");
    }
    return eps;
}

PowerCurve power_curve(const Mesh& mesh, const PowerDensityField& p) {
    const std::size_t n = mesh.element_count();
    if (static_cast<std::size_t>(p.per_element.size()) != n) {
        throw InvalidInput("power density does not match the mesh");
    }
    PowerCurve curve;
    curve.element.resize(n);
    std::iota(curve.element.begin(), curve.element.end(), std::size_t{0});
    std::stable_sort(curve.element.begin(), curve.element.end(), [&](std::size_t a, std::size_t b) {
        return p.per_element[static_cast<Eigen::Index>(a)] < p.per_element[static_cast<Eigen::Index>(b)];
    });
    curve.density.resize(n);
    curve.cumulative.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t e = curve.element[i];
        curve.density[i] = p.per_element[static_cast<Eigen::Index>(e)];
        sum += curve.density[i] * mesh.area(e);
        curve.cumulative[i] = sum;
    }
    return curve;
}

double solve_alpha(const PowerCurve& curve, double target) {
    if (!(target >= 0.0)) throw InvalidInput("solve_alpha: target must be non-negative");
    if (curve.density.empty()) throw InvalidInput("solve_alpha: empty power curve");
    const double total = curve.total();
    if (target > total * (1.0 + 1e-12)) {
        throw InvalidInput("solve_alpha: target " + std::to_string(target) + " exceeds total power " +
                           std::to_string(total));
    }
    if (target == 0.0) return 0.0;
    const auto it = std::upper_bound(curve.cumulative.begin(), curve.cumulative.end(), target);
    if (it == curve.cumulative.end()) {
        return std::nextafter(curve.density.back(), std::numeric_limits<double>::infinity());
    }
    return curve.density[static_cast<std::size_t>(it - curve.cumulative.begin())];
}

double solve_alpha(const Mesh& mesh, const PowerDensityField& p, double target) {
    return solve_alpha(power_curve(mesh, p), target);
}

RegionIndicator threshold_region(const PowerDensityField& p, double alpha) {
    RegionIndicator r(static_cast<std::size_t>(p.per_element.size()));
    for (Eigen::Index e = 0; e < p.per_element.size(); ++e) {
        r.per_element[static_cast<std::size_t>(e)] = p.per_element[e] < alpha;
    }
    return r;
}

namespace {

struct Drive {
    MemberReconstruction member;
    BoundaryCurrent current;
    PowerDensityField density;
    PowerCurve curve;
};

Drive reconstruct_member(const SpectralDecomposition& dec, const ZeroMeanBasis& basis, Eigen::Index k, double delta,
                         const KernelConfig& cfg, const NeumannSolver& solver, const ConductivityField& sigma_bg) {
    Drive d;
    d.member.index = k;
    d.member.lambda = dec.eigenvalues[k];
    d.current = dec.eigenfunction(basis, k);
    d.member.drive_norm_squared = l2_norm_squared(solver.mesh(), d.current);
    d.member.epsilon = choose_epsilon(d.member.lambda, delta, cfg);
    d.density = power_density(solver.mesh(), sigma_bg, solver.solve(d.current));
    d.curve = power_curve(solver.mesh(), d.density);
    const double target = d.member.epsilon * d.member.drive_norm_squared;
    try {
        d.member.alpha = solve_alpha(d.curve, target);
    } catch (const InvalidInput& e) {
        throw NoUsableEigenpair(std::string("eigenpair unusable: ") + e.what());
    }
    d.member.region = threshold_region(d.density, d.member.alpha);
    return d;
}

}  // namespace

ReconstructionResult run_kernel_method(const NtDMatrix& difference, double delta, const KernelConfig& cfg,
                                       const Mesh& mesh, const ConductivityField& sigma_bg) {
    cfg.validate();
    if (!(delta >= 0.0)) throw InvalidInput("run_kernel_method: delta must be non-negative");
    if (static_cast<std::size_t>(difference.basis.edge_count()) != mesh.boundary_count()) {
        throw InvalidInput("run_kernel_method: operator basis does not match the mesh boundary");
    }
    if (!difference.basis.same_as(ZeroMeanBasis::for_mesh(mesh))) {
        throw InvalidInput("run_kernel_method: operator basis does not match the mesh boundary");
    }

    const SpectralDecomposition dec = eigendecompose(difference);
    const Eigen::Index k = select_eigenindex(dec, delta, cfg.safety);
    const NeumannSolver solver(mesh, sigma_bg);

    Drive primary = reconstruct_member(dec, difference.basis, k, delta, cfg, solver, sigma_bg);
    ReconstructionResult out;
    out.k_star = k;
    out.lambda_k_star = primary.member.lambda;
    out.epsilon_star = primary.member.epsilon;
    out.alpha_star = primary.member.alpha;
    out.delta = delta;
    out.drive_norm_squared = primary.member.drive_norm_squared;
    out.region = primary.member.region;
    out.spectrum = dec.eigenvalues;
    out.members.push_back(primary.member);

    if (cfg.intersect_degenerate) {
        const double window = cfg.degeneracy_tolerance * out.lambda_k_star + 2.0 * delta;
        auto in_cluster = [&](Eigen::Index j) {
            return dec.eigenvalues[j] > delta && std::abs(dec.eigenvalues[j] - out.lambda_k_star) <= window;
        };
        std::vector<Eigen::Index> cluster;
        for (Eigen::Index j = k - 1; j >= 0 && in_cluster(j); --j) cluster.push_back(j);
        for (Eigen::Index j = k + 1; j < dec.size() && in_cluster(j); ++j) cluster.push_back(j);
        std::sort(cluster.begin(), cluster.end());
        for (const Eigen::Index j : cluster) {
            MemberReconstruction m;
            try {
                m = reconstruct_member(dec, difference.basis, j, delta, cfg, solver, sigma_bg).member;
            } catch (const NoUsableEigenpair&) {
                continue;
            }
            for (std::size_t e = 0; e < out.region.size(); ++e) {
                out.region.per_element[e] = out.region.per_element[e] && m.region.per_element[e];
            }
            out.members.push_back(std::move(m));
        }
    }

    out.drive = std::move(primary.current);
    out.density = std::move(primary.density);
    out.power_curve = std::move(primary.curve);
    return out;
}

ReconstructionResult run_kernel_method(const NtDMatrix& lam_d_measured, const NtDMatrix& lam_bg, double delta,
                                       const KernelConfig& cfg, const Mesh& mesh, const ConductivityField& sigma_bg) {
    return run_kernel_method(difference_operator(lam_d_measured, lam_bg), delta, cfg, mesh, sigma_bg);
}

double jaccard(const RegionIndicator& a, const RegionIndicator& b, const Mesh& mesh) {
    if (a.size() != mesh.element_count() || b.size() != mesh.element_count()) {
        throw InvalidInput("jaccard: regions do not match the mesh");
    }
    double inter = 0.0;
    double uni = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
        if (a[e] || b[e]) {
            const double area = mesh.area(e);
            uni += area;
            if (a[e] && b[e]) inter += area;
        }
    }
    return uni == 0.0 ? 1.0 : inter / uni;
}

}  // namespace kert
