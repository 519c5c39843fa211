#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "kert/fem.hpp"
#include "kert/mesh.hpp"
#include "kert/ntd.hpp"
#include "kert/phantom.hpp"

namespace kert {

/// A priori conductivity ranges, S/m. Only anomalies less conductive than
/// the background are supported: anomaly_max < background_min.
struct SigmaBounds {
    double anomaly_min = 0.0;
    double anomaly_max = 0.0;
    double background_min = 0.0;
    double background_max = 0.0;

    void validate() const;
    double gap() const { return background_min - anomaly_max; }

    static SigmaBounds exact(double sigma_anomaly, double sigma_background) {
        return {sigma_anomaly, sigma_anomaly, sigma_background, sigma_background};
    }
};

enum class EpsilonRule { eigenvalue, midpoint, explicit_value };

struct KernelConfig {
    SigmaBounds bounds;
    EpsilonRule rule = EpsilonRule::eigenvalue;
    double explicit_epsilon = 0.0;
    double safety = 2.0;
    /// Reconstruct with every eigenvector whose eigenvalue lies within
    /// degeneracy_tolerance * lambda + 2 delta of the selected one and
    /// intersect the regions.
    bool intersect_degenerate = true;
    double degeneracy_tolerance = 0.05;

    void validate() const;
};

/// Admissible power budgets for an eigenvalue lambda known to within delta:
/// [anomaly_min (lambda - delta), background_max (lambda + delta)] / gap.
struct EpsilonInterval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double x) const { return lower <= x && x <= upper; }
    bool empty() const { return !(lower <= upper) || upper <= 0.0; }
};

EpsilonInterval epsilon_interval(double lambda, double delta, const SigmaBounds& bounds);

/// Throws NoUsableEigenpair when the interval is empty or the chosen value
/// falls outside it, InvalidInput when lambda < delta or lambda <= 0.
double choose_epsilon(double lambda, double delta, const KernelConfig& cfg);

/// Elements sorted by power density, ascending, ties by element index, with
/// the running sum of p_T |T|.
struct PowerCurve {
    std::vector<std::size_t> element;
    std::vector<double> density;
    std::vector<double> cumulative;

    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

PowerCurve power_curve(const Mesh& mesh, const PowerDensityField& p);

/// Threshold alpha* for a power budget: the density of the first element
/// whose inclusion pushes the cumulative power above target. A zero target
/// gives 0 and a target equal to the total power gives a value just above
/// the largest density. Throws InvalidInput when target is negative or
/// exceeds the total power.
double solve_alpha(const PowerCurve& curve, double target);
double solve_alpha(const Mesh& mesh, const PowerDensityField& p, double target);

/// Elements with p < alpha.
RegionIndicator threshold_region(const PowerDensityField& p, double alpha);

/// Reconstruction from one eigenvector of the difference operator.
struct MemberReconstruction {
    Eigen::Index index = 0;
    double lambda = 0.0;
    double epsilon = 0.0;
    double alpha = 0.0;
    double drive_norm_squared = 0.0;
    RegionIndicator region;
};

struct ReconstructionResult {
    RegionIndicator region;
    double alpha_star = 0.0;
    double epsilon_star = 0.0;
    Eigen::Index k_star = 0;
    double lambda_k_star = 0.0;
    double delta = 0.0;
    double drive_norm_squared = 0.0;
    BoundaryCurrent drive;
    PowerDensityField density;
    PowerCurve power_curve;
    Eigen::VectorXd spectrum;
    /// The selected eigenpair first, then the rest of its degenerate cluster.
    std::vector<MemberReconstruction> members;
};

/// Full pipeline from an already formed (possibly noisy) difference operator.
ReconstructionResult run_kernel_method(const NtDMatrix& difference, double delta, const KernelConfig& cfg,
                                       const Mesh& mesh, const ConductivityField& sigma_bg);

ReconstructionResult run_kernel_method(const NtDMatrix& lam_d_measured, const NtDMatrix& lam_bg, double delta,
                                       const KernelConfig& cfg, const Mesh& mesh, const ConductivityField& sigma_bg);

/// Area-weighted intersection over union. Two empty regions score 1.
double jaccard(const RegionIndicator& a, const RegionIndicator& b, const Mesh& mesh);

}  // namespace kert
