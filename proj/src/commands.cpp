#include "kert/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include <json.hpp>

#include "kert/analytic.hpp"
#include "kert/error.hpp"
#include "kert/fem.hpp"
#include "kert/io.hpp"
#include "kert/noise.hpp"
#include "kert/ntd.hpp"
#include "kert/reconstruct.hpp"
#include "kert/spectral.hpp"

namespace kert {

using nlohmann::json;

namespace {

class Output {
public:
    Output(const RunContext& ctx, Mode mode, const ExperimentConfig& cfg) : ctx_(ctx), mode_(mode), cfg_(cfg) {
        std::error_code ec;
        std::filesystem::create_directories(ctx.out_dir, ec);
        if (ec || !std::filesystem::is_directory(ctx.out_dir)) {
            throw InvalidInput("output directory " + ctx.out_dir.string() + " is not writable");
        }
    }

    void write(const std::string& name, const std::string& contents) {
        report_.artifacts.emplace_back(name, io::write_text_file(ctx_.out_dir / name, contents));
        log("wrote " + name);
    }

    template <class F>
    void write_with(const std::string& name, F&& f) {
        std::ostringstream s;
        f(s);
        write(name, s.str());
    }

    void log(const std::string& msg) const {
        if (ctx_.log) *ctx_.log << "[kert " << mode_name(mode_) << "] " << msg << '\n';
    }

    RunReport finish() {
        json manifest;
        manifest["tool"] = "kert";
        manifest["format"] = 1;
        manifest["mode"] = mode_name(mode_);
        manifest["seed"] = cfg_.noise.seed;
        manifest["config"] = json::parse(cfg_.canonical);
        json artifacts = json::object();
        for (const auto& [name, hash] : report_.artifacts) artifacts[name] = hash;
        manifest["artifacts"] = artifacts;
        report_.manifest = ctx_.out_dir / "manifest.json";
        io::write_text_file(report_.manifest, manifest.dump(2) + "\n");
        log("wrote manifest.json");
        return report_;
    }

private:
    const RunContext& ctx_;
    Mode mode_;
    const ExperimentConfig& cfg_;
    RunReport report_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_spectrum(std::ostream& out, const Eigen::VectorXd& lambda, const Eigen::VectorXd* clean = nullptr) {
    out << "index,lambda";
    if (clean) out << ",clean_lambda";
    out << '\n';
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        out << k << ',' << io::fmt(lambda[k]);
        if (clean) out << ',' << io::fmt((*clean)[k]);
        out << '\n';
    }
}

template <class F>
void parallel_for(std::size_t n, F f) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) {
                    try {
                        f(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Operators {
    Mesh mesh;
    ConductivityField sigma_bg;
    NtDMatrix lam_bg;
    NtDMatrix lam_d;
    NtDMatrix difference;
};

Operators build_operators(const ExperimentConfig& cfg, Output& out) {
    Operators ops;
    ops.mesh = cfg.build_mesh();
    require_valid(ops.mesh);
    out.log("mesh: " + std::to_string(ops.mesh.node_count()) + " nodes, " + std::to_string(ops.mesh.element_count()) +
            " elements, " + std::to_string(ops.mesh.boundary_count()) + " boundary edges");
    ops.sigma_bg = ConductivityField::uniform(ops.mesh.element_count(), cfg.phantom.background_sigma);
    ops.lam_bg = assemble_ntd(ops.mesh, ops.sigma_bg);
    if (!cfg.measured_ntd_file.empty()) {
        std::ifstream in(cfg.measured_ntd_file);
        if (!in) throw InvalidInput("measured_ntd: cannot open " + cfg.measured_ntd_file);
        ops.lam_d = io::read_ntd_csv(in, ops.mesh);
        out.log("loaded measured NtD map from " + cfg.measured_ntd_file);
    } else {
        ops.lam_d = assemble_ntd(ops.mesh, build_conductivity(ops.mesh, cfg.phantom));
    }
    ops.difference = difference_operator(ops.lam_d, ops.lam_bg);
    out.log("assembled NtD maps of dimension " + std::to_string(ops.difference.matrix.rows()));
    return ops;
}

json noise_json(const PerturbedOperator& p, double eta, std::uint64_t seed) {
    return {{"eta", eta},
            {"seed", seed},
            {"delta", p.delta},
            {"delta_r", p.delta_r},
            {"noise_norm_l2", p.noise_norm_l2},
            {"noise_norm_coord", p.noise_norm_coord}};
}

}  // namespace

RunReport cmd_forward(const ExperimentConfig& cfg, const RunContext& ctx) {
    Output out(ctx, Mode::forward, cfg);
    const Mesh mesh = cfg.build_mesh();
    require_valid(mesh);
    const ConductivityField sigma = build_conductivity(mesh, cfg.phantom);

    BoundaryCurrent g;
    if (!cfg.drive.current_file.empty()) {
        std::ifstream in(cfg.drive.current_file);
        if (!in) throw InvalidInput("drive.current_file: cannot open " + cfg.drive.current_file);
        g = io::read_current_csv(in);
        if (g.size() != mesh.boundary_count()) {
            throw InvalidInput("drive.current_file: " + std::to_string(g.size()) + " edges, mesh has " +
                               std::to_string(mesh.boundary_count()));
        }
        const double defect = compatibility_defect(mesh, g);
        if (defect > NeumannSolver::kCompatibilityTolerance) {
            BoundaryCurrent corrected = g;
            const double removed = project_zero_mean(mesh, corrected);
            throw InvalidInput("drive.current_file: net current defect " + io::fmt(defect) + " exceeds " +
                               io::fmt(NeumannSolver::kCompatibilityTolerance) + "; removing the mean would change g by " +
                               io::fmt(removed) + " in L2");
        }
    } else {
        g = fourier_drive(mesh, cfg.drive.fourier_mode, cfg.drive.sine);
    }

    const FemSolution sol = solve_neumann(mesh, sigma, g);
    const PowerDensityField p = power_density(mesh, sigma, sol);
    const double power = total_power(mesh, p);
    const double pairing = boundary_pairing(mesh, sol.applied, sol.nodal_u);

    out.write_with("solution.csv", [&](std::ostream& s) { io::write_solution_csv(s, mesh, sol.nodal_u); });
    out.write_with("power.csv", [&](std::ostream& s) { io::write_power_csv(s, mesh, p); });
    out.write_with("drive.csv", [&](std::ostream& s) { io::write_current_csv(s, sol.applied); });
    const double mean = power / region_area(mesh, RegionIndicator(mesh.element_count(), true));
    const double spread = (p.per_element.array() - mean).abs().maxCoeff() / mean;
    out.write("summary.json", dump({{"nodes", mesh.node_count()},
                                    {"elements", mesh.element_count()},
                                    {"boundary_edges", mesh.boundary_count()},
                                    {"drive_norm_squared", l2_norm_squared(mesh, sol.applied)},
                                    {"compatibility_correction", sol.compatibility_correction},
                                    {"total_power", power},
                                    {"boundary_pairing", pairing},
                                    {"energy_identity_relative_error", std::abs(power - pairing) / std::abs(pairing)},
                                    {"mean_density", mean},
                                    {"max_relative_density_deviation", spread}}));
    return out.finish();
}

RunReport cmd_ntd(const ExperimentConfig& cfg, const RunContext& ctx) {
    Output out(ctx, Mode::ntd, cfg);
    const Operators ops = build_operators(cfg, out);
    out.write_with("ntd_background.csv", [&](std::ostream& s) { io::write_ntd_csv(s, ops.lam_bg); });
    out.write_with("ntd_anomaly.csv", [&](std::ostream& s) { io::write_ntd_csv(s, ops.lam_d); });
    out.write_with("ntd_difference.csv", [&](std::ostream& s) { io::write_ntd_csv(s, ops.difference); });
    out.write("summary.json", dump({{"dimension", ops.difference.matrix.rows()},
                                    {"radius", ops.mesh.radius},
                                    {"basis", ops.lam_bg.basis.tag},
                                    {"symmetry_defect_background", ops.lam_bg.symmetry_defect},
                                    {"symmetry_defect_anomaly", ops.lam_d.symmetry_defect}}));
    return out.finish();
}

RunReport cmd_spectrum(const ExperimentConfig& cfg, const RunContext& ctx) {
    Output out(ctx, Mode::spectrum, cfg);
    const Operators ops = build_operators(cfg, out);
    const SpectralDecomposition clean = eigendecompose(ops.difference);
    const PerturbedOperator noisy = perturb(ops.difference.matrix, ops.difference.basis.gram, cfg.noise);
    const SpectralDecomposition dec =
        cfg.noise.eta > 0.0 ? eigendecompose(noisy.matrix, ops.difference.basis.gram, ops.difference.basis.tag) : clean;

    json summary = noise_json(noisy, cfg.noise.eta, cfg.noise.seed);
    summary["dimension"] = dec.size();
    summary["max_residual"] = dec.max_residual;
    summary["machine_floor"] = machine_floor(dec);
    summary["plateau"] = noise_floor(dec);
    const WeylReport weyl = weyl_check(clean.eigenvalues, dec.eigenvalues, noisy.delta);
    summary["weyl_pass"] = weyl.pass;
    summary["weyl_worst_deviation"] = weyl.worst_deviation;
    out.write_with("spectrum.csv", [&](std::ostream& s) { write_spectrum(s, dec.eigenvalues, &clean.eigenvalues); });
    try {
        const Eigen::Index k = select_eigenindex(dec, noisy.delta, cfg.kernel.safety);
        summary["k_star"] = k;
        summary["lambda_k_star"] = dec.eigenvalues[k];
        out.write_with("eigenfunction_kstar.csv",
                       [&](std::ostream& s) { io::write_current_csv(s, dec.eigenfunction(ops.difference.basis, k)); });
    } catch (const NoUsableEigenpair&) {
        summary["k_star"] = nullptr;
    }
    out.write("summary.json", dump(summary));
    return out.finish();
}

RunReport cmd_reconstruct(const ExperimentConfig& cfg, const RunContext& ctx) {
    try {
        cfg.kernel.validate();
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("kernel: ") + e.what());
    }
    Output out(ctx, Mode::reconstruct, cfg);
    const Operators ops = build_operators(cfg, out);
    NtDMatrix measured = ops.difference;
    const PerturbedOperator noisy = perturb(ops.difference.matrix, ops.difference.basis.gram, cfg.noise);
    measured.matrix = noisy.matrix;

    const ReconstructionResult r = run_kernel_method(measured, noisy.delta, cfg.kernel, ops.mesh, ops.sigma_bg);
    const RegionIndicator truth = truth_indicator(ops.mesh, cfg.phantom);
    const double area = region_area(ops.mesh, r.region);
    const EpsilonInterval iv = epsilon_interval(r.lambda_k_star, r.delta, cfg.kernel.bounds);
    out.log("k* = " + std::to_string(r.k_star) + ", lambda = " + io::fmt(r.lambda_k_star) + ", delta = " +
            io::fmt(r.delta));

    json members = json::array();
    for (const MemberReconstruction& m : r.members) {
        members.push_back({{"index", m.index},
                           {"lambda", m.lambda},
                           {"epsilon", m.epsilon},
                           {"alpha", m.alpha},
                           {"region_elements", m.region.count()}});
    }
    json summary = noise_json(noisy, cfg.noise.eta, cfg.noise.seed);
    summary["k_star"] = r.k_star;
    summary["lambda_k_star"] = r.lambda_k_star;
    summary["epsilon_star"] = r.epsilon_star;
    summary["alpha_star"] = r.alpha_star;
    summary["epsilon_interval"] = {iv.lower, iv.upper};
    summary["drive_norm_squared"] = r.drive_norm_squared;
    summary["region_elements"] = r.region.count();
    summary["region_area"] = area;
    summary["equivalent_radius"] = std::sqrt(area / std::acos(-1.0));
    summary["region_components"] = count_components(ops.mesh, r.region);
    summary["members"] = members;
    if (truth.count() > 0) {
        summary["jaccard"] = jaccard(r.region, truth, ops.mesh);
        summary["truth_area"] = region_area(ops.mesh, truth);
        summary["power_in_truth"] = power_in_region(ops.mesh, r.density, truth);
    }

    out.write_with("reconstruction.csv",
                   [&](std::ostream& s) { io::write_power_csv(s, ops.mesh, r.density, &r.region, &truth); });
    out.write_with("spectrum.csv", [&](std::ostream& s) { write_spectrum(s, r.spectrum); });
    out.write_with("drive.csv", [&](std::ostream& s) { io::write_current_csv(s, r.drive); });
    out.write_with("region.pgm",
                   [&](std::ostream& s) { io::write_pgm(s, io::rasterize(ops.mesh, r.region, cfg.raster_width)); });
    out.write_with("truth.pgm",
                   [&](std::ostream& s) { io::write_pgm(s, io::rasterize(ops.mesh, truth, cfg.raster_width)); });
    out.write("summary.json", dump(summary));
    return out.finish();
}

RunReport cmd_analytic(const ExperimentConfig& cfg, const RunContext& ctx) {
    Output out(ctx, Mode::analytic, cfg);
    const double R = cfg.mesh.radius;
    const double sbg = cfg.phantom.background_sigma;
    const auto& an = cfg.phantom.anomalies;
    const double centered = 1e-12 * R;
    std::ostringstream table;
    table << "n,disk_lambda,lambda,r_tilde,r_tilde_unit_norm\n";
    json summary;
    if (an.size() == 1 && std::holds_alternative<Disk>(an[0].shape) &&
        std::get<Disk>(an[0].shape).center.norm() <= centered) {
        const analytic::ConcentricSpec spec{std::get<Disk>(an[0].shape).radius, R, an[0].sigma, sbg};
        spec.validate();
        summary = {{"geometry", "concentric"}, {"r_i", spec.r_i}, {"R", R}};
        for (int n = 1; n <= cfg.analytic_max_n; ++n) {
            const double l = analytic::concentric_lambda(n, spec);
            table << n << ',' << io::fmt(analytic::disk_ntd_eigenvalue(n, R, sbg)) << ',' << io::fmt(l) << ','
                  << io::fmt(analytic::reconstructed_radius(n, l, R, sbg)) << ','
                  << io::fmt(analytic::reconstructed_radius_unit_norm(n, l, R, sbg)) << '\n';
        }
    } else if (an.size() == 1 && std::holds_alternative<Annulus>(an[0].shape) &&
               std::get<Annulus>(an[0].shape).center.norm() <= centered) {
        const Annulus& a = std::get<Annulus>(an[0].shape);
        const analytic::CrownSpec spec{a.r_inner, a.r_outer, R, an[0].sigma, sbg};
        spec.validate();
        summary = {{"geometry", "crown"}, {"r1", spec.r1}, {"r2", spec.r2}, {"r3", R}};
        for (int n = 1; n <= cfg.analytic_max_n; ++n) {
            const double l = analytic::crown_lambda(n, spec);
            table << n << ',' << io::fmt(analytic::disk_ntd_eigenvalue(n, R, sbg)) << ',' << io::fmt(l) << ','
                  << io::fmt(analytic::crown_outer_radius(n, l, R, sbg)) << ','
                  << io::fmt(analytic::crown_outer_radius_unit_norm(n, l, R, sbg)) << '\n';
        }
    } else {
        throw InvalidInput("phantom.anomalies: analytic mode needs exactly one origin-centered disk or annulus");
    }
    out.write("analytic.csv", table.str());
    out.write("summary.json", dump(summary));
    return out.finish();
}

RunReport cmd_noise_sweep(const ExperimentConfig& cfg, const RunContext& ctx) {
    Output out(ctx, Mode::noise_sweep, cfg);
    const Operators ops = build_operators(cfg, out);
    const SpectralDecomposition clean = eigendecompose(ops.difference);

    struct Cell {
        double eta = 0.0;
        std::uint64_t seed = 0;
        PerturbedOperator noisy;
        Eigen::VectorXd lambda;
        double plateau = 0.0;
        WeylReport weyl;
    };
    std::vector<Cell> cells;
    for (const double eta : cfg.sweep.etas) {
        for (const std::uint64_t seed : cfg.sweep.seeds) cells.push_back({eta, seed, {}, {}, 0.0, {}});
    }
    parallel_for(cells.size(), [&](std::size_t i) {
        Cell& c = cells[i];
        c.noisy = perturb(ops.difference.matrix, ops.difference.basis.gram, {c.eta, c.seed});
        const SpectralDecomposition dec =
            eigendecompose(c.noisy.matrix, ops.difference.basis.gram, ops.difference.basis.tag);
        c.lambda = dec.eigenvalues;
        c.plateau = noise_floor(dec);
        c.weyl = weyl_check(clean.eigenvalues, dec.eigenvalues, c.noisy.delta);
    });
    out.log("decomposed " + std::to_string(cells.size()) + " perturbed operators");

    std::ostringstream table;
    table << "eta,seed,index,lambda,abs_lambda\n";
    for (Eigen::Index k = 0; k < clean.size(); ++k) {
        table << "0,0," << k << ',' << io::fmt(clean.eigenvalues[k]) << ',' << io::fmt(std::abs(clean.eigenvalues[k]))
              << '\n';
    }
    json report = json::array();
    for (const Cell& c : cells) {
        for (Eigen::Index k = 0; k < c.lambda.size(); ++k) {
            table << io::fmt(c.eta) << ',' << c.seed << ',' << k << ',' << io::fmt(c.lambda[k]) << ','
                  << io::fmt(std::abs(c.lambda[k])) << '\n';
        }
        json cell = noise_json(c.noisy, c.eta, c.seed);
        cell["plateau"] = c.plateau;
        cell["plateau_over_delta"] = c.noisy.delta > 0.0 ? json(c.plateau / c.noisy.delta) : json(nullptr);
        cell["weyl_pass"] = c.weyl.pass;
        cell["weyl_worst_deviation"] = c.weyl.worst_deviation;
        report.push_back(cell);
    }
    out.write("sweep.csv", table.str());
    out.write("summary.json", dump({{"clean_machine_floor", machine_floor(clean)}, {"cells", report}}));
    return out.finish();
}

RunReport run_mode(Mode mode, const ExperimentConfig& cfg, const RunContext& ctx) {
    switch (mode) {
        case Mode::forward: return cmd_forward(cfg, ctx);
        case Mode::ntd: return cmd_ntd(cfg, ctx);
        case Mode::spectrum: return cmd_spectrum(cfg, ctx);
        case Mode::reconstruct: return cmd_reconstruct(cfg, ctx);
        case Mode::analytic: return cmd_analytic(cfg, ctx);
        case Mode::noise_sweep: return cmd_noise_sweep(cfg, ctx);
    }
    throw InvalidInput("unknown mode");
}

}  // namespace kert
