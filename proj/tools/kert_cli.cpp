#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kert/commands.hpp"
#include "kert/config.hpp"
#include "kert/error.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kNoUsableEigenpair = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel Method toolkit for 2D electrical resistance tomography"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    const std::pair<const char*, const char*> modes[] = {
        {"forward", "Solve one Neumann problem and export potential and power density"},
        {"ntd", "Assemble the NtD matrices and export them as dense CSV"},
        {"spectrum", "Eigendecompose the (optionally noisy) difference operator"},
        {"reconstruct", "Run the Kernel Method reconstruction"},
        {"analytic", "Tabulate closed-form eigenvalues and reconstructed radii"},
        {"noise-sweep", "Perturbed spectra over noise levels and seeds"},
    };
    for (const auto& [name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration or manifest")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
        sub->add_option("--seed", seed, "Noise seed (overrides noise.seed)");
        sub->add_flag("--quiet", quiet, "Suppress progress messages");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    const std::string mode_str = app.get_subcommands().front()->get_name();
    try {
        const kert::Mode mode = kert::parse_mode(mode_str);
        const kert::ExperimentConfig cfg = kert::load_config(config_path, seed);
        if (cfg.mode && *cfg.mode != mode) {
            throw kert::InvalidInput("config.mode is '" + kert::mode_name(*cfg.mode) + "' but the subcommand is '" +
                                     mode_str + "'");
        }
        const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
        if (dir.empty()) throw kert::InvalidInput("no output directory: pass --out or set output_dir");
        const kert::RunReport report = kert::run_mode(mode, cfg, {dir, quiet ? nullptr : &std::clog});
        if (!quiet) std::clog << "[kert " << mode_str << "] done: " << report.manifest.string() << '\n';
        return 0;
    } catch (const kert::InvalidInput& e) {
        std::cerr << "kert: invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const kert::NoUsableEigenpair& e) {
        std::cerr << "kert: no usable eigenpair: " << e.what() << '\n';
        return kNoUsableEigenpair;
    } catch (const kert::NumericalFailure& e) {
        std::cerr << "kert: numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "kert: error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}
