#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kert/config.hpp"

namespace kert {

struct RunContext {
    std::filesystem::path out_dir;
    std::ostream* log = nullptr;  // progress messages; null for quiet runs
};

/// Files written by a command, in write order, with their SHA-256. The
/// manifest itself is written last and is not listed.
struct RunReport {
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::filesystem::path manifest;
};

RunReport cmd_forward(const ExperimentConfig& cfg, const RunContext& ctx);
RunReport cmd_ntd(const ExperimentConfig& cfg, const RunContext& ctx);
RunReport cmd_spectrum(const ExperimentConfig& cfg, const RunContext& ctx);
RunReport cmd_reconstruct(const ExperimentConfig& cfg, const RunContext& ctx);
RunReport cmd_analytic(const ExperimentConfig& cfg, const RunContext& ctx);
RunReport cmd_noise_sweep(const ExperimentConfig& cfg, const RunContext& ctx);

RunReport run_mode(Mode mode, const ExperimentConfig& cfg, const RunContext& ctx);

}  // namespace kert
