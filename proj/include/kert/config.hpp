#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kert/mesh.hpp"
#include "kert/noise.hpp"
#include "kert/phantom.hpp"
#include "kert/reconstruct.hpp"

namespace kert {

enum class Mode { forward, ntd, spectrum, reconstruct, analytic, noise_sweep };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct MeshParams {
    double radius = 0.0;  // m
    int boundary_edges = 256;
    int core_rings = 44;
    int band_rings = 10;
    double band_thickness = 0.12;
    bool conform_to_phantom = true;
};

struct DriveParams {
    int fourier_mode = 1;
    bool sine = false;
    std::string current_file;  // edge,g CSV; overrides the Fourier drive when set
};

struct SweepParams {
    std::vector<double> etas{1e-4, 1e-3, 1e-2};
    std::vector<std::uint64_t> seeds{0};
};

/// Experiment description parsed from JSON. Lengths and conductivities are
/// strings with explicit units ("2.5 cm", "200 S/m"); bare numbers are
/// rejected for those fields.
struct ExperimentConfig {
    std::optional<Mode> mode;
    MeshParams mesh;
    PhantomSpec phantom;
    NoiseSpec noise;
    KernelConfig kernel;
    DriveParams drive;
    SweepParams sweep;
    std::string measured_ntd_file;
    int analytic_max_n = 20;
    int raster_width = 256;
    std::string output_dir;
    /// The parsed document without output_dir and with overrides applied,
    /// serialized deterministically. Written into manifests.
    std::string canonical;

    void validate() const;
    Mesh build_mesh() const;
};

/// Accepts either a configuration object or a manifest whose "config" key
/// holds one.
ExperimentConfig parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// "2.5 cm" -> 0.025. Accepted units: m, cm, mm, um.
double parse_length(const std::string& text);
/// "200 S/m" -> 200. Accepted units: S/m, mS/m, S/cm.
double parse_conductivity(const std::string& text);
/// "30 deg" or "0.5 rad" -> radians.
double parse_angle(const std::string& text);

}  // namespace kert
