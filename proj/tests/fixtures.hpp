#pragma once

#include <cmath>

#include "kert/fem.hpp"
#include "kert/mesh.hpp"
#include "kert/ntd.hpp"
#include "kert/phantom.hpp"

namespace kert::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline PhantomSpec centered_disk(double radius, double sigma_a = 1.0, double sigma_bg = 200.0) {
    return {sigma_bg, {Anomaly{Disk{{0.0, 0.0}, radius}, sigma_a}}};
}

/// Background and anomaly NtD maps on one mesh.
struct PhantomOperators {
    Mesh mesh;
    ConductivityField sigma_bg;
    NtDMatrix lam_bg;
    NtDMatrix lam_d;
    NtDMatrix difference;
    RegionIndicator truth;
};

inline PhantomOperators build(const PhantomSpec& spec, Mesh mesh) {
    PhantomOperators ops;
    ops.mesh = std::move(mesh);
    ops.sigma_bg = ConductivityField::uniform(ops.mesh.element_count(), spec.background_sigma);
    ops.lam_bg = assemble_ntd(ops.mesh, ops.sigma_bg);
    ops.lam_d = assemble_ntd(ops.mesh, build_conductivity(ops.mesh, spec));
    ops.difference = difference_operator(ops.lam_d, ops.lam_bg);
    ops.truth = truth_indicator(ops.mesh, spec);
    return ops;
}

inline PhantomOperators build_reference(const PhantomSpec& spec, double radius) {
    return build(spec, reference_mesh(radius, circular_interfaces(spec)));
}

/// Concentric configuration R = 0.1, r_i = 0.04, sigma 1 / 200 on the reference
/// mesh, built once per process.
inline const PhantomOperators& concentric_reference() {
    static const PhantomOperators ops = build_reference(centered_disk(0.04), 0.1);
    return ops;
}

}  // namespace kert::testing
