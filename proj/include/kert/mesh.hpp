#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace kert {

using Point = Eigen::Vector2d;

/// Conforming triangulation of a disk. Triangles are counterclockwise and
/// boundary edges trace the outer circle counterclockwise as a single cycle.
struct Mesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> boundary_edges;
    double radius = 0.0;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return triangles.size(); }
    std::size_t boundary_count() const { return boundary_edges.size(); }

    double signed_area(std::size_t element) const;
    double area(std::size_t element) const { return signed_area(element); }
    Point centroid(std::size_t element) const;
    double edge_length(std::size_t edge) const;
    /// Polar angles of the two endpoints of a boundary edge, the second
    /// unwrapped so that it exceeds the first.
    std::array<double, 2> edge_angles(std::size_t edge) const;
};

/// Per-element boolean flag; houses anomaly regions and reconstructions.
struct RegionIndicator {
    std::vector<bool> per_element;

    RegionIndicator() = default;
    explicit RegionIndicator(std::size_t n, bool value = false) : per_element(n, value) {}

    std::size_t size() const { return per_element.size(); }
    std::size_t count() const;
    bool operator[](std::size_t i) const { return per_element[i]; }
    bool operator==(const RegionIndicator&) const = default;
};

struct MeshOptions {
    /// Interior radii that must coincide with a node ring. Each one moves
    /// the nearest ring onto it so that circular interfaces are resolved.
    std::vector<double> conforming_radii;
    /// Extra rings of n_boundary nodes each, evenly spaced in an outer band
    /// of relative thickness band_thickness. Zero means no band.
    int band_rings = 0;
    double band_thickness = 0.2;
};

/// Concentric-ring triangulation. The core disk of radius
/// radius * (1 - band_thickness) (the full disk without a band) holds rings
/// k = 1..n_rings at radius k * core / n_rings carrying
/// 4 * round(n_boundary * k / (4 * n_rings)) nodes around a single center
/// node. Optional band rings follow, alternately rotated by half a spacing.
/// Consecutive rings are stitched with the shorter diagonal. The triangle
/// count is 2 * (nodes - 1) - n_boundary: (256, 64) without a band and
/// (256, 44) with 10 band rings both give 8321 nodes and 16384 triangles.
Mesh generate_disk_mesh(double radius, int n_boundary, int n_rings, const MeshOptions& options = {});

/// 256 boundary edges, 44 core rings, 10 band rings over the outer 12%:
/// 16384 triangles and 8321 nodes.
Mesh reference_mesh(double radius, std::vector<double> conforming_radii = {});

struct MeshReport {
    double min_area = 0.0;
    double max_area = 0.0;
    double min_angle_deg = 0.0;
    double boundary_length_spread = 0.0;  // (max - min) / mean edge length
    double max_radius_defect = 0.0;       // max |r - R| / R over boundary nodes
    long euler_characteristic = 0;
    bool single_boundary_cycle = false;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Reports invariant violations without repairing anything.
MeshReport mesh_diagnostics(const Mesh& mesh);

/// Throws InvalidInput listing the violations when the mesh is not valid.
void require_valid(const Mesh& mesh);

/// Number of connected components of a region under edge adjacency.
std::size_t count_components(const Mesh& mesh, const RegionIndicator& region);

/// Sum of element areas over a region.
double region_area(const Mesh& mesh, const RegionIndicator& region);

/// Text format: node count then "x y" lines, triangle count then "i j k"
/// lines, boundary edge count then "i j" lines, all 0-based, 17 significant
/// digits.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace kert
