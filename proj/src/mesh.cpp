#include "kert/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kert/error.hpp"

namespace kert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

std::array<int, 2> sorted_edge(int a, int b) { return a < b ? std::array{a, b} : std::array{b, a}; }

// Joins two consecutive rings, choosing at each step the shorter of the two
// candidate diagonals unless that would fold a triangle. Both rings start
// within half a spacing of angle 0, so the cyclic walk closes consistently.
void stitch_rings(const std::vector<Point>& nodes, const std::vector<int>& inner, const std::vector<int>& outer,
                  std::vector<std::array<int, 3>>& triangles) {
    const std::size_t a = inner.size();
    const std::size_t b = outer.size();
    auto positive = [&](int p, int q, int r) { return cross(nodes[q] - nodes[p], nodes[r] - nodes[p]) > 0.0; };
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a || j < b) {
        const int in_i = inner[i % a];
        const int out_j = outer[j % b];
        const int in_next = inner[(i + 1) % a];
        const int out_next = outer[(j + 1) % b];
        bool advance_outer;
        if (i == a) {
            advance_outer = true;
        } else if (j == b) {
            advance_outer = false;
        } else {
            const bool outer_ok = positive(in_i, out_j, out_next);
            const bool inner_ok = positive(in_i, out_j, in_next);
            if (outer_ok != inner_ok) {
                advance_outer = outer_ok;
            } else {
                advance_outer =
                    (nodes[in_i] - nodes[out_next]).squaredNorm() <= (nodes[in_next] - nodes[out_j]).squaredNorm();
            }
        }
        if (advance_outer) {
            triangles.push_back({in_i, out_j, out_next});
            ++j;
        } else {
            triangles.push_back({in_i, out_j, in_next});
            ++i;
        }
    }
}

}  // namespace

double Mesh::signed_area(std::size_t element) const {
    const auto& t = triangles[element];
    const Point& p0 = nodes[t[0]];
    return 0.5 * cross(nodes[t[1]] - p0, nodes[t[2]] - p0);
}

Point Mesh::centroid(std::size_t element) const {
    const auto& t = triangles[element];
    return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

double Mesh::edge_length(std::size_t edge) const {
    const auto& e = boundary_edges[edge];
    return (nodes[e[1]] - nodes[e[0]]).norm();
}

std::array<double, 2> Mesh::edge_angles(std::size_t edge) const {
    const auto& e = boundary_edges[edge];
    const double t0 = std::atan2(nodes[e[0]].y(), nodes[e[0]].x());
    double t1 = std::atan2(nodes[e[1]].y(), nodes[e[1]].x());
    while (t1 <= t0) t1 += kTwoPi;
    return {t0, t1};
}

std::size_t RegionIndicator::count() const {
    return static_cast<std::size_t>(std::count(per_element.begin(), per_element.end(), true));
}

Mesh generate_disk_mesh(double radius, int n_boundary, int n_rings, const MeshOptions& options) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidInput("mesh radius must be positive, got " + std::to_string(radius));
    }
    if (n_boundary < 8 || n_boundary % 4 != 0) {
        throw InvalidInput("n_boundary must be >= 8 and divisible by 4, got " + std::to_string(n_boundary));
    }
    if (n_rings < 1) {
        throw InvalidInput("n_rings must be >= 1, got " + std::to_string(n_rings));
    }
    if (n_boundary < 4 * n_rings) {
        throw InvalidInput("n_boundary must be at least 4 * n_rings so that ring node counts grow strictly");
    }

    if (options.band_rings < 0) throw InvalidInput("band_rings must be non-negative");
    if (options.band_rings > 0 && !(options.band_thickness > 0.0 && options.band_thickness < 1.0)) {
        throw InvalidInput("band_thickness must lie in (0, 1)");
    }

    struct Ring {
        double r;
        int count;
        double offset;  // fraction of the angular spacing
    };
    std::vector<Ring> rings;
    const double core = options.band_rings > 0 ? radius * (1.0 - options.band_thickness) : radius;
    for (int k = 1; k <= n_rings; ++k) {
        const long q = std::lround(static_cast<double>(n_boundary) * k / (4.0 * n_rings));
        const int count = k == n_rings ? n_boundary : 4 * static_cast<int>(std::max(1L, q));
        rings.push_back({core * k / n_rings, count, 0.0});
    }
    for (int k = 1; k <= options.band_rings; ++k) {
        rings.push_back({core + (radius - core) * k / options.band_rings, n_boundary, 0.5 * (k % 2)});
    }
    rings.back().r = radius;
    rings.back().offset = 0.0;

    std::vector<bool> snapped(rings.size(), false);
    for (double rho : options.conforming_radii) {
        if (!(rho > 0.0 && rho < radius)) {
            throw InvalidInput("conforming radius must lie strictly inside the disk");
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < rings.size(); ++k)
            if (std::abs(rings[k].r - rho) < std::abs(rings[best].r - rho)) best = k;
        if (best + 1 == rings.size()) continue;  // nearest ring is the boundary itself
        const double below = best == 0 ? rings[0].r : rings[best].r - rings[best - 1].r;
        const double above = rings[best + 1].r - rings[best].r;
        if (std::abs(rings[best].r - rho) > 0.5 * std::min(below, above)) continue;
        if (snapped[best] && rings[best].r != rho) {
            throw InvalidInput("two conforming radii map onto the same node ring; refine the mesh");
        }
        rings[best].r = rho;
        snapped[best] = true;
    }

    Mesh mesh;
    mesh.radius = radius;
    mesh.nodes.emplace_back(0.0, 0.0);

    std::vector<int> prev_ring;
    for (std::size_t k = 0; k < rings.size(); ++k) {
        const Ring& ring_spec = rings[k];
        std::vector<int> ring(ring_spec.count);
        for (int j = 0; j < ring_spec.count; ++j) {
            const double angle = kTwoPi * (j + ring_spec.offset) / ring_spec.count;
            ring[j] = static_cast<int>(mesh.nodes.size());
            if (k + 1 == rings.size()) {
                mesh.nodes.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
            } else {
                mesh.nodes.emplace_back(ring_spec.r * std::cos(angle), ring_spec.r * std::sin(angle));
            }
        }
        if (k == 0) {
            for (int j = 0; j < ring_spec.count; ++j) mesh.triangles.push_back({0, ring[j], ring[(j + 1) % ring_spec.count]});
        } else {
            stitch_rings(mesh.nodes, prev_ring, ring, mesh.triangles);
        }
        prev_ring = std::move(ring);
    }

    const std::size_t nb = prev_ring.size();
    for (std::size_t j = 0; j < nb; ++j) mesh.boundary_edges.push_back({prev_ring[j], prev_ring[(j + 1) % nb]});
    return mesh;
}

MeshReport mesh_diagnostics(const Mesh& mesh) {
    MeshReport report;
    report.min_area = std::numeric_limits<double>::infinity();
    report.max_area = -std::numeric_limits<double>::infinity();
    report.min_angle_deg = 180.0;
    const auto n = static_cast<int>(mesh.node_count());

    std::map<std::array<int, 2>, int> edge_use;
    std::size_t bad_area = 0;
    for (std::size_t t = 0; t < mesh.element_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (std::any_of(tri.begin(), tri.end(), [n](int v) { return v < 0 || v >= n; })) {
            report.violations.push_back("triangle " + std::to_string(t) + " references a missing node");
            continue;
        }
        const double a = mesh.signed_area(t);
        report.min_area = std::min(report.min_area, a);
        report.max_area = std::max(report.max_area, a);
        if (!(a > 0.0)) ++bad_area;
        for (int c = 0; c < 3; ++c) {
            const Point& p = mesh.nodes[tri[c]];
            const Point u = mesh.nodes[tri[(c + 1) % 3]] - p;
            const Point v = mesh.nodes[tri[(c + 2) % 3]] - p;
            const double ang = std::atan2(std::abs(cross(u, v)), u.dot(v)) * 180.0 / std::numbers::pi;
            report.min_angle_deg = std::min(report.min_angle_deg, ang);
            ++edge_use[sorted_edge(tri[c], tri[(c + 1) % 3])];
        }
    }
    if (bad_area > 0) {
        report.violations.push_back(std::to_string(bad_area) + " triangle(s) with non-positive signed area");
    }
    for (const auto& [edge, uses] : edge_use) {
        if (uses > 2) {
            report.violations.push_back("edge shared by more than two triangles");
            break;
        }
    }

    std::vector<int> used(n, 0);
    for (const auto& tri : mesh.triangles)
        for (int v : tri)
            if (v >= 0 && v < n) used[v] = 1;
    const long used_nodes = std::count(used.begin(), used.end(), 1);
    report.euler_characteristic =
        used_nodes - static_cast<long>(edge_use.size()) + static_cast<long>(mesh.element_count());
    if (report.euler_characteristic != 1) {
        report.violations.push_back("Euler characteristic is " + std::to_string(report.euler_characteristic) +
                                    ", expected 1 for a disk");
    }

    // Boundary: single closed cycle, each node in exactly two edges.
    const std::size_t nb = mesh.boundary_count();
    bool cycle = nb >= 3;
    std::map<int, int> degree;
    for (std::size_t e = 0; e < nb && cycle; ++e) {
        const auto& be = mesh.boundary_edges[e];
        if (be[0] < 0 || be[0] >= n || be[1] < 0 || be[1] >= n) {
            cycle = false;
            break;
        }
        ++degree[be[0]];
        ++degree[be[1]];
        if (be[1] != mesh.boundary_edges[(e + 1) % nb][0]) cycle = false;
        const auto it = edge_use.find(sorted_edge(be[0], be[1]));
        if (it == edge_use.end() || it->second != 1) cycle = false;
    }
    for (const auto& [node, d] : degree)
        if (d != 2) cycle = false;
    if (cycle) {
        std::size_t free_edges = 0;
        for (const auto& [edge, uses] : edge_use)
            if (uses == 1) ++free_edges;
        if (free_edges != nb) cycle = false;
    }
    report.single_boundary_cycle = cycle;
    if (!cycle) report.violations.push_back("boundary edges do not form a single closed cycle");

    if (cycle) {
        double lmin = std::numeric_limits<double>::infinity();
        double lmax = 0.0;
        double lsum = 0.0;
        double polygon_area = 0.0;
        for (std::size_t e = 0; e < nb; ++e) {
            const double len = mesh.edge_length(e);
            lmin = std::min(lmin, len);
            lmax = std::max(lmax, len);
            lsum += len;
            const auto& be = mesh.boundary_edges[e];
            polygon_area += 0.5 * cross(mesh.nodes[be[0]], mesh.nodes[be[1]]);
            const double r = mesh.nodes[be[0]].norm();
            report.max_radius_defect = std::max(report.max_radius_defect, std::abs(r - mesh.radius) / mesh.radius);
        }
        report.boundary_length_spread = (lmax - lmin) / (lsum / nb);
        if (report.boundary_length_spread > 1e-9) {
            report.violations.push_back("boundary edge lengths differ beyond 1e-9 relative");
        }
        if (report.max_radius_defect > 1e-12) {
            report.violations.push_back("boundary node off the circle beyond 1e-12 relative");
        }
        if (!(polygon_area > 0.0)) report.violations.push_back("boundary is not oriented counterclockwise");
    }
    return report;
}

Mesh reference_mesh(double radius, std::vector<double> conforming_radii) {
    MeshOptions options;
    options.conforming_radii = std::move(conforming_radii);
    options.band_rings = 10;
    options.band_thickness = 0.12;
    return generate_disk_mesh(radius, 256, 44, options);
}

void require_valid(const Mesh& mesh) {
    const MeshReport report = mesh_diagnostics(mesh);
    if (report.ok()) return;
    std::string msg = "invalid mesh:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw InvalidInput(msg);
}

std::size_t count_components(const Mesh& mesh, const RegionIndicator& region) {
    if (region.size() != mesh.element_count()) throw InvalidInput("region size does not match mesh");
    std::map<std::array<int, 2>, std::vector<int>> by_edge;
    for (std::size_t t = 0; t < mesh.element_count(); ++t) {
        if (!region[t]) continue;
        const auto& tri = mesh.triangles[t];
        for (int c = 0; c < 3; ++c) by_edge[sorted_edge(tri[c], tri[(c + 1) % 3])].push_back(static_cast<int>(t));
    }
    std::vector<int> parent(mesh.element_count());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [edge, ts] : by_edge)
        if (ts.size() == 2) parent[find(ts[0])] = find(ts[1]);
    std::size_t components = 0;
    for (std::size_t t = 0; t < mesh.element_count(); ++t)
        if (region[t] && find(static_cast<int>(t)) == static_cast<int>(t)) ++components;
    return components;
}

double region_area(const Mesh& mesh, const RegionIndicator& region) {
    if (region.size() != mesh.element_count()) throw InvalidInput("region size does not match mesh");
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.element_count(); ++t)
        if (region[t]) total += mesh.area(t);
    return total;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    const auto old_flags = out.flags();
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << mesh.node_count() << '\n';
    for (const auto& p : mesh.nodes) out << p.x() << ' ' << p.y() << '\n';
    out << mesh.element_count() << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << mesh.boundary_count() << '\n';
    for (const auto& e : mesh.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
    out.flags(old_flags);
    out.precision(old_precision);
}

Mesh read_mesh(std::istream& in) {
    Mesh mesh;
    std::size_t count = 0;
    auto fail = [](const std::string& what) { throw InvalidInput("malformed mesh file: " + what); };
    if (!(in >> count)) fail("node count");
    mesh.nodes.resize(count);
    for (auto& p : mesh.nodes)
        if (!(in >> p.x() >> p.y())) fail("node coordinates");
    if (!(in >> count)) fail("triangle count");
    mesh.triangles.resize(count);
    for (auto& t : mesh.triangles)
        if (!(in >> t[0] >> t[1] >> t[2])) fail("triangle indices");
    if (!(in >> count)) fail("boundary edge count");
    mesh.boundary_edges.resize(count);
    for (auto& e : mesh.boundary_edges)
        if (!(in >> e[0] >> e[1])) fail("boundary edge indices");
    if (mesh.boundary_edges.empty()) fail("no boundary edges");
    double rsum = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        if (e[0] < 0 || static_cast<std::size_t>(e[0]) >= mesh.nodes.size()) fail("boundary node index");
        rsum += mesh.nodes[e[0]].norm();
    }
    mesh.radius = rsum / static_cast<double>(mesh.boundary_edges.size());
    return mesh;
}

}  // namespace kert
