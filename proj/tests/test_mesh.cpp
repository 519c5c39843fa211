#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "kert/error.hpp"
#include "kert/mesh.hpp"
#include "fixtures.hpp"

using namespace kert;
using kert::testing::kPi;

namespace {

double boundary_polygon_area(const Mesh& m) {
    double a = 0.0;
    for (const auto& e : m.boundary_edges) {
        const Point& p = m.nodes[static_cast<std::size_t>(e[0])];
        const Point& q = m.nodes[static_cast<std::size_t>(e[1])];
        a += 0.5 * (p.x() * q.y() - q.x() * p.y());
    }
    return a;
}

double total_area(const Mesh& m) { return region_area(m, RegionIndicator(m.element_count(), true)); }

}  // namespace

TEST_CASE("reference mesh counts") {
    const Mesh m = reference_mesh(0.025);
    CHECK(m.element_count() == 16384);
    CHECK(m.node_count() == 8321);
    CHECK(m.boundary_count() == 256);
    const MeshReport r = mesh_diagnostics(m);
    CHECK(r.ok());
    CHECK(r.min_angle_deg > 20.0);
    CHECK(r.euler_characteristic == 1);
}

TEST_CASE("uniform ring layout has the same counts") {
    const Mesh m = generate_disk_mesh(0.025, 256, 64);
    CHECK(m.element_count() == 16384);
    CHECK(m.node_count() == 8321);
    CHECK(mesh_diagnostics(m).ok());
}

TEST_CASE("minimal eight edge disk") {
    const Mesh m = generate_disk_mesh(1.0, 8, 1);
    CHECK(m.boundary_count() == 8);
    CHECK(m.node_count() == 9);
    CHECK(m.element_count() == 8);
    const MeshReport r = mesh_diagnostics(m);
    CHECK(r.euler_characteristic == 1);
    CHECK(r.single_boundary_cycle);
    CHECK(r.ok());
}

TEST_CASE("boundary edges have equal length") {
    const Mesh m = generate_disk_mesh(0.1, 64, 16);
    double lo = 1e300, hi = 0.0;
    for (std::size_t e = 0; e < m.boundary_count(); ++e) {
        lo = std::min(lo, m.edge_length(e));
        hi = std::max(hi, m.edge_length(e));
    }
    CHECK((hi - lo) / lo < 1e-9);
    CHECK(mesh_diagnostics(m).boundary_length_spread < 1e-9);
}

TEST_CASE("every boundary node lies on the circle and appears in two edges") {
    const Mesh m = reference_mesh(0.1);
    std::vector<int> uses(m.node_count(), 0);
    for (const auto& e : m.boundary_edges) {
        ++uses[static_cast<std::size_t>(e[0])];
        ++uses[static_cast<std::size_t>(e[1])];
        CHECK(std::abs(m.nodes[static_cast<std::size_t>(e[0])].norm() / 0.1 - 1.0) < 1e-12);
    }
    for (const auto& e : m.boundary_edges) CHECK(uses[static_cast<std::size_t>(e[0])] == 2);
}

TEST_CASE("area matches the inscribed polygon deficit") {
    for (const auto& [radius, nb, rings] : std::vector<std::tuple<double, int, int>>{
             {1.0, 8, 1}, {0.1, 64, 16}, {0.025, 256, 64}, {2.0, 32, 3}, {0.5, 128, 7}}) {
        CAPTURE(nb);
        const Mesh m = generate_disk_mesh(radius, nb, rings);
        const double deficit = kPi * radius * radius - total_area(m);
        const double predicted = 2.0 * kPi * kPi * kPi * radius * radius / (3.0 * nb * nb);
        CHECK(deficit == doctest::Approx(predicted).epsilon(0.2));
    }
}

TEST_CASE("boundary runs counterclockwise and triangles are positive") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const int rings = 1 + static_cast<int>(rng() % 12);
        const int nb = 4 * (rings + static_cast<int>(rng() % 20));
        const double radius = 0.01 + 0.001 * static_cast<double>(rng() % 1000);
        CAPTURE(nb);
        CAPTURE(rings);
        MeshOptions opt;
        opt.band_rings = static_cast<int>(rng() % 3);
        const Mesh m = generate_disk_mesh(radius, std::max(nb, 8), rings, opt);
        CHECK(boundary_polygon_area(m) > 0.0);
        const MeshReport r = mesh_diagnostics(m);
        CHECK(r.min_area > 0.0);
        CHECK(r.ok());
    }
}

TEST_CASE("diagnostics flag a clockwise triangle without repairing it") {
    Mesh m = generate_disk_mesh(1.0, 8, 1);
    std::swap(m.triangles[3][1], m.triangles[3][2]);
    const MeshReport r = mesh_diagnostics(m);
    CHECK_FALSE(r.ok());
    CHECK(r.min_area < 0.0);
    CHECK(m.signed_area(3) < 0.0);
    CHECK_THROWS_AS(require_valid(m), InvalidInput);
}

TEST_CASE("diagnostics flag a broken boundary cycle") {
    Mesh m = generate_disk_mesh(1.0, 16, 2);
    m.boundary_edges.pop_back();
    CHECK_FALSE(mesh_diagnostics(m).ok());
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(generate_disk_mesh(0.0, 8, 1), InvalidInput);
    CHECK_THROWS_AS(generate_disk_mesh(-1.0, 8, 1), InvalidInput);
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 10, 1), InvalidInput);
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 4, 1), InvalidInput);
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 16, 0), InvalidInput);
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 16, 5), InvalidInput);
    MeshOptions outside;
    outside.conforming_radii = {1.5};
    CHECK_THROWS_AS(generate_disk_mesh(1.0, 64, 8, outside), InvalidInput);
}

TEST_CASE("conforming radius lands on a node ring") {
    MeshOptions opt;
    opt.conforming_radii = {0.0437};
    const Mesh m = generate_disk_mesh(0.1, 256, 64, opt);
    int on_ring = 0;
    for (const Point& p : m.nodes) on_ring += std::abs(p.norm() - 0.0437) < 1e-14;
    CHECK(on_ring > 0);
    CHECK(mesh_diagnostics(m).ok());
    CHECK(m.element_count() == 16384);
}

TEST_CASE("element count grows quadratically with rings") {
    const std::size_t a = generate_disk_mesh(1.0, 512, 16).element_count();
    const std::size_t b = generate_disk_mesh(1.0, 512, 32).element_count();
    CHECK(static_cast<double>(b) / static_cast<double>(a) > 1.5);
    CHECK(generate_disk_mesh(1.0, 4 * 32, 32).element_count() == 4 * 32 * 32);
}

TEST_CASE("components and areas of regions") {
    const Mesh m = generate_disk_mesh(1.0, 64, 16);
    RegionIndicator none(m.element_count());
    CHECK(count_components(m, none) == 0);
    CHECK(region_area(m, none) == 0.0);
    RegionIndicator two(m.element_count());
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const Point c = m.centroid(e);
        two.per_element[e] = (c - Point(0.5, 0.0)).norm() < 0.2 || (c - Point(-0.5, 0.0)).norm() < 0.2;
    }
    CHECK(count_components(m, two) == 2);
    CHECK(region_area(m, two) == doctest::Approx(2 * kPi * 0.04).epsilon(0.15));
}

TEST_CASE("text round trip preserves the mesh exactly") {
    const Mesh m = generate_disk_mesh(0.025, 64, 8);
    std::stringstream s;
    write_mesh(s, m);
    const Mesh r = read_mesh(s);
    REQUIRE(r.node_count() == m.node_count());
    for (std::size_t i = 0; i < m.node_count(); ++i) CHECK(r.nodes[i] == m.nodes[i]);
    CHECK(r.triangles == m.triangles);
    CHECK(r.boundary_edges == m.boundary_edges);
    CHECK(r.radius == doctest::Approx(m.radius).epsilon(1e-14));

    std::stringstream bad("3\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(bad), InvalidInput);
}
