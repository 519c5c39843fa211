#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "kert/mesh.hpp"

namespace kert {

struct Disk {
    Point center{0.0, 0.0};
    double radius = 0.0;
};

struct Ellipse {
    Point center{0.0, 0.0};
    double semi_major = 0.0;  // along the rotated x axis
    double semi_minor = 0.0;
    double rotation = 0.0;    // radians, counterclockwise
};

struct Annulus {
    Point center{0.0, 0.0};
    double r_inner = 0.0;
    double r_outer = 0.0;
};

struct Polygon {
    std::vector<Point> vertices;
};

using Shape = std::variant<Disk, Ellipse, Annulus, Polygon>;

struct Anomaly {
    Shape shape;
    double sigma = 0.0;  // S/m
};

/// Piecewise-constant conductivity: background everywhere except inside the
/// listed anomalies.
struct PhantomSpec {
    double background_sigma = 0.0;
    std::vector<Anomaly> anomalies;

    /// Positivity, shape sanity, and well-separation of the anomaly and
    /// background conductivity ranges.
    void validate() const;
};

/// Per-element conductivity in S/m.
struct ConductivityField {
    Eigen::VectorXd per_element;

    std::size_t size() const { return static_cast<std::size_t>(per_element.size()); }
    static ConductivityField uniform(std::size_t n, double sigma) {
        return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), sigma)};
    }
};

bool contains(const Shape& shape, const Point& p);

/// Largest distance from the origin reached by the shape.
double max_extent(const Shape& shape);

ConductivityField build_conductivity(const Mesh& mesh, const PhantomSpec& spec);
RegionIndicator truth_indicator(const Mesh& mesh, const PhantomSpec& spec);

/// Radii of origin-centered circular interfaces (disk rims, annulus rims),
/// suitable as MeshOptions::conforming_radii.
std::vector<double> circular_interfaces(const PhantomSpec& spec);

}  // namespace kert
