#include "kert/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kert/error.hpp"

namespace kert {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void validate_shape(const Shape& shape) {
    std::visit(overloaded{
                   [](const Disk& d) {
                       if (!(d.radius > 0.0)) throw InvalidInput("disk radius must be positive");
                   },
                   [](const Ellipse& e) {
                       if (!(e.semi_major > 0.0 && e.semi_minor > 0.0))
                           throw InvalidInput("ellipse semi-axes must be positive");
                   },
                   [](const Annulus& a) {
                       if (!(a.r_inner > 0.0 && a.r_outer > a.r_inner))
                           throw InvalidInput("annulus requires 0 < r_inner < r_outer");
                   },
                   [](const Polygon& p) {
                       if (p.vertices.size() < 3) throw InvalidInput("polygon needs at least three vertices");
                   },
               },
               shape);
}

// Index of the anomaly owning point p; -1 for background. Throws when two
// anomalies with different conductivities both claim p.
int owner(const PhantomSpec& spec, const Point& p) {
    int found = -1;
    for (std::size_t a = 0; a < spec.anomalies.size(); ++a) {
        if (!contains(spec.anomalies[a].shape, p)) continue;
        if (found < 0) {
            found = static_cast<int>(a);
        } else if (spec.anomalies[found].sigma != spec.anomalies[a].sigma) {
            throw InvalidInput("anomalies " + std::to_string(found) + " and " + std::to_string(a) +
                               " overlap with different conductivities");
        }
    }
    return found;
}

void check_inside(const Mesh& mesh, const PhantomSpec& spec) {
    for (std::size_t a = 0; a < spec.anomalies.size(); ++a) {
        if (max_extent(spec.anomalies[a].shape) > mesh.radius) {
            throw InvalidInput("anomaly " + std::to_string(a) + " extends outside the domain");
        }
    }
}

}  // namespace

void PhantomSpec::validate() const {
    if (!(background_sigma > 0.0)) throw InvalidInput("background_sigma must be positive");
    if (anomalies.empty()) return;
    double lo = anomalies.front().sigma;
    double hi = lo;
    for (const auto& a : anomalies) {
        if (!(a.sigma > 0.0)) throw InvalidInput("anomaly sigma must be positive");
        validate_shape(a.shape);
        lo = std::min(lo, a.sigma);
        hi = std::max(hi, a.sigma);
    }
    if (!(hi < background_sigma || lo > background_sigma)) {
        throw InvalidInput("anomaly conductivities must lie entirely below or entirely above background_sigma");
    }
}

bool contains(const Shape& shape, const Point& p) {
    return std::visit(
        overloaded{
            [&](const Disk& d) { return (p - d.center).squaredNorm() < d.radius * d.radius; },
            [&](const Ellipse& e) {
                const Point q = p - e.center;
                const double c = std::cos(e.rotation);
                const double s = std::sin(e.rotation);
                const double u = (c * q.x() + s * q.y()) / e.semi_major;
                const double v = (-s * q.x() + c * q.y()) / e.semi_minor;
                return u * u + v * v < 1.0;
            },
            [&](const Annulus& a) {
                const double r2 = (p - a.center).squaredNorm();
                return r2 > a.r_inner * a.r_inner && r2 < a.r_outer * a.r_outer;
            },
            [&](const Polygon& poly) {
                // Even-odd crossing test.
                bool inside = false;
                const auto& v = poly.vertices;
                for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
                        const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
                        if (p.x() < x) inside = !inside;
                    }
                }
                return inside;
            },
        },
        shape);
}

double max_extent(const Shape& shape) {
    return std::visit(overloaded{
                          [](const Disk& d) { return d.center.norm() + d.radius; },
                          [](const Ellipse& e) {
                              double m = 0.0;
                              const double c = std::cos(e.rotation);
                              const double s = std::sin(e.rotation);
                              for (int k = 0; k < 3600; ++k) {
                                  const double t = 2.0 * std::numbers::pi * k / 3600.0;
                                  const double x = e.semi_major * std::cos(t);
                                  const double y = e.semi_minor * std::sin(t);
                                  m = std::max(m, (e.center + Point(c * x - s * y, s * x + c * y)).norm());
                              }
                              return m;
                          },
                          [](const Annulus& a) { return a.center.norm() + a.r_outer; },
                          [](const Polygon& p) {
                              double m = 0.0;
                              for (const auto& v : p.vertices) m = std::max(m, v.norm());
                              return m;
                          },
                      },
                      shape);
}

ConductivityField build_conductivity(const Mesh& mesh, const PhantomSpec& spec) {
    spec.validate();
    check_inside(mesh, spec);
    ConductivityField field = ConductivityField::uniform(mesh.element_count(), spec.background_sigma);
    for (std::size_t t = 0; t < mesh.element_count(); ++t) {
        const int a = owner(spec, mesh.centroid(t));
        if (a >= 0) field.per_element[static_cast<Eigen::Index>(t)] = spec.anomalies[a].sigma;
    }
    return field;
}

RegionIndicator truth_indicator(const Mesh& mesh, const PhantomSpec& spec) {
    spec.validate();
    check_inside(mesh, spec);
    RegionIndicator region(mesh.element_count());
    for (std::size_t t = 0; t < mesh.element_count(); ++t) region.per_element[t] = owner(spec, mesh.centroid(t)) >= 0;
    return region;
}

std::vector<double> circular_interfaces(const PhantomSpec& spec) {
    std::vector<double> radii;
    for (const auto& a : spec.anomalies) {
        if (const auto* d = std::get_if<Disk>(&a.shape); d && d->center.norm() == 0.0) {
            radii.push_back(d->radius);
        } else if (const auto* an = std::get_if<Annulus>(&a.shape); an && an->center.norm() == 0.0) {
            radii.push_back(an->r_inner);
            radii.push_back(an->r_outer);
        }
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    return radii;
}

}  // namespace kert
