#include "kert/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "kert/error.hpp"

namespace kert::io {

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

void write_solution_csv(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) != mesh.node_count()) throw InvalidInput("solution size does not match mesh");
    out << "node,x,y,u\n";
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        out << i << ',' << fmt(mesh.nodes[i].x()) << ',' << fmt(mesh.nodes[i].y()) << ','
            << fmt(u[static_cast<Eigen::Index>(i)]) << '\n';
    }
}

void write_power_csv(std::ostream& out, const Mesh& mesh, const PowerDensityField& p, const RegionIndicator* region,
                     const RegionIndicator* truth) {
    if (static_cast<std::size_t>(p.per_element.size()) != mesh.element_count()) {
        throw InvalidInput("power density size does not match mesh");
    }
    out << "element,cx,cy,area,p";
    if (region) out << ",in_region";
    if (truth) out << ",truth";
    out << '\n';
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const Point c = mesh.centroid(e);
        out << e << ',' << fmt(c.x()) << ',' << fmt(c.y()) << ',' << fmt(mesh.area(e)) << ','
            << fmt(p.per_element[static_cast<Eigen::Index>(e)]);
        if (region) out << ',' << ((*region)[e] ? 1 : 0);
        if (truth) out << ',' << ((*truth)[e] ? 1 : 0);
        out << '\n';
    }
}

void write_current_csv(std::ostream& out, const BoundaryCurrent& g) {
    out << "edge,g\n";
    for (Eigen::Index e = 0; e < g.per_edge.size(); ++e) out << e << ',' << fmt(g.per_edge[e]) << '\n';
}

namespace {

double parse_double(std::string_view s, const char* what) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidInput(std::string("malformed number in ") + what + ": '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

BoundaryCurrent read_current_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("edge,g", 0) != 0) throw InvalidInput("current file must start with 'edge,g'");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cols = split(line, ',');
        if (cols.size() != 2) throw InvalidInput("current file rows must have two columns");
        if (static_cast<std::size_t>(parse_double(cols[0], "current file")) != values.size()) {
            throw InvalidInput("current file edges must be listed in order from 0");
        }
        values.push_back(parse_double(cols[1], "current file"));
    }
    BoundaryCurrent g{Eigen::VectorXd(static_cast<Eigen::Index>(values.size()))};
    std::copy(values.begin(), values.end(), g.per_edge.data());
    return g;
}

void write_ntd_csv(std::ostream& out, const NtDMatrix& m) {
    out << "# kert-ntd 1\n";
    out << "# radius," << fmt(m.radius) << '\n';
    out << "# n_boundary," << m.basis.edge_count() << '\n';
    out << "# basis," << m.basis.tag << '\n';
    for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.matrix.cols(); ++j) {
            if (j) out << ',';
            out << fmt(m.matrix(i, j));
        }
        out << '\n';
    }
}

NtDMatrix read_ntd_csv(std::istream& in, const Mesh& mesh) {
    NtDMatrix m;
    m.basis = ZeroMeanBasis::for_mesh(mesh);
    m.radius = mesh.radius;
    std::string line;
    std::string tag;
    std::size_t n_boundary = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# n_boundary,", 0) == 0) n_boundary = static_cast<std::size_t>(std::stoul(line.substr(13)));
            if (line.rfind("# basis,", 0) == 0) tag = line.substr(8);
            continue;
        }
        std::vector<double> row;
        for (const auto c : split(line, ',')) row.push_back(parse_double(c, "NtD file"));
        rows.push_back(std::move(row));
    }
    if (n_boundary != mesh.boundary_count()) {
        throw InvalidInput("NtD file has " + std::to_string(n_boundary) + " boundary edges, mesh has " +
                           std::to_string(mesh.boundary_count()));
    }
    if (tag != m.basis.tag) throw InvalidInput("NtD file basis '" + tag + "' does not match mesh basis '" + m.basis.tag + "'");
    const Eigen::Index n = m.basis.dimension();
    if (static_cast<Eigen::Index>(rows.size()) != n) throw InvalidInput("NtD file has the wrong number of rows");
    m.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidInput("NtD file row has the wrong number of columns");
        for (Eigen::Index j = 0; j < n; ++j) m.matrix(i, j) = row[static_cast<std::size_t>(j)];
    }
    const double norm = m.matrix.norm();
    m.symmetry_defect = norm > 0.0 ? (m.matrix - m.matrix.transpose()).norm() / norm : 0.0;
    m.matrix = 0.5 * (m.matrix + m.matrix.transpose()).eval();
    return m;
}

Raster rasterize(const Mesh& mesh, const RegionIndicator& region, int width) {
    if (width < 2) throw InvalidInput("raster resolution must be at least 2");
    if (region.size() != mesh.element_count()) throw InvalidInput("region size does not match mesh");
    Raster r{width, width, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * width, 0)};
    const double R = mesh.radius;
    const double h = 2.0 * R / width;
    auto pixel_center = [&](int i, int j) { return Point(-R + (j + 0.5) * h, R - (i + 0.5) * h); };
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& t = mesh.triangles[e];
        const Point& a = mesh.nodes[static_cast<std::size_t>(t[0])];
        const Point& b = mesh.nodes[static_cast<std::size_t>(t[1])];
        const Point& c = mesh.nodes[static_cast<std::size_t>(t[2])];
        const double xmin = std::min({a.x(), b.x(), c.x()});
        const double xmax = std::max({a.x(), b.x(), c.x()});
        const double ymin = std::min({a.y(), b.y(), c.y()});
        const double ymax = std::max({a.y(), b.y(), c.y()});
        const int j0 = std::max(0, static_cast<int>(std::floor((xmin + R) / h - 0.5)));
        const int j1 = std::min(width - 1, static_cast<int>(std::ceil((xmax + R) / h - 0.5)));
        const int i0 = std::max(0, static_cast<int>(std::floor((R - ymax) / h - 0.5)));
        const int i1 = std::min(width - 1, static_cast<int>(std::ceil((R - ymin) / h - 0.5)));
        const std::uint8_t value = region[e] ? 255 : 96;
        for (int i = i0; i <= i1; ++i) {
            for (int j = j0; j <= j1; ++j) {
                const Point p = pixel_center(i, j);
                auto cross = [](const Point& u, const Point& v, const Point& w) {
                    return (v.x() - u.x()) * (w.y() - u.y()) - (v.y() - u.y()) * (w.x() - u.x());
                };
                // Pixels on a shared edge take the later element.
                if (cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0) {
                    r.pixels[static_cast<std::size_t>(i) * width + j] = value;
                }
            }
        }
    }
    return r;
}

void write_pgm(std::ostream& out, const Raster& raster) {
    out << "P2\n" << raster.width << ' ' << raster.height << "\n255\n";
    for (int i = 0; i < raster.height; ++i) {
        for (int j = 0; j < raster.width; ++j) {
            if (j) out << ' ';
            out << static_cast<int>(raster.pixels[static_cast<std::size_t>(i) * raster.width + j]);
        }
        out << '\n';
    }
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalFailure("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

std::string write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << contents;
    out.close();
    if (!out) throw InvalidInput("write failed for " + path.string());
    return sha256_hex(contents);
}

}  // namespace kert::io
