#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kert/fem.hpp"
#include "kert/mesh.hpp"
#include "kert/ntd.hpp"

namespace kert::io {

/// node,x,y,u
void write_solution_csv(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& u);

/// element,cx,cy,area,p[,in_region][,truth]
void write_power_csv(std::ostream& out, const Mesh& mesh, const PowerDensityField& p,
                     const RegionIndicator* region = nullptr, const RegionIndicator* truth = nullptr);

/// edge,g
void write_current_csv(std::ostream& out, const BoundaryCurrent& g);
BoundaryCurrent read_current_csv(std::istream& in);

/// Dense interchange format: '#'-prefixed header lines carrying the disk
/// radius, the edge count and the basis tag, then one comma-separated row
/// per basis index at 17 significant digits.
void write_ntd_csv(std::ostream& out, const NtDMatrix& m);
/// Reads a matrix written for `mesh`; the header must match the mesh basis.
NtDMatrix read_ntd_csv(std::istream& in, const Mesh& mesh);

/// 8-bit grayscale image, row 0 at the top (largest y).
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Samples the disk on a width x width grid: 0 outside the disk, 96 for
/// elements outside the region, 255 inside it.
Raster rasterize(const Mesh& mesh, const RegionIndicator& region, int width);

/// Plain (ASCII) PGM.
void write_pgm(std::ostream& out, const Raster& raster);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `contents` to `path` and returns its SHA-256.
std::string write_text_file(const std::filesystem::path& path, const std::string& contents);

/// Formats a double with 17 significant digits.
std::string fmt(double x);

}  // namespace kert::io
