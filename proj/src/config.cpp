#include "kert/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kert/error.hpp"

namespace kert {

using nlohmann::json;

Mode parse_mode(const std::string& name) {
    if (name == "forward") return Mode::forward;
    if (name == "ntd") return Mode::ntd;
    if (name == "spectrum") return Mode::spectrum;
    if (name == "reconstruct") return Mode::reconstruct;
    if (name == "analytic") return Mode::analytic;
    if (name == "noise-sweep") return Mode::noise_sweep;
    throw InvalidInput("mode: unknown value '" + name + "'");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::forward: return "forward";
        case Mode::ntd: return "ntd";
        case Mode::spectrum: return "spectrum";
        case Mode::reconstruct: return "reconstruct";
        case Mode::analytic: return "analytic";
        case Mode::noise_sweep: return "noise-sweep";
    }
    return "?";
}

namespace {

struct Unit {
    const char* name;
    double scale;
};

double parse_quantity(const std::string& text, std::initializer_list<Unit> units, const char* kind) {
    std::istringstream in(text);
    double value = 0.0;
    std::string unit;
    if (!(in >> value)) throw InvalidInput("expected a " + std::string(kind) + " with unit, got '" + text + "'");
    if (!(in >> unit)) throw InvalidInput(std::string(kind) + " '" + text + "' has no unit");
    std::string rest;
    if (in >> rest) throw InvalidInput("trailing text in " + std::string(kind) + " '" + text + "'");
    if (!std::isfinite(value)) throw InvalidInput(std::string(kind) + " '" + text + "' is not finite");
    for (const Unit& u : units) {
        if (unit == u.name) return value * u.scale;
    }
    throw InvalidInput("unknown " + std::string(kind) + " unit '" + unit + "' in '" + text + "'");
}

// Field access with the dotted path carried into every error message.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key); }
    Node at(const char* key) const {
        if (!j_.contains(key)) throw InvalidInput(path_ + "." + key + ": missing");
        return Node(j_.at(key), path_ + "." + key);
    }
    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    void allow_only(std::initializer_list<const char*> keys) const {
        if (!j_.is_object()) throw InvalidInput(path_ + ": expected an object");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items()) {
            if (!allowed.count(k)) throw InvalidInput(path_ + "." + k + ": unknown key");
        }
    }

    double length() const { return with_path(parse_length); }
    double conductivity() const { return with_path(parse_conductivity); }
    double angle() const { return with_path(parse_angle); }

    std::string string() const {
        if (!j_.is_string()) {
            throw InvalidInput(path_ + ": expected a string" +
                               (j_.is_number() ? std::string(" with explicit unit, got a bare number") : ""));
        }
        return j_.get<std::string>();
    }
    double number() const {
        if (!j_.is_number()) throw InvalidInput(path_ + ": expected a number");
        return j_.get<double>();
    }
    int integer() const {
        if (!j_.is_number_integer()) throw InvalidInput(path_ + ": expected an integer");
        return j_.get<int>();
    }
    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
            throw InvalidInput(path_ + ": expected a non-negative integer");
        }
        return j_.get<std::uint64_t>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) throw InvalidInput(path_ + ": expected true or false");
        return j_.get<bool>();
    }
    std::vector<Node> array() const {
        if (!j_.is_array()) throw InvalidInput(path_ + ": expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]");
        return out;
    }
    Point point() const {
        const auto xs = array();
        if (xs.size() != 2) throw InvalidInput(path_ + ": expected [x, y]");
        return {xs[0].length(), xs[1].length()};
    }

private:
    double with_path(double (*parse)(const std::string&)) const {
        const std::string text = string();
        try {
            return parse(text);
        } catch (const InvalidInput& e) {
            throw InvalidInput(path_ + ": " + e.what());
        }
    }

    const json& j_;
    std::string path_;
};

Anomaly parse_anomaly(const Node& n) {
    const std::string shape = n.at("shape").string();
    Anomaly a;
    const Point center = n.has("center") ? n.at("center").point() : Point(0.0, 0.0);
    if (shape == "disk") {
        n.allow_only({"shape", "center", "radius", "sigma"});
        a.shape = Disk{center, n.at("radius").length()};
    } else if (shape == "ellipse") {
        n.allow_only({"shape", "center", "semi_major", "semi_minor", "rotation", "sigma"});
        a.shape = Ellipse{center, n.at("semi_major").length(), n.at("semi_minor").length(),
                          n.has("rotation") ? n.at("rotation").angle() : 0.0};
    } else if (shape == "annulus") {
        n.allow_only({"shape", "center", "r_inner", "r_outer", "sigma"});
        a.shape = Annulus{center, n.at("r_inner").length(), n.at("r_outer").length()};
    } else if (shape == "polygon") {
        n.allow_only({"shape", "vertices", "sigma"});
        Polygon p;
        for (const Node& v : n.at("vertices").array()) p.vertices.push_back(v.point());
        a.shape = std::move(p);
    } else {
        throw InvalidInput(n.path() + ".shape: unknown shape '" + shape + "'");
    }
    a.sigma = n.at("sigma").conductivity();
    return a;
}

EpsilonRule parse_rule(const Node& n) {
    const std::string s = n.string();
    if (s == "eigenvalue") return EpsilonRule::eigenvalue;
    if (s == "midpoint") return EpsilonRule::midpoint;
    if (s == "explicit") return EpsilonRule::explicit_value;
    throw InvalidInput(n.path() + ": unknown rule '" + s + "'");
}

}  // namespace

double parse_length(const std::string& text) {
    return parse_quantity(text, {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}}, "length");
}

double parse_conductivity(const std::string& text) {
    return parse_quantity(text, {{"S/m", 1.0}, {"mS/m", 1e-3}, {"S/cm", 1e2}}, "conductivity");
}

double parse_angle(const std::string& text) {
    return parse_quantity(text, {{"rad", 1.0}, {"deg", std::acos(-1.0) / 180.0}}, "angle");
}

ExperimentConfig parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("config") && doc.contains("artifacts")) doc = doc.at("config");
    if (!doc.is_object()) throw InvalidInput("config: expected a JSON object");

    ExperimentConfig cfg;
    const Node root(doc, "config");
    root.allow_only({"mode", "mesh", "phantom", "noise", "kernel", "drive", "sweep", "measured_ntd", "analytic",
                     "raster", "output_dir"});
    if (root.has("mode")) cfg.mode = parse_mode(root.at("mode").string());
    if (root.has("output_dir")) cfg.output_dir = root.at("output_dir").string();

    {
        const Node m = root.at("mesh");
        m.allow_only({"radius", "boundary_edges", "core_rings", "band_rings", "band_thickness", "conform_to_phantom"});
        cfg.mesh.radius = m.at("radius").length();
        if (m.has("boundary_edges")) cfg.mesh.boundary_edges = m.at("boundary_edges").integer();
        if (m.has("core_rings")) cfg.mesh.core_rings = m.at("core_rings").integer();
        if (m.has("band_rings")) cfg.mesh.band_rings = m.at("band_rings").integer();
        if (m.has("band_thickness")) cfg.mesh.band_thickness = m.at("band_thickness").number();
        if (m.has("conform_to_phantom")) cfg.mesh.conform_to_phantom = m.at("conform_to_phantom").boolean();
    }

    {
        const Node p = root.at("phantom");
        p.allow_only({"background_sigma", "anomalies"});
        cfg.phantom.background_sigma = p.at("background_sigma").conductivity();
        if (p.has("anomalies")) {
            for (const Node& a : p.at("anomalies").array()) cfg.phantom.anomalies.push_back(parse_anomaly(a));
        }
    }

    if (root.has("noise")) {
        const Node n = root.at("noise");
        n.allow_only({"eta", "seed"});
        if (n.has("eta")) cfg.noise.eta = n.at("eta").number();
        if (n.has("seed")) cfg.noise.seed = n.at("seed").unsigned_integer();
    }
    if (seed_override) {
        cfg.noise.seed = *seed_override;
        doc["noise"]["seed"] = *seed_override;
    }

    if (!cfg.phantom.anomalies.empty()) {
        double lo = cfg.phantom.anomalies.front().sigma;
        double hi = lo;
        for (const Anomaly& a : cfg.phantom.anomalies) {
            lo = std::min(lo, a.sigma);
            hi = std::max(hi, a.sigma);
        }
        cfg.kernel.bounds = {lo, hi, cfg.phantom.background_sigma, cfg.phantom.background_sigma};
    }
    if (root.has("kernel")) {
        const Node k = root.at("kernel");
        k.allow_only({"sigma_bounds", "epsilon_rule", "epsilon", "safety", "intersect_degenerate",
                      "degeneracy_tolerance"});
        if (k.has("sigma_bounds")) {
            const Node b = k.at("sigma_bounds");
            b.allow_only({"anomaly_min", "anomaly_max", "background_min", "background_max"});
            cfg.kernel.bounds = {b.at("anomaly_min").conductivity(), b.at("anomaly_max").conductivity(),
                                 b.at("background_min").conductivity(), b.at("background_max").conductivity()};
        }
        if (k.has("epsilon_rule")) cfg.kernel.rule = parse_rule(k.at("epsilon_rule"));
        if (k.has("epsilon")) cfg.kernel.explicit_epsilon = k.at("epsilon").number();
        if (k.has("safety")) cfg.kernel.safety = k.at("safety").number();
        if (k.has("intersect_degenerate")) cfg.kernel.intersect_degenerate = k.at("intersect_degenerate").boolean();
        if (k.has("degeneracy_tolerance")) cfg.kernel.degeneracy_tolerance = k.at("degeneracy_tolerance").number();
    }

    if (root.has("drive")) {
        const Node d = root.at("drive");
        d.allow_only({"fourier_mode", "sine", "current_file"});
        if (d.has("fourier_mode")) cfg.drive.fourier_mode = d.at("fourier_mode").integer();
        if (d.has("sine")) cfg.drive.sine = d.at("sine").boolean();
        if (d.has("current_file")) cfg.drive.current_file = d.at("current_file").string();
    }
    if (root.has("sweep")) {
        const Node s = root.at("sweep");
        s.allow_only({"etas", "seeds"});
        if (s.has("etas")) {
            cfg.sweep.etas.clear();
            for (const Node& e : s.at("etas").array()) cfg.sweep.etas.push_back(e.number());
        }
        if (s.has("seeds")) {
            cfg.sweep.seeds.clear();
            for (const Node& e : s.at("seeds").array()) cfg.sweep.seeds.push_back(e.unsigned_integer());
        }
    }
    if (root.has("measured_ntd")) cfg.measured_ntd_file = root.at("measured_ntd").string();
    if (root.has("analytic")) {
        const Node a = root.at("analytic");
        a.allow_only({"max_n"});
        if (a.has("max_n")) cfg.analytic_max_n = a.at("max_n").integer();
    }
    if (root.has("raster")) {
        const Node r = root.at("raster");
        r.allow_only({"width"});
        if (r.has("width")) cfg.raster_width = r.at("width").integer();
    }

    cfg.validate();
    doc.erase("output_dir");
    cfg.canonical = doc.dump(2);
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open config file " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, seed_override);
}

void ExperimentConfig::validate() const {
    if (!(mesh.radius > 0.0)) throw InvalidInput("mesh.radius must be positive");
    phantom.validate();
    for (std::size_t i = 0; i < phantom.anomalies.size(); ++i) {
        if (max_extent(phantom.anomalies[i].shape) >= mesh.radius) {
            throw InvalidInput("phantom.anomalies[" + std::to_string(i) + "] extends outside mesh.radius");
        }
    }
    if (!(noise.eta >= 0.0) || !std::isfinite(noise.eta)) throw InvalidInput("noise.eta must be non-negative");
    for (const double e : sweep.etas) {
        if (!(e >= 0.0)) throw InvalidInput("sweep.etas must be non-negative");
    }
    if (sweep.seeds.empty()) throw InvalidInput("sweep.seeds must not be empty");
    if (drive.fourier_mode < 1) throw InvalidInput("drive.fourier_mode must be >= 1");
    if (analytic_max_n < 1) throw InvalidInput("analytic.max_n must be >= 1");
    if (raster_width < 2 || raster_width > 8192) throw InvalidInput("raster.width must lie in [2, 8192]");
}

Mesh ExperimentConfig::build_mesh() const {
    MeshOptions options;
    options.band_rings = mesh.band_rings;
    options.band_thickness = mesh.band_thickness;
    if (mesh.conform_to_phantom) options.conforming_radii = circular_interfaces(phantom);
    return generate_disk_mesh(mesh.radius, mesh.boundary_edges, mesh.core_rings, options);
}

}  // namespace kert
