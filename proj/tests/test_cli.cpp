#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "kert/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / ("kert_cli_test_" + std::to_string(::getpid()));

struct WorkDir {
    WorkDir() { fs::create_directories(kWork); }
    ~WorkDir() { fs::remove_all(kWork); }
} const work_dir;

int run(const std::string& args) {
    const std::string cmd = std::string(KERT_CLI_PATH) + " " + args + " --quiet > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path write_config(const std::string& name, const nlohmann::json& doc) {
    const fs::path p = kWork / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

nlohmann::json small_config(const std::string& mode) {
    return {
        {"mode", mode},
        {"mesh", {{"radius", "2.5 cm"}, {"boundary_edges", 64}, {"core_rings", 12}, {"band_rings", 0}}},
        {"phantom",
         {{"background_sigma", "200 S/m"},
          {"anomalies", {{{"shape", "disk"}, {"center", {"0 cm", "0 cm"}}, {"radius", "1 cm"}, {"sigma", "1 S/m"}}}}}},
        {"noise", {{"eta", 0.0}, {"seed", 0}}},
    };
}

const std::string kConfigs = KERT_CONFIG_DIR;

}  // namespace

TEST_CASE("reconstruct writes a manifest with hashed artifacts") {
    const fs::path out = kWork / "disk";
    REQUIRE(run("reconstruct --config " + kConfigs + "/centered_disk.json --out " + out.string()) == 0);
    const auto manifest = read_json(out / "manifest.json");
    CHECK(manifest["mode"] == "reconstruct");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["config"].contains("phantom"));
    CHECK_FALSE(manifest["config"].contains("output_dir"));
    REQUIRE(manifest["artifacts"].size() >= 5);
    for (const auto& [name, sha] : manifest["artifacts"].items()) {
        CAPTURE(name);
        CHECK(kert::io::sha256_file(out / name) == sha.get<std::string>());
    }
    const auto summary = read_json(out / "summary.json");
    CHECK(summary["jaccard"].get<double>() >= 0.75);
    CHECK(summary["region_components"] == 1);
}

TEST_CASE("reruns from a manifest are byte-identical") {
    const fs::path a = kWork / "rerun_a";
    const fs::path b = kWork / "rerun_b";
    REQUIRE(run("reconstruct --config " + kConfigs + "/centered_disk.json --seed 4 --out " + a.string()) == 0);
    REQUIRE(run("reconstruct --config " + (a / "manifest.json").string() + " --out " + b.string()) == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
        CAPTURE(entry.path().filename().string());
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(read_json(a / "manifest.json")["seed"] == 4);
}

TEST_CASE("homogeneous forward run has uniform density for the first mode") {
    nlohmann::json cfg = small_config("forward");
    cfg["phantom"]["anomalies"] = nlohmann::json::array();
    cfg["mesh"] = {{"radius", "2.5 cm"}};
    const fs::path out = kWork / "forward";
    REQUIRE(run("forward --config " + write_config("forward.json", cfg).string() + " --out " + out.string()) == 0);
    const auto summary = read_json(out / "summary.json");
    CHECK(summary["max_relative_density_deviation"].get<double>() < 0.05);
    CHECK(summary["energy_identity_relative_error"].get<double>() < 1e-8);
    CHECK(fs::exists(out / "solution.csv"));
    CHECK(fs::exists(out / "power.csv"));
}

TEST_CASE("other modes run on a small mesh") {
    for (const std::string mode : {"ntd", "spectrum", "analytic", "noise-sweep"}) {
        CAPTURE(mode);
        nlohmann::json cfg = small_config(mode);
        if (mode == "noise-sweep") cfg["sweep"] = {{"etas", {1e-3, 1e-2}}, {"seeds", {1, 2}}};
        const fs::path out = kWork / ("mode_" + mode);
        CHECK(run(mode + " --config " + write_config(mode + ".json", cfg).string() + " --out " + out.string()) == 0);
        CHECK(fs::exists(out / "manifest.json"));
        CHECK(fs::exists(out / "summary.json"));
    }
}

TEST_CASE("configuration errors exit with code 2") {
    nlohmann::json bad_sigma = small_config("reconstruct");
    bad_sigma["phantom"]["background_sigma"] = "-5 S/m";
    CHECK(run("reconstruct --config " + write_config("bad_sigma.json", bad_sigma).string() + " --out " +
              (kWork / "x").string()) == 2);

    nlohmann::json bare = small_config("reconstruct");
    bare["mesh"]["radius"] = 0.025;
    CHECK(run("reconstruct --config " + write_config("bare.json", bare).string() + " --out " + (kWork / "x").string()) ==
          2);

    nlohmann::json inverted = small_config("reconstruct");
    inverted["phantom"]["anomalies"][0]["sigma"] = "500 S/m";
    CHECK(run("reconstruct --config " + write_config("inverted.json", inverted).string() + " --out " +
              (kWork / "x").string()) == 2);

    CHECK(run("forward --config " + kConfigs + "/centered_disk.json --out " + (kWork / "x").string()) == 2);
    CHECK(run("reconstruct --config " + (kWork / "missing.json").string()) == 2);
    CHECK(run("invert --config " + kConfigs + "/centered_disk.json") == 2);
}

TEST_CASE("no anomaly exits with code 4") {
    nlohmann::json cfg = small_config("reconstruct");
    cfg["phantom"]["anomalies"] = nlohmann::json::array();
    cfg["kernel"] = {{"sigma_bounds",
                      {{"anomaly_min", "1 S/m"},
                       {"anomaly_max", "1 S/m"},
                       {"background_min", "200 S/m"},
                       {"background_max", "200 S/m"}}}};
    CHECK(run("reconstruct --config " + write_config("empty.json", cfg).string() + " --out " +
              (kWork / "empty").string()) == 4);
}
