#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>

#include "ckdv/harness.hpp"

using namespace ckdv;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(ExperimentKind kind, const std::string& name) {
    ExperimentConfig c = parse_config(nlohmann::json::object(), kind);
    c.n = 64;
    c.period = 20.0;
    c.dt = 1e-3;
    c.output_dir = (fs::temp_directory_path() / ("ckdv_harness_" + std::to_string(::getpid()) + "_" + name)).string();
    return c;
}

}  // namespace

TEST_CASE("initial data") {
    ExperimentConfig c = small(ExperimentKind::Simulate, "init");
    const GridSpec g = make_grid(c.n, c.period);
    const State s = initial_state(c, g);
    const RVec u = inverse(s.u), v = inverse(s.v);
    for (int j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        CHECK(u[j] == doctest::Approx(0.5 * std::exp(-x * x / 4.0)).epsilon(1e-12));
        CHECK(v[j] == doctest::Approx(0.4 * std::exp(-(x - 1.0) * (x - 1.0) / 4.0)).epsilon(1e-12));
    }
    c.initial.type = "zero";
    CHECK(inverse(initial_state(c, g).u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-length simulate writes a complete run") {
    ExperimentConfig c = small(ExperimentKind::Simulate, "sim");
    c.T = 0.0;
    const RunManifest m = run(c);
    CHECK(m.error.empty());
    CHECK(m.pass);
    CHECK(m.files.size() == 2);
    const fs::path dir(c.output_dir);
    for (const auto& f : m.files) CHECK(fs::exists(dir / f));
    CHECK(fs::exists(dir / "snapshot_final.bin"));
    CHECK_FALSE(fs::exists(dir / "snapshot_initial.bin"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));
    CHECK(m.to_json().at("config") == to_json(c));
    fs::remove_all(dir);
}

TEST_CASE("configuration errors are recorded in the manifest") {
    ExperimentConfig c = small(ExperimentKind::ScalingProbe, "err");
    c.system = GearGrimshaw{0.5, 0.3, 0.0, 1.0, 0.8, 0.0};
    const RunManifest m = run(c);
    CHECK_FALSE(m.pass);
    CHECK(m.error_kind == "config");
    CHECK_FALSE(m.error.empty());
    CHECK(fs::exists(fs::path(c.output_dir) / "manifest.json"));
    fs::remove_all(c.output_dir);
}

TEST_CASE("kernel suite covers every kernel") {
    const ExperimentResult r = kernel_suite(small(ExperimentKind::KernelSuite, "k"));
    REQUIRE(r.tables.size() == 1);
    CHECK(r.tables[0].first == "kernels.csv");
    CHECK(r.tables[0].second.rows.size() == 11);
    CHECK(r.tables[0].second.labels.size() == 11);
    CHECK(r.pass);
}
