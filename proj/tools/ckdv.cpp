#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ckdv/config.hpp"
#include "ckdv/harness.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled KdV experiments: simulation, diagnostics and norm estimates", "ckdv"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ckdv::version_string());

    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "evolve initial data and record invariants"},
        {"diagnose", "diagnostics of a stored snapshot"},
        {"picard", "Picard iteration against the stepper"},
        {"lipschitz", "perturbation growth of the data-to-solution map"},
        {"scaling", "scaling covariance and Sobolev scaling exponents"},
        {"bourgain", "space-time norm estimates"},
        {"kernels", "refinement stability of the kernel bounds"},
        {"noneq", "non-equivalence of the dispersion-dependent norms"},
        {"convergence", "soliton reduction and time-step order"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON configuration file")->required();
        sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
        sub->add_option("--seed", flags.seed, "random seed (overrides seed)");
        sub->add_flag("--quiet", flags.quiet, "print only the pass/fail line");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    ckdv::ExperimentConfig cfg;
    try {
        cfg = ckdv::load_config(flags.config, ckdv::kind_from_name(command));
        if (!flags.out.empty()) cfg.output_dir = flags.out;
        if (flags.seed) cfg.seed = *flags.seed;
    } catch (const ckdv::ConfigError& e) {
        std::cerr << "ckdv: " << e.what() << '\n';
        return kUsage;
    }

    ckdv::RunManifest m;
    try {
        m = ckdv::run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "ckdv: " << e.what() << '\n';
        return kFail;
    }

    if (!m.error.empty()) {
        std::cerr << "ckdv: " << command << ": " << m.error << '\n';
        return m.error_kind == "config" ? kUsage : kFail;
    }
    std::cout << command << ": " << (m.pass ? "PASS" : "FAIL") << " (" << m.wall_time << " s, "
              << m.files.size() << " files in " << cfg.output_dir << ")\n";
    if (!flags.quiet) std::cout << m.summary.dump(2) << '\n';
    return m.pass ? kPass : kFail;
}
