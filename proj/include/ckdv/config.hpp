#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckdv/error.hpp"
#include "ckdv/systems.hpp"

namespace ckdv {

/// Malformed or out-of-range configuration; raised before any computation.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ExperimentKind {
    Simulate,
    Diagnose,
    LipschitzProbe,
    ScalingProbe,
    PicardStudy,
    ConvergenceStudy,
    BourgainSuite,
    KernelSuite,
    Nonequivalence
};

std::string kind_name(ExperimentKind k);
/// Accepts the config names (simulate, lipschitz_probe, ...) and the CLI
/// subcommand names (lipschitz, picard, noneq, ...).
ExperimentKind kind_from_name(const std::string& name);

struct InitialSpec {
    /// gaussian: u = u_amp exp(-((x - u_shift)/u_width)^2), same for v;
    /// soliton: Hirota-Satsuma data (w0(-x), 0) for the KdV soliton of speed c;
    /// zero; snapshot: samples read from path.
    std::string type = "gaussian";
    double u_amp = 0.5, u_width = 2.0, u_shift = 0.0;
    double v_amp = 0.4, v_width = 2.0, v_shift = 1.0;
    double c = 4.0, shift = 0.0;
    std::string path;
};

struct SimulateKnobs {
    double drift_tol = 1e-6;
    bool snapshots = true;
};

struct DiagnoseKnobs {
    std::string snapshot;
};

struct LipschitzKnobs {
    std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    int direction_kmax = 16;
    double stabilization_tol = 0.05;
};

struct ScalingKnobs {
    double lambda = 2.0;
    double T = 0.25;
    double covariance_tol = 1e-6;
    std::vector<double> norm_lambdas{1, 2, 4, 8, 16, 32, 64};
    std::vector<double> fit_lambdas{8, 16, 32, 64};
    std::vector<double> norm_s{-1.5, -1.0, -0.75, 0.0, 1.0};
    double exponent_tol = 0.05;
};

struct PicardKnobs {
    std::vector<double> amplitudes{0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0};
    double T = 0.5;
    int iterations = 30;
    int time_resolution = 201;
    double agreement_tol = 1e-6;
};

struct ConvergenceKnobs {
    double soliton_c = 8.0;
    double soliton_tol = 1e-6;
    int soliton_samples = 10;
    int order_n = 128;
    /// Amplitudes of the Gaussian pair used for the order study.
    std::vector<double> order_amplitudes{0.8, 0.6};
    double order_T = 0.4;
    std::vector<double> order_dts{0.01, 0.005};
    double order_ref_dt = 0.001;
    double order_min = 3.7, order_max = 4.3;
};

struct BourgainKnobs {
    int fields = 1000;
    int field_nx = 32, field_nt = 32;
    double field_period_x = 16.0, field_period_t = 8.0;
    std::vector<std::vector<double>> embedding_sb{{0.0, 0.6}, {-0.5, 0.75}};
    std::vector<double> intersection_first{1.0, -1.0};
    std::vector<double> intersection_second{2.0, -3.0};
    int pointwise_triples = 5;
    int pointwise_points = 1000;
    int fw_points = 1000001;
    int constancy_fields = 50;
    double constancy_s = 0.0, constancy_b = 0.6;
    double duhamel_b = 0.6, duhamel_b_prime = -0.4, duhamel_sigma = 20.0;
    int duhamel_nt = 16384;
    double exponent_tol = 0.1;
    double cv_tol = 1e-2;
    bool bilinear = true;
    std::vector<int> bilinear_bands{8, 16, 32};
    int bilinear_trials = 4;
    double bilinear_tol = 0.2;
    std::vector<double> membership_sb{0.0, 0.6};
};

struct KernelKnobs {
    std::vector<std::string> lemmas{"L3.2a", "L3.2b", "L3.3", "L3.4", "L3.5", "L3.6",
                                    "L3.7",  "L3.8",  "L3.9", "L3.10", "L3.11"};
    double x_max = 16.0;
    double rel_tol = 1e-9;
    double stability_tol = 0.05;
};

struct NoneqKnobs {
    double a0 = 1.0, a1 = -1.0, s = 0.0, b = 3.0;
    std::vector<double> radii{8, 16, 32, 64};
    double stabilize_tol = 1e-3;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    SystemSpec system = HirotaSatsuma{-0.5, 1.0};
    int n = 512;
    double period = 40.0;
    double dt = 1e-4;
    double T = 1.0;
    double sample_interval = 0.1;
    InitialSpec initial;
    double sobolev_s = 1.0;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    SimulateKnobs simulate;
    DiagnoseKnobs diagnose;
    LipschitzKnobs lipschitz;
    ScalingKnobs scaling;
    PicardKnobs picard;
    ConvergenceKnobs convergence;
    BourgainKnobs bourgain;
    KernelKnobs kernels;
    NoneqKnobs noneq;
};

/// Validates and converts a JSON document. `kind` overrides a missing "kind"
/// key; a present key must agree with it. Unknown keys, wrong types and
/// out-of-range values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind = std::nullopt);

/// Fully resolved configuration, including defaults.
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace ckdv
