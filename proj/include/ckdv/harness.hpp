#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckdv/config.hpp"
#include "ckdv/io.hpp"

namespace ckdv {

/// Outcome of one experiment before anything touches the disk. Tables and
/// snapshots are keyed by file name; summary holds the headline numbers.
struct ExperimentResult {
    bool pass = false;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::pair<std::string, CsvTable>> tables;
    std::vector<std::pair<std::string, Snapshot>> snapshots;
};

/// Initial data of the configuration on the given grid. Snapshot data keeps
/// the grid stored in the file.
State initial_state(const ExperimentConfig& cfg, const GridSpec& grid);

/// Evolves the initial data; diagnostics.csv plus snapshots of the first and
/// last states (one snapshot when T = 0). Pass iff every applicable invariant
/// drifts by less than simulate.drift_tol.
ExperimentResult simulate_experiment(const ExperimentConfig& cfg);

/// One diagnostics row for the snapshot named in diagnose.snapshot.
ExperimentResult diagnose_experiment(const ExperimentConfig& cfg);

/// sup_t ||D(u, v)(t)||_s / ||D(u0, v0)||_s for perturbations of relative
/// size delta along a random band-limited direction. Pass iff the ratios at
/// the two smallest deltas agree within stabilization_tol.
ExperimentResult lipschitz_probe(const ExperimentConfig& cfg);

/// Dual-simulation check of u -> lambda^2 u(lambda x, lambda^3 t) on the
/// Hirota-Satsuma system, plus the table of ||lambda^2 u0(lambda .)||_s with
/// fitted lambda-exponents (expected s + 3/2).
ExperimentResult scaling_probe(const ExperimentConfig& cfg);

/// Picard iteration over a ladder of multiples of the initial data, compared
/// with the stepper where the iteration contracts.
ExperimentResult picard_study(const ExperimentConfig& cfg);

/// One-soliton reduction over one box period and the dt-halving order.
ExperimentResult convergence_study(const ExperimentConfig& cfg);

/// Free-evolution ratio constancy and the Duhamel T-exponent.
ExperimentResult bourgain_linear(const ExperimentConfig& cfg);
/// Embedding inequality and intersection-norm ratios on random fields.
ExperimentResult bourgain_embedding(const ExperimentConfig& cfg);
/// Lattice scans of the pointwise weight inequality and the f_w scan.
ExperimentResult bourgain_pointwise(const ExperimentConfig& cfg);
/// Band ladders of the bilinear ratio for five sign patterns at two
/// parameter sets.
ExperimentResult bourgain_bilinear(const ExperimentConfig& cfg);
/// Refinement ladders of cutoff data: Gaussian (stable) and a rough profile
/// (negative control).
ExperimentResult bourgain_membership(const ExperimentConfig& cfg);
/// All of the above (bilinear only when bourgain.bilinear is set).
ExperimentResult bourgain_suite(const ExperimentConfig& cfg);

/// Refinement stability of the kernel bounds at their reference parameters.
ExperimentResult kernel_suite(const ExperimentConfig& cfg);

/// Truncated norms of the field separating X^{a0} from X^{a1}.
ExperimentResult nonequivalence_experiment(const ExperimentConfig& cfg);

/// Dispatches on cfg.kind without writing anything.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct RunManifest {
    nlohmann::json config;
    std::string version;
    double wall_time = 0.0;
    std::vector<std::string> files;
    bool pass = false;
    nlohmann::json summary;
    /// Empty on success; otherwise the error message and its class
    /// ("config" for ConfigError, "runtime" for anything else).
    std::string error;
    std::string error_kind;

    nlohmann::json to_json() const;
};

std::string version_string();

/// Runs the experiment, writes its outputs into cfg.output_dir and then
/// manifest.json (through a rename, so its presence marks completion).
/// Errors are caught and recorded in the manifest.
RunManifest run(const ExperimentConfig& cfg);

}  // namespace ckdv
