// experiments.hpp — Declarative experiment configs and the figure-data runners

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/lattice.hpp"
#include "fpt/protocol.hpp"
#include "fpt/types.hpp"

namespace fpt {

struct SweepAxis {
    std::string parameter;  // "lambda" (minimal), "t" (type1), "t1" (type2)
    double start{0.0};
    double stop{1.0};
    int steps{2};           // number of grid points, endpoints included
};

// One experiment, parsed from a JSON config document. Field applicability
// depends on the subcommand; parse_config validates exhaustively and reports
// every problem it finds in a single ConfigError.
struct ExperimentConfig {
    std::string subcommand;

    std::string model{"minimal"};        // minimal | type1 | type2 | ansatz
    int sites{60};
    double eta{0.0};
    double period{1.0};
    double t{2.0};                       // type1 coupling
    double t1{1.0};                      // type2 couplings
    double t2{0.5};
    std::optional<MultiBandSpec> ansatz; // declarative model (model = "ansatz")

    std::optional<SweepAxis> sweep;      // spectrum, phase-diagram, trajectory
    std::vector<int> size_list;          // phase-diagram, scale-free, perturbation
    double coupling{3.0};                // fixed sweep-parameter value (scale-free, perturbation)
    int cutoff{0};                       // perturbation boundary cutoff s; 0 means ceil(N/4)
    bool heatmap{true};                  // emit the |V_ij| table
    std::string parity{"reflection"};    // validate-model: reflection | identity
    std::optional<std::pair<int, int>> pair;  // trajectory: tracked pair at the first grid point
    std::vector<int> profile_sizes;      // scale-free: sizes that also get <x>/N profiles

    std::filesystem::path out_dir{"."};
    int workers{1};
};

// Parse and validate a config document for one subcommand.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& subcommand);

// Model factory: protocol of the configured model at a sweep-parameter value
// (lambda for the minimal model, t or t1 for the two-band models).
DrivingProtocol protocol_for(const ExperimentConfig& cfg, double parameter, int sites,
                             double eta);

// Ansatz record of the configured model at a sweep-parameter value.
MultiBandSpec ansatz_for(const ExperimentConfig& cfg, double parameter);

// Runners, one per subcommand; each returns the list of files written.
std::vector<std::filesystem::path> run_spectrum_sweep(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_phase_diagram(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_trajectory(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_scale_free(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_perturbation(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_validate(const ExperimentConfig& cfg);

// Load the config file, apply overrides, dispatch to the runner, and print
// the written files. Returns the process exit code (0 on success).
int run_experiment(const std::string& subcommand, const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override,
                   const std::optional<int>& workers_override);

} // namespace fpt
