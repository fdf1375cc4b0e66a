// floquet_pt_main.cpp — Command-line driver: one subcommand per figure family

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fpt/experiments.hpp"
#include "fpt/types.hpp"

int main(int argc, char** argv) {
    // Worker-level parallelism lives in the experiment runners; keep the BLAS
    // kernels single-threaded so timings and thread counts stay predictable.
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    CLI::App app{"Floquet PT-breaking toolkit: spectra, phase diagrams, eigenvalue "
                 "trajectories, scale-free localization, boundary perturbations, and "
                 "model audits"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    int workers = 0;

    const std::pair<const char*, const char*> subs[] = {
        {"spectrum", "Quasienergy spectrum and complex fraction over a coupling sweep"},
        {"phase-diagram", "Complex-fraction grid over coupling and system size"},
        {"trajectory", "One eigenvalue pair of U_F followed around the unit circle"},
        {"scale-free", "Broken-pair |Im E| vs size, position profiles, envelopes"},
        {"perturbation", "Boundary perturbation V: heatmap, decay profiles, Gamma_p"},
        {"validate-model", "Audit the PT construction conditions of a model"},
    };
    for (const auto& [name, blurb] : subs) {
        CLI::App* sub = app.add_subcommand(name, blurb);
        sub->add_option("--config", config, "JSON experiment config")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
        sub->add_option("--workers", workers, "Worker threads (overrides the config)")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // malformed command line is a config error
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        std::optional<std::filesystem::path> out;
        if (!out_dir.empty()) out = out_dir;
        std::optional<int> w;
        if (workers > 0) w = workers;
        return fpt::run_experiment(name, config, out, w);
    } catch (const fpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fpt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
