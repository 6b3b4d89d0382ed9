#include "critsense/xcli.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace critsense {

int cli_main(int argc, char** argv) {
    CLI::App app{"Critical-probe quantum sensing experiments"};
    std::string scenario, config_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("scenario", scenario, "qfi_scaling | theta_curves | channel_sweep | deformed | subsystem | hadamard")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--seed", seed, "Overrides the configured seed");
    app.add_option("--threads", threads, "OpenMP threads (CRITSENSE_THREADS takes precedence)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (const char* env = std::getenv("CRITSENSE_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "xcli::config: CRITSENSE_THREADS: not an integer\n";
            return 2;
        }
    }
    if (threads < 0) {
        std::cerr << "xcli::config: --threads: must be >= 0\n";
        return 2;
    }
    if (threads > 0) omp_set_num_threads(threads);

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
        const Scenario s = scenario_from_string(scenario);
        if (cfg.scenario_given && cfg.scenario != s)
            throw ConfigError("scenario", "config says '" + to_string(cfg.scenario) + "'");
        cfg.scenario = s;
        if (seed) cfg.seed = *seed;
        cfg.output = out_dir;
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        const std::vector<ExperimentRecord> records = run(cfg);
        const std::filesystem::path dir(out_dir);
        emit_csv(records, (dir / (scenario + ".csv")).string());
        emit_plotdata(records, (dir / ("plot_" + scenario + ".csv")).string());
        std::cout << "wrote " << records.size() << " records to " << (dir / (scenario + ".csv")).string() << '\n';
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error in " << e.module() << "::" << e.op() << ": " << e.what() << '\n';
        return 3;
    }
    return 0;
}

} // namespace critsense
