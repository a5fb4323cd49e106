#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "kerrdiv/config.hpp"
#include "kerrdiv/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interface-mode, wavepacket-ansatz and Kerr transmission experiments"};
    std::string config_path;
    std::string out_dir;
    bool verbose = false;
    app.add_option("config", config_path, "experiment config file")->required();
    app.add_option("--out", out_dir, "output directory override");
    app.add_flag("--verbose", verbose, "verbose progress output");
    CLI11_PARSE(app, argc, argv);

    if (const char* threads = std::getenv("KERRDIV_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(threads)));
    else
        Eigen::setNbThreads(1);

    try {
        kerrdiv::RunConfig cfg = kerrdiv::RunConfig::from_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (verbose) cfg.verbose = true;
        cfg.validate();
        return kerrdiv::run_experiment(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kerrdiv::kExitConfigError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kerrdiv::kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
