#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmpe/commands.hpp"
#include "qmpe/config.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    bool markovian = false;
    std::string distance;
    int threads = 0;
};

qmpe::RunConfig assemble(const GlobalFlags& flags) {
    if (flags.config_path.empty())
        throw std::invalid_argument("--config <path> is required");
    qmpe::RunConfig cfg = qmpe::load_config(flags.config_path);
    if (!flags.out_dir.empty()) cfg.run.out_dir = flags.out_dir;
    if (flags.markovian) cfg.run.markovian = true;
    if (!flags.distance.empty()) {
        if (flags.distance == "overlap")
            cfg.run.distance = qmpe::DistanceKind::CoherentOverlap;
        else if (flags.distance == "hs")
            cfg.run.distance = qmpe::DistanceKind::HilbertSchmidtHalf;
        else if (flags.distance == "trace")
            cfg.run.distance = qmpe::DistanceKind::TraceNorm;
        else
            throw std::invalid_argument(
                "--distance must be overlap, hs or trace");
    }
    if (flags.threads > 0) cfg.run.threads = flags.threads;
    return cfg;
}

void report(const qmpe::CommandResult& result) {
    std::cout << result.summary;
    std::cout << "wrote " << result.out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Pseudomode relaxation toolkit: spectra, exceptional points, "
        "anomalous-relaxation crossings"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config", flags.config_path,
                   "configuration file (sectioned key = value)");
    app.add_option("--out", flags.out_dir, "output directory override");
    app.add_flag("--markovian", flags.markovian,
                 "include the weak-coupling reference");
    app.add_option("--distance", flags.distance,
                   "distance kind: overlap, hs or trace");
    app.add_option("--threads", flags.threads, "worker thread count override")
        ->check(CLI::PositiveNumber);

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "polynomial roots and generator eigenvalue combinations");
    CLI::App* lep = app.add_subcommand(
        "lep", "locate an exceptional point along the [scan] interval");
    CLI::App* evolve = app.add_subcommand(
        "evolve", "relax an initial state and tabulate response and distance");
    CLI::App* mpemba = app.add_subcommand(
        "mpemba", "two-trajectory distance comparison with crossing detection");
    CLI::App* sweep =
        app.add_subcommand("sweep", "spectral-gap map over a parameter grid");

    CLI11_PARSE(app, argc, argv);

    try {
        const qmpe::RunConfig cfg = assemble(flags);
        if (spectrum->parsed())
            report(qmpe::run_spectrum(cfg));
        else if (lep->parsed())
            report(qmpe::run_lep(cfg));
        else if (evolve->parsed())
            report(qmpe::run_evolve(cfg));
        else if (mpemba->parsed())
            report(qmpe::run_mpemba(cfg));
        else if (sweep->parsed())
            report(qmpe::run_sweep(cfg));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
