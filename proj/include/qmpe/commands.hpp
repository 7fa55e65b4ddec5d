#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qmpe/config.hpp"

namespace qmpe {

/// Result of one CLI command: the output directory, the files written
/// (relative to it, in write order) and the human-readable summary that
/// was stored as summary.txt.
struct CommandResult {
    std::filesystem::path out_dir;
    std::vector<std::string> files;
    std::string summary;
};

/// `spectrum`: polynomial roots + low-excitation eigenvalue combinations,
/// or a per-root scan when [scan] is present.
CommandResult run_spectrum(const RunConfig& cfg);

/// `lep`: locate the exceptional point along the [scan] interval.
CommandResult run_lep(const RunConfig& cfg);

/// `evolve`: relax the initial state and tabulate P(t) and the distance
/// to equilibrium (closed-form path without [truncation], integrator
/// path with it, Markovian reference with --markovian).
CommandResult run_evolve(const RunConfig& cfg);

/// `mpemba`: two trajectories, distance curves, crossing detection.
CommandResult run_mpemba(const RunConfig& cfg);

/// `sweep`: spectral-gap map over the [sweep] grid.
CommandResult run_sweep(const RunConfig& cfg);

}  // namespace qmpe
