#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmpe/bath.hpp"
#include "qmpe/liouvillian.hpp"
#include "qmpe/mpemba.hpp"
#include "qmpe/spectral.hpp"

namespace qmpe {

/// Uniform sample grid 0 .. t_max with n_points samples (endpoints included).
struct TimeGrid {
    double t_max = 5.0;
    int n_points = 200;

    std::vector<double> times() const;
};

/// One-parameter scan line for `lep` and `spectrum` slices.
struct ScanSection {
    ScanVariable variable = ScanVariable::Gamma;
    double lo = 0.0;
    double hi = 0.0;
    int points = 101;           ///< sample count for spectrum slices
    std::size_t mode_index = 0; ///< which auxiliary mode is swept (0-based)
};

/// Rectangular (gamma, alpha) grid for `sweep`.
struct SweepSection {
    double gamma_min = 0.0, gamma_max = 0.0;
    int gamma_points = 0;
    double alpha_min = 0.0, alpha_max = 0.0;
    int alpha_points = 0;

    std::vector<double> gammas() const;
    std::vector<double> alphas() const;
};

/// Overrides for the second trajectory's generator in `mpemba`
/// (unset fields fall back to the [model] mode).
struct SecondGenerator {
    std::optional<double> alpha;
    std::optional<double> omega;
    std::optional<double> gamma;
};

struct RunSection {
    DistanceKind distance = DistanceKind::CoherentOverlap;
    bool markovian = false;
    int threads = 1;
    int excitation_cap = 2;           ///< combination listing cap for `spectrum`
    bool include_lamb_shift = false;
    std::string out_dir = "qmpe_out";
};

/// Parsed run configuration (flat INI: [section] blocks of key = value).
struct RunConfig {
    std::optional<PseudomodeSpec> model;   ///< always set after a successful parse
    std::optional<LorentzianBath> bath;    ///< set when the model came from [bath]
    std::optional<TruncationSpec> truncation;
    TimeGrid time;
    std::vector<double> xi;                ///< coherent amplitudes from [initial]
    std::vector<std::string> state_files;  ///< density-matrix CSV inputs
    std::optional<ScanSection> scan;
    std::optional<SweepSection> sweep;
    SecondGenerator second;
    RunSection run;
};

/// Parse configuration text.  Unknown sections or keys, duplicate keys,
/// malformed numbers and inconsistent blocks throw std::invalid_argument
/// with the offending line number.
RunConfig parse_config(const std::string& text);

/// Read and parse a configuration file.
RunConfig load_config(const std::filesystem::path& file);

/// Canonical text form: fixed section and key order, shortest round-trip
/// number formatting.  parse(serialize(cfg)) reproduces cfg, and
/// serialize(parse(s)) is idempotent on its own output.
std::string serialize_config(const RunConfig& cfg);

/// Read a complex density matrix from CSV (2*n columns: re/im pairs).
Eigen::MatrixXcd load_state_csv(const std::filesystem::path& file);

}  // namespace qmpe
