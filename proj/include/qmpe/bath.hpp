#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qmpe {

/// One auxiliary damped mode of an exponential memory-kernel decomposition
///   C(t) = sum_i alpha_i^2 exp(-i omega_i t - gamma_i t / 2).
struct PseudomodeMode {
    double alpha = 0.0;  ///< coupling strength to the system mode, >= 0
    double omega = 0.0;  ///< mode frequency
    double gamma = 0.0;  ///< mode damping rate, > 0
};

/// System frequency plus the list of auxiliary damped modes.
/// Validates on construction: omega0 > 0, at least one mode,
/// every gamma > 0, every alpha >= 0.
class PseudomodeSpec {
public:
    PseudomodeSpec(double omega0, std::vector<PseudomodeMode> modes);

    double omega0() const { return omega0_; }
    const std::vector<PseudomodeMode>& modes() const { return modes_; }
    std::size_t mode_count() const { return modes_.size(); }

    /// True when every mode frequency equals the system frequency.
    bool resonant() const;

private:
    double omega0_;
    std::vector<PseudomodeMode> modes_;
};

/// Lorentzian spectral density of half-width `width` centred at `omega0`
/// with overall strength `coupling`; its memory kernel is the single
/// exponential C(t) = (coupling * width / 2) exp(-(width + i omega0) t).
/// Validates on construction: width > 0, coupling >= 0, omega0 > 0.
class LorentzianBath {
public:
    LorentzianBath(double coupling, double width, double omega0);

    double coupling() const { return coupling_; }
    double width() const { return width_; }
    double omega0() const { return omega0_; }

private:
    double coupling_;
    double width_;
    double omega0_;
};

/// Exact single-mode representation of a Lorentzian kernel:
/// alpha = sqrt(coupling * width / 2), omega = omega0, gamma = 2 * width.
PseudomodeSpec lorentzian_to_pseudomode(const LorentzianBath& bath);

/// Memory kernel C(t) of the mode decomposition; requires t >= 0.
std::complex<double> correlation_function(const PseudomodeSpec& spec, double t);

/// Memory kernel of the Lorentzian bath directly; requires t >= 0.
/// Equals correlation_function(lorentzian_to_pseudomode(bath), t).
std::complex<double> correlation_function(const LorentzianBath& bath, double t);

}  // namespace qmpe
