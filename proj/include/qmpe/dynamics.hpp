#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qmpe/bath.hpp"
#include "qmpe/liouvillian.hpp"

namespace qmpe {

/// Coherent initial data: system mode displaced to amplitude xi, every
/// auxiliary mode in vacuum.
struct CoherentAmplitudeState {
    std::complex<double> xi;
};

enum class StateRepresentation { DensityMatrix, CoherentAmplitude };

/// A sampled relaxation run.  Numeric runs carry reduced system density
/// matrices; closed-form runs carry the coherent amplitudes xi * P(t).
struct Trajectory {
    std::vector<double> times;
    StateRepresentation representation = StateRepresentation::DensityMatrix;
    std::vector<Eigen::MatrixXcd> states;          ///< DensityMatrix runs
    std::vector<std::complex<double>> amplitudes;  ///< CoherentAmplitude runs
    std::complex<double> xi{0.0, 0.0};
    /// Per-sample flag: population of any factor's top Fock level exceeded
    /// the leak threshold at that time.
    std::vector<char> leakage_flags;
    bool leakage_warning = false;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double leak_threshold = 1e-6;
    std::size_t max_steps = 2000000;
};

/// Smallest Fock cutoff whose coherent-state weight beyond it stays below
/// tail_tol (Poisson tail of |xi|^2); never below 2.
int coherent_cutoff(double xi_abs, double tail_tol = 1e-10);

/// Truncated, renormalised coherent column vector of amplitude xi.
Eigen::VectorXcd coherent_vector(std::complex<double> xi, int levels);

/// Full-space pure product state |xi><xi| (x) vacuum.  Throws
/// std::invalid_argument when the coherent tail beyond n_sys exceeds 1e-10
/// (the truncation would misrepresent the state from the start).
Eigen::MatrixXcd coherent_initial_state(const CoherentAmplitudeState& state,
                                        const TruncationSpec& trunc);

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) integration of
/// rho' = L rho on the vectorised state, sampled exactly on `times`
/// (strictly increasing, first entry 0).  Returns reduced system states and
/// flags truncation leakage per sample.  Trace is a linear invariant of the
/// stepper, so it is conserved to rounding; no renormalisation is applied.
Trajectory evolve_master_equation(const LiouvillianOperator& lv,
                                  const Eigen::MatrixXcd& rho0_full,
                                  const std::vector<double>& times,
                                  const IntegratorOptions& opts = {});

/// System-amplitude propagator P(t) (P(0) = 1).  The resonant single-mode
/// family uses the closed form
///   P = e^{-i omega0 t - gamma t/4} [cosh(kt) + gamma/(4k) sinh(kt)],
///   k = sqrt(gamma^2/16 - alpha^2),
/// evaluated in overflow-safe exponential-sum / trigonometric branches with a
/// series branch across k -> 0 (the exceptional point, where
/// P = e^{-i omega0 t - gamma t/4}(1 + gamma t/4)).  Every other family uses
/// entry (0,0) of exp(t M) with M the dynamical matrix.
std::complex<double> analytic_P(const PseudomodeSpec& spec, double t);

/// Closed-form coherent run: amplitudes xi * P(t) on the grid.
Trajectory coherent_trajectory(const PseudomodeSpec& spec, std::complex<double> xi,
                               const std::vector<double>& times);

/// Weak-coupling (Born-Markov) reduction of the mode decomposition.
struct MarkovianReduction {
    double gamma_M = 0.0;     ///< relaxation rate sum_i 4 alpha_i^2 / gamma_i
    double lamb_shift = 0.0;  ///< reported shift sum_i 4 alpha_i^2 omega_i / gamma_i^2
    double omega0 = 0.0;
};

MarkovianReduction markovian_reduction(const PseudomodeSpec& spec);

/// Markovian amplitude e^{-gamma_M t / 2 - i omega0 t}; the Lamb-shift phase
/// e^{-i lamb_shift t} is opt-in and excluded by default.
std::complex<double> markovian_P(const MarkovianReduction& red, double t,
                                 bool include_lamb_shift = false);

/// Markovian generator eigenvalue for index (m0, n0, m1, n1):
///   -1/2 gamma_M (m1 + n1) - i omega0 (m0 - n0).
std::complex<double> markovian_eigenvalue(const MarkovianReduction& red,
                                          const std::vector<int>& index);

/// Markovian spectral gap gamma_M / 2; constant in the decay index.
double markovian_gap(const MarkovianReduction& red);

}  // namespace qmpe
