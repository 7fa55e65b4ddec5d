#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qmpe/dynamics.hpp"

namespace qmpe {

enum class DistanceKind {
    /// sqrt(1 - exp(-|xi P|^2)): pure-state overlap distance to vacuum,
    /// closed form for coherent runs (equals the trace distance between a
    /// coherent state and vacuum).
    CoherentOverlap,
    /// 1/2 ||rho - sigma||_F (half Frobenius norm).
    HilbertSchmidtHalf,
    /// 1/2 ||rho - sigma||_1 (half nuclear norm; the standard trace distance).
    TraceNorm,
};

/// Closed-form overlap distance from |xi P(t)|^2; accurate for tiny
/// arguments (evaluated as sqrt(-expm1(-x))).
double coherent_distance(double xi_P_abs2);

/// Distance of a state to the reference under a matrix kind.
/// CoherentOverlap has no matrix form and throws std::invalid_argument here;
/// use coherent_distance with the squared amplitude instead.
double distance_to_equilibrium(const Eigen::MatrixXcd& rho,
                               const Eigen::MatrixXcd& eq, DistanceKind kind);

/// Distance-to-equilibrium curve of a trajectory (equilibrium = vacuum).
/// Closed-form runs evaluate all kinds analytically; density-matrix runs
/// support the matrix kinds.
std::vector<double> distance_curve(const Trajectory& traj, DistanceKind kind);

/// Markovian closed-form distance sqrt(1 - exp(-|xi|^2 e^{-gamma_M t})).
double markovian_distance(double xi_abs, double gamma_M, double t);

struct CrossingReport {
    bool crossed = false;
    double t_cross = 0.0;
    int ordering_at_zero = 0;      ///< sign of D1(0) - D2(0)
    double refine_tolerance = 0.0; ///< bisection width used (grid step / 1e3)
};

/// First strict sign change of D1 - D2 on a shared grid.  `crossed` requires
/// the curves to start ordered (D1(0) > D2(0)); a crossing bracket is refined
/// by bisection on log-linear interpolants of the two curves down to
/// grid_step / 1e3 (linear interpolants when a bracket value is nonpositive).
/// Tangential contact without a sign change does not count.
CrossingReport detect_crossing(const std::vector<double>& times,
                               const std::vector<double>& d1,
                               const std::vector<double>& d2);

/// Convenience overload: distance curves of two runs on identical grids.
CrossingReport detect_crossing(const Trajectory& a, const Trajectory& b,
                               DistanceKind kind);

struct SweepPoint {
    double gamma = 0.0;
    double alpha = 0.0;
    double delta = 0.0;  ///< spectral gap of the root set
    bool is_lep = false;
};

/// Gap and exceptional-point classification over a (gamma, alpha) grid for
/// the resonant single-mode family.  Rows in gamma-major order; points are
/// independent and evaluated on `threads` workers; the result is identical
/// for any thread count.
std::vector<SweepPoint> gap_sweep(const std::vector<double>& gammas,
                                  const std::vector<double>& alphas,
                                  double omega0, int threads = 1);

}  // namespace qmpe
