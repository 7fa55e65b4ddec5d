#include "qmpe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmpe/spectral.hpp"

namespace qmpe {

namespace {

using Cx = std::complex<double>;

void check_grid(const std::vector<double>& times, bool require_zero_start) {
    if (times.empty()) throw std::invalid_argument("empty time grid");
    if (require_zero_start && times.front() != 0.0)
        throw std::invalid_argument("time grid must start at 0");
    if (times.front() < 0.0)
        throw std::invalid_argument("time grid must be nonnegative");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("time grid must be strictly increasing");
}

double poisson_tail_beyond(double mean, int levels) {
    // P[K >= levels] for K ~ Poisson(mean): weight a coherent state of
    // |xi|^2 = mean loses under a `levels`-state cutoff.
    if (mean == 0.0) return 0.0;
    double term = std::exp(-mean);
    double cum = term;
    for (int k = 1; k < levels; ++k) {
        term *= mean / k;
        cum += term;
    }
    return std::max(0.0, 1.0 - cum);
}

struct FactorLayout {
    std::vector<int> dims;           // system first, then auxiliary modes
    std::vector<std::size_t> strides;
};

FactorLayout layout_of(const TruncationSpec& trunc) {
    FactorLayout lay;
    lay.dims.push_back(trunc.n_sys());
    lay.dims.insert(lay.dims.end(), trunc.n_modes().begin(),
                    trunc.n_modes().end());
    lay.strides.assign(lay.dims.size(), 1);
    for (std::size_t f = lay.dims.size(); f-- > 1;)
        lay.strides[f - 1] =
            lay.strides[f] * static_cast<std::size_t>(lay.dims[f]);
    return lay;
}

bool top_level_leaks(const Eigen::VectorXcd& y, const FactorLayout& lay,
                     std::size_t dim, double threshold) {
    for (std::size_t f = 0; f < lay.dims.size(); ++f) {
        const std::size_t d = static_cast<std::size_t>(lay.dims[f]);
        double population = 0.0;
        for (std::size_t n = 0; n < dim; ++n)
            if ((n / lay.strides[f]) % d == d - 1)
                population += y[static_cast<Eigen::Index>(n * dim + n)].real();
        if (population > threshold) return true;
    }
    return false;
}

}  // namespace

int coherent_cutoff(double xi_abs, double tail_tol) {
    if (!(xi_abs >= 0.0)) throw std::invalid_argument("amplitude must be >= 0");
    const double mean = xi_abs * xi_abs;
    int levels = 2;
    while (poisson_tail_beyond(mean, levels) >= tail_tol) {
        ++levels;
        if (levels > 4096)
            throw std::invalid_argument("coherent cutoff beyond 4096 levels");
    }
    return levels;
}

Eigen::VectorXcd coherent_vector(std::complex<double> xi, int levels) {
    if (levels < 1) throw std::invalid_argument("need at least one level");
    Eigen::VectorXcd v(levels);
    Cx amp{1.0, 0.0};
    v[0] = amp;
    for (int k = 1; k < levels; ++k) {
        amp *= xi / std::sqrt(static_cast<double>(k));
        v[k] = amp;
    }
    v.normalize();
    return v;
}

Eigen::MatrixXcd coherent_initial_state(const CoherentAmplitudeState& state,
                                        const TruncationSpec& trunc) {
    const double mean = std::norm(state.xi);
    if (poisson_tail_beyond(mean, trunc.n_sys()) > 1e-10)
        throw std::invalid_argument(
            "system cutoff truncates the coherent state beyond 1e-10 weight");
    const Eigen::VectorXcd sys = coherent_vector(state.xi, trunc.n_sys());
    const std::size_t dim = trunc.dimension();
    const std::size_t env = dim / static_cast<std::size_t>(trunc.n_sys());
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    for (int i = 0; i < trunc.n_sys(); ++i)
        psi[static_cast<Eigen::Index>(static_cast<std::size_t>(i) * env)] = sys[i];
    return psi * psi.adjoint();
}

Trajectory evolve_master_equation(const LiouvillianOperator& lv,
                                  const Eigen::MatrixXcd& rho0_full,
                                  const std::vector<double>& times,
                                  const IntegratorOptions& opts) {
    check_grid(times, true);
    const std::size_t dim = lv.dim();
    if (rho0_full.rows() != static_cast<Eigen::Index>(dim) ||
        rho0_full.cols() != static_cast<Eigen::Index>(dim))
        throw std::invalid_argument("state dimension does not match generator");

    const FactorLayout lay = layout_of(lv.trunc);
    Trajectory traj;
    traj.times = times;
    traj.representation = StateRepresentation::DensityMatrix;
    traj.states.reserve(times.size());
    traj.leakage_flags.assign(times.size(), 0);

    const Eigen::Index nvec = lv.matrix.rows();
    Eigen::VectorXcd y =
        Eigen::Map<const Eigen::VectorXcd>(rho0_full.data(), nvec);

    const auto record = [&](std::size_t k) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(
            y.data(), static_cast<Eigen::Index>(dim),
            static_cast<Eigen::Index>(dim));
        traj.states.push_back(partial_trace_pseudomodes(rho, lv.trunc));
        if (top_level_leaks(y, lay, dim, opts.leak_threshold)) {
            traj.leakage_flags[k] = 1;
            traj.leakage_warning = true;
        }
    };
    record(0);

    // Dormand-Prince 5(4) with FSAL.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const auto rhs = [&](const Eigen::VectorXcd& state) -> Eigen::VectorXcd {
        return lv.matrix * state;
    };

    double t = 0.0;
    Eigen::VectorXcd k1 = rhs(y);
    double h;
    {
        const double rate = k1.norm() / std::max(y.norm(), 1e-300);
        h = std::min(times.back() - times.front(),
                     rate > 0.0 ? 0.1 / rate : times.back() - times.front());
        h = std::max(h, 1e-12);
    }

    Eigen::VectorXcd k2(nvec), k3(nvec), k4(nvec), k5(nvec), k6(nvec), k7(nvec);
    Eigen::VectorXcd ynew(nvec), yerr(nvec);

    std::size_t step_count = 0;
    for (std::size_t target = 1; target < times.size(); ++target) {
        const double t_target = times[target];
        while (t < t_target) {
            if (++step_count > opts.max_steps)
                throw std::runtime_error("integrator exceeded step budget");
            bool clipped = false;
            if (t + h >= t_target) {
                h = t_target - t;
                clipped = true;
            }

            k2 = rhs(y + h * (a21 * k1));
            k3 = rhs(y + h * (a31 * k1 + a32 * k2));
            k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                              a65 * k5));
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = rhs(ynew);
            yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                        e7 * k7);

            double err_sq = 0.0;
            for (Eigen::Index i = 0; i < nvec; ++i) {
                const double scale =
                    opts.abs_tol +
                    opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double e = std::abs(yerr[i]) / scale;
                err_sq += e * e;
            }
            const double err = std::sqrt(err_sq / static_cast<double>(nvec));

            if (err <= 1.0) {
                t = clipped ? t_target : t + h;
                y.swap(ynew);
                k1.swap(k7);
            }
            const double factor = err > 0.0
                                      ? 0.9 * std::pow(err, -0.2)
                                      : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
            if (h < 1e-14 * std::max(1.0, t))
                throw std::runtime_error("integrator step size underflow");
        }
        record(target);
    }
    return traj;
}

std::complex<double> analytic_P(const PseudomodeSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("time must be >= 0");

    if (spec.mode_count() == 1 && spec.resonant()) {
        const double gamma = spec.modes()[0].gamma;
        const double alpha = spec.modes()[0].alpha;
        const double q = gamma / 4.0;
        const double k2 = q * q - alpha * alpha;
        const double kt_abs = std::sqrt(std::abs(k2)) * t;
        const Cx phase{std::cos(spec.omega0() * t), -std::sin(spec.omega0() * t)};

        double envelope;
        if (kt_abs < 1e-3) {
            // Series across the coalescence point k -> 0 (both signs of k^2):
            // cosh(kt) + q t sinhc(kt), with u = (kt)^2.
            const double u = k2 * t * t;
            const double ch = 1.0 + u / 2.0 + u * u / 24.0;
            const double shc = 1.0 + u / 6.0 + u * u / 120.0;
            envelope = std::exp(-q * t) * (ch + q * t * shc);
        } else if (k2 > 0.0) {
            // Overdamped: exponent sum with both exponents <= 0.
            const double k = std::sqrt(k2);
            envelope = 0.5 * ((1.0 + q / k) * std::exp((k - q) * t) +
                              (1.0 - q / k) * std::exp(-(k + q) * t));
        } else {
            // Underdamped: damped oscillation.
            const double k = std::sqrt(-k2);
            envelope = std::exp(-q * t) *
                       (std::cos(k * t) + (q / k) * std::sin(k * t));
        }
        return phase * envelope;
    }

    const Eigen::MatrixXcd m = build_dynamical_matrix(spec);
    const Eigen::MatrixXcd propagator = (t * m).exp();
    return propagator(0, 0);
}

Trajectory coherent_trajectory(const PseudomodeSpec& spec,
                               std::complex<double> xi,
                               const std::vector<double>& times) {
    check_grid(times, false);
    Trajectory traj;
    traj.times = times;
    traj.representation = StateRepresentation::CoherentAmplitude;
    traj.xi = xi;
    traj.amplitudes.reserve(times.size());
    for (double t : times) traj.amplitudes.push_back(xi * analytic_P(spec, t));
    traj.leakage_flags.assign(times.size(), 0);
    return traj;
}

MarkovianReduction markovian_reduction(const PseudomodeSpec& spec) {
    MarkovianReduction red;
    red.omega0 = spec.omega0();
    for (const auto& m : spec.modes()) {
        red.gamma_M += 4.0 * m.alpha * m.alpha / m.gamma;
        red.lamb_shift += 4.0 * m.alpha * m.alpha * m.omega / (m.gamma * m.gamma);
    }
    return red;
}

std::complex<double> markovian_P(const MarkovianReduction& red, double t,
                                 bool include_lamb_shift) {
    if (t < 0.0) throw std::invalid_argument("time must be >= 0");
    const double phase =
        (red.omega0 + (include_lamb_shift ? red.lamb_shift : 0.0)) * t;
    return std::exp(-0.5 * red.gamma_M * t) * Cx{std::cos(phase), -std::sin(phase)};
}

std::complex<double> markovian_eigenvalue(const MarkovianReduction& red,
                                          const std::vector<int>& index) {
    if (index.size() != 4)
        throw std::invalid_argument("index must be (m0, n0, m1, n1)");
    for (int v : index)
        if (v < 0) throw std::invalid_argument("combination indices must be >= 0");
    return Cx{-0.5 * red.gamma_M * (index[2] + index[3]),
              -red.omega0 * (index[0] - index[1])};
}

double markovian_gap(const MarkovianReduction& red) { return 0.5 * red.gamma_M; }

}  // namespace qmpe
