#include "qmpe/mpemba.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/SVD>

#include "qmpe/spectral.hpp"

namespace qmpe {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Interpolate one distance curve inside a bracket; log-linear when both
// bracket values are positive (distances decay near-exponentially), linear
// otherwise.
double interpolate(double ta, double tb, double fa, double fb, double t) {
    const double w = (t - ta) / (tb - ta);
    if (fa > 0.0 && fb > 0.0)
        return std::exp((1.0 - w) * std::log(fa) + w * std::log(fb));
    return (1.0 - w) * fa + w * fb;
}

}  // namespace

double coherent_distance(double xi_P_abs2) {
    if (!(xi_P_abs2 >= 0.0))
        throw std::invalid_argument("squared amplitude must be >= 0");
    return std::sqrt(-std::expm1(-xi_P_abs2));
}

double distance_to_equilibrium(const Eigen::MatrixXcd& rho,
                               const Eigen::MatrixXcd& eq, DistanceKind kind) {
    if (rho.rows() != eq.rows() || rho.cols() != eq.cols())
        throw std::invalid_argument("state dimensions must agree");
    switch (kind) {
        case DistanceKind::HilbertSchmidtHalf:
            return 0.5 * (rho - eq).norm();
        case DistanceKind::TraceNorm: {
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rho - eq);
            return 0.5 * svd.singularValues().sum();
        }
        case DistanceKind::CoherentOverlap:
            break;
    }
    throw std::invalid_argument(
        "overlap distance has no matrix form; use coherent_distance");
}

std::vector<double> distance_curve(const Trajectory& traj, DistanceKind kind) {
    std::vector<double> curve;
    curve.reserve(traj.times.size());
    if (traj.representation == StateRepresentation::CoherentAmplitude) {
        for (const auto& amp : traj.amplitudes) {
            const double x = std::norm(amp);
            switch (kind) {
                case DistanceKind::CoherentOverlap:
                case DistanceKind::TraceNorm:
                    // Coherent state against vacuum: both kinds coincide.
                    curve.push_back(coherent_distance(x));
                    break;
                case DistanceKind::HilbertSchmidtHalf:
                    curve.push_back(std::sqrt(-std::expm1(-x) / 2.0));
                    break;
            }
        }
        return curve;
    }
    if (kind == DistanceKind::CoherentOverlap)
        throw std::invalid_argument(
            "overlap distance needs a coherent-amplitude run");
    if (traj.states.empty())
        throw std::invalid_argument("trajectory holds no states");
    Eigen::MatrixXcd eq =
        Eigen::MatrixXcd::Zero(traj.states[0].rows(), traj.states[0].cols());
    eq(0, 0) = std::complex<double>{1.0, 0.0};
    for (const auto& rho : traj.states)
        curve.push_back(distance_to_equilibrium(rho, eq, kind));
    return curve;
}

double markovian_distance(double xi_abs, double gamma_M, double t) {
    if (!(xi_abs >= 0.0)) throw std::invalid_argument("amplitude must be >= 0");
    if (t < 0.0) throw std::invalid_argument("time must be >= 0");
    return coherent_distance(xi_abs * xi_abs * std::exp(-gamma_M * t));
}

CrossingReport detect_crossing(const std::vector<double>& times,
                               const std::vector<double>& d1,
                               const std::vector<double>& d2) {
    if (times.size() != d1.size() || times.size() != d2.size())
        throw std::invalid_argument("curves and grid must have equal length");
    if (times.empty()) throw std::invalid_argument("empty grid");

    CrossingReport report;
    report.ordering_at_zero = sign_of(d1.front() - d2.front());

    int prev_sign = report.ordering_at_zero;
    std::size_t prev_index = 0;
    std::size_t zero_run_start = 0;
    bool in_zero_run = false;
    bool found = false;
    std::size_t lo = 0, hi = 0;
    bool at_grid_point = false;

    for (std::size_t k = 1; k < times.size() && !found; ++k) {
        const int s = sign_of(d1[k] - d2[k]);
        if (s == 0) {
            if (!in_zero_run) {
                in_zero_run = true;
                zero_run_start = k;
            }
            continue;
        }
        if (prev_sign == 0) {
            // Ordering only becomes definite here; nothing to cross yet.
            prev_sign = s;
            prev_index = k;
            in_zero_run = false;
            continue;
        }
        if (s != prev_sign) {
            found = true;
            if (in_zero_run) {
                // The curves touched exactly on a grid point and parted on
                // the other side.
                report.t_cross = times[zero_run_start];
                at_grid_point = true;
            } else {
                lo = prev_index;
                hi = k;
            }
        } else {
            prev_sign = s;
            prev_index = k;
            in_zero_run = false;
        }
    }

    if (!found) return report;
    report.crossed = report.ordering_at_zero > 0;
    if (at_grid_point) {
        report.refine_tolerance = 0.0;
        return report;
    }

    double ta = times[lo], tb = times[hi];
    const double f1a = d1[lo], f1b = d1[hi];
    const double f2a = d2[lo], f2b = d2[hi];
    report.refine_tolerance = (tb - ta) / 1e3;
    const auto diff = [&](double t) {
        return interpolate(times[lo], times[hi], f1a, f1b, t) -
               interpolate(times[lo], times[hi], f2a, f2b, t);
    };
    double fa = diff(ta);
    while (tb - ta > report.refine_tolerance) {
        const double tm = 0.5 * (ta + tb);
        const double fm = diff(tm);
        if (fm == 0.0) {
            ta = tb = tm;
            break;
        }
        if (sign_of(fm) == sign_of(fa)) {
            ta = tm;
            fa = fm;
        } else {
            tb = tm;
        }
    }
    report.t_cross = 0.5 * (ta + tb);
    return report;
}

CrossingReport detect_crossing(const Trajectory& a, const Trajectory& b,
                               DistanceKind kind) {
    if (a.times != b.times)
        throw std::invalid_argument("runs must share one time grid");
    return detect_crossing(a.times, distance_curve(a, kind),
                           distance_curve(b, kind));
}

std::vector<SweepPoint> gap_sweep(const std::vector<double>& gammas,
                                  const std::vector<double>& alphas,
                                  double omega0, int threads) {
    if (gammas.empty() || alphas.empty())
        throw std::invalid_argument("sweep grid must be nonempty");
    for (double g : gammas)
        if (!(g > 0.0)) throw std::invalid_argument("sweep gammas must be > 0");
    for (double a : alphas)
        if (!(a >= 0.0)) throw std::invalid_argument("sweep alphas must be >= 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");

    std::vector<SweepPoint> points(gammas.size() * alphas.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const double gamma = gammas[idx / alphas.size()];
            const double alpha = alphas[idx % alphas.size()];
            SweepPoint& p = points[idx];
            p.gamma = gamma;
            p.alpha = alpha;
            const double disc = gamma * gamma - 16.0 * alpha * alpha;
            p.delta = disc >= 0.0 ? 0.25 * (gamma - std::sqrt(disc))
                                  : 0.25 * gamma;
            if (disc >= 0.0 && alpha == 0.0)
                p.delta = 0.5 * gamma;  // uncoupled system mode never decays
            // Coalescence at the tolerance of a computed root pair.
            const double scale =
                std::max(1.0, std::hypot(0.25 * gamma, omega0) +
                                  0.25 * std::sqrt(std::abs(disc)));
            p.is_lep = 0.5 * std::sqrt(std::abs(disc)) <= 1e-6 * scale;
        }
    };

    const int n_workers =
        std::clamp(threads, 1, static_cast<int>(points.size()));
    if (n_workers == 1) {
        work(0, points.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        const std::size_t chunk =
            (points.size() + static_cast<std::size_t>(n_workers) - 1) /
            static_cast<std::size_t>(n_workers);
        for (int w = 0; w < n_workers; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(points.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return points;
}

}  // namespace qmpe
