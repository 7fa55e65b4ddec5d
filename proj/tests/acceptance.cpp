// Acceptance gate: one PASS/FAIL line per criterion, exit code = #failures.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmpe/dynamics.hpp"
#include "qmpe/liouvillian.hpp"
#include "qmpe/mpemba.hpp"
#include "qmpe/spectral.hpp"

using namespace qmpe;
using Cx = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int n, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s%s%s%s\n", ok ? "PASS" : "FAIL", n,
                what.c_str(), detail.empty() ? "" : " (",
                detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
    if (!ok) ++failures;
}

void run(int n, const std::string& what,
         const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(n, what, ok, detail);
    } catch (const std::exception& e) {
        report(n, what, false, std::string("exception: ") + e.what());
    }
}

PseudomodeSpec single(double alpha, double gamma) {
    return PseudomodeSpec(1.0, {{alpha, 1.0, gamma}});
}

std::vector<double> uniform_grid(double t_max, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        t[static_cast<std::size_t>(k)] = t_max * k / (n - 1);
    t.front() = 0.0;
    t.back() = t_max;
    return t;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Least-squares slope of y over x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += (x[k] - mx) * (y[k] - my);
        den += (x[k] - mx) * (x[k] - mx);
    }
    return num / den;
}

// Greedy nearest-unused matching; returns the largest match distance.
double match_into(const std::vector<Cx>& wanted, const std::vector<Cx>& pool) {
    std::vector<char> used(pool.size(), 0);
    double worst = 0.0;
    for (const Cx& w : wanted) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(pool[i] - w);
            if (d < best) {
                best = d;
                best_idx = i;
            }
        }
        used[best_idx] = 1;
        worst = std::max(worst, best);
    }
    return worst;
}

std::optional<Trajectory> oracle_trajectory;  // filled by criterion 4

}  // namespace

// 1. Companion-matrix roots match the resonant closed forms on a 50 x 50
//    grid of (gamma, alpha) in (0, 20] x (0, 5]; under one second.
static void criterion1() {
    run(1, "closed-form root agreement over the damping grid", [] {
        const auto t0 = Clock::now();
        double max_err = 0.0;
        for (int k = 1; k <= 50; ++k) {
            for (int j = 1; j <= 50; ++j) {
                const auto spec = single(0.1 * j, 0.4 * k);
                const RootSet rs =
                    polynomial_roots(characteristic_polynomial(spec));
                const auto cf = closed_form_roots(spec);
                max_err = std::max(max_err, std::abs(rs.roots[0] - cf[0]));
                max_err = std::max(max_err, std::abs(rs.roots[1] - cf[1]));
            }
        }
        const double secs = seconds_since(t0);
        const bool ok = max_err <= 1e-10 && secs < 1.0;
        return std::make_pair(ok, "max error " + fmt(max_err) + ", " +
                                      fmt(secs) + " s");
    });
}

// 2. Exceptional-point location on the gamma scan at alpha = 2.5 returns
//    gamma* = 10 +- 1e-9; the weak-coupling point (0.1, 0.025) is
//    classified as an exceptional point; under one second.
static void criterion2() {
    run(2, "exceptional point located and classified", [] {
        const auto t0 = Clock::now();
        const LepLocation loc =
            locate_lep(single(2.5, 9.0), ScanVariable::Gamma, 0, 8.0, 12.0);
        const bool found = loc.found && std::abs(loc.value - 10.0) <= 1e-9 &&
                           loc.report.is_lep;

        const auto weak = single(0.025, 0.1);
        const auto poly = characteristic_polynomial(weak);
        const LepReport rep = detect_lep(poly, polynomial_roots(poly));

        const double secs = seconds_since(t0);
        const bool ok = found && rep.is_lep && secs < 1.0;
        return std::make_pair(
            ok, "gamma* = " + fmt(loc.value) + ", weak-coupling is_lep = " +
                    (rep.is_lep ? "true" : "false") + ", " + fmt(secs) + " s");
    });
}

// 3. Gap law at fixed alpha = 2.5: delta equals the overdamped /
//    underdamped closed form to 1e-12 and is maximised at gamma = 4 alpha
//    with maximum value alpha.
static void criterion3() {
    run(3, "spectral gap law and its maximum", [] {
        std::vector<double> gammas;
        for (int k = 0; k <= 38; ++k) gammas.push_back(1.0 + 0.5 * k);
        const double alpha = 2.5;
        const auto pts = gap_sweep(gammas, {alpha}, 1.0);

        double max_law_err = 0.0;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double g = pts[i].gamma;
            const double disc = g * g - 16.0 * alpha * alpha;
            const double expected =
                disc >= 0.0 ? 0.25 * (g - std::sqrt(disc)) : 0.25 * g;
            max_law_err = std::max(max_law_err,
                                   std::abs(pts[i].delta - expected));
            if (pts[i].delta > pts[argmax].delta) argmax = i;
        }
        const bool at_ep = pts[argmax].gamma == 10.0;
        const double max_delta_err = std::abs(pts[argmax].delta - alpha);
        const bool ok = max_law_err <= 1e-12 && at_ep && max_delta_err <= 1e-12;
        return std::make_pair(
            ok, "law error " + fmt(max_law_err) + ", max at gamma = " +
                    fmt(pts[argmax].gamma) + " with delta = " +
                    fmt(pts[argmax].delta));
    });
}

// 4. Numeric master-equation run at (10, 2.5), xi = 1, cutoffs (12, 12)
//    matches the coherent closed form within Hilbert-Schmidt distance 1e-6
//    at 200 grid points over [0, 5]; under thirty seconds.
static void criterion4() {
    run(4, "integrator reproduces the coherent closed form", [] {
        const auto t0 = Clock::now();
        const auto spec = single(2.5, 10.0);
        const TruncationSpec trunc(12, {12});
        const Cx xi{1.0, 0.0};

        const Eigen::VectorXcd sys = coherent_vector(xi, 12);
        Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(12, 12);
        vac(0, 0) = Cx{1.0, 0.0};
        const Eigen::MatrixXcd rho0 =
            Eigen::kroneckerProduct((sys * sys.adjoint()).eval(), vac);

        const auto times = uniform_grid(5.0, 200);
        const Trajectory traj = evolve_master_equation(
            build_liouvillian(spec, trunc), rho0, times);

        double max_hs = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Eigen::VectorXcd ref =
                coherent_vector(xi * analytic_P(spec, times[k]), 12);
            max_hs = std::max(
                max_hs,
                (traj.states[k] - ref * ref.adjoint()).norm());
        }
        const double secs = seconds_since(t0);
        oracle_trajectory = traj;
        const bool ok = max_hs < 1e-6 && secs < 30.0 && !traj.leakage_warning;
        return std::make_pair(ok, "max HS distance " + fmt(max_hs) + ", " +
                                      fmt(secs) + " s");
    });
}

// 5. Truncated-generator eigenvalues at (10, 2.4) match the root
//    combinations to 1e-8 at cutoffs (3, 3) and stay put at (4, 4); the
//    exceptional tuning plants its double root in the generator spectrum.
static void criterion5() {
    run(5, "excitation sectors are exact under truncation", [] {
        const auto spec = single(2.4, 10.0);
        const auto roots = closed_form_roots(spec);

        std::vector<Cx> combos;
        for (int m0 = 0; m0 <= 2; ++m0)
            for (int m1 = 0; m0 + m1 <= 2; ++m1)
                for (int n0 = 0; n0 <= 2; ++n0)
                    for (int n1 = 0; n0 + n1 <= 2; ++n1)
                        combos.push_back(
                            double(m0) * roots[0] + double(m1) * roots[1] +
                            double(n0) * std::conj(roots[0]) +
                            double(n1) * std::conj(roots[1]));
        if (combos.size() != 36)
            return std::make_pair(false, std::string("combination count"));

        const auto ev3 =
            full_spectrum(build_liouvillian(spec, TruncationSpec(3, {3})))
                .eigenvalues;
        const auto ev4 =
            full_spectrum(build_liouvillian(spec, TruncationSpec(4, {4})))
                .eigenvalues;
        const double d3 = match_into(combos, ev3);
        const double d4 = match_into(combos, ev4);

        const auto ep =
            full_spectrum(build_liouvillian(single(2.5, 10.0),
                                            TruncationSpec(3, {3})))
                .eigenvalues;
        double ep_dist = std::numeric_limits<double>::infinity();
        for (const Cx& l : ep)
            ep_dist = std::min(ep_dist, std::abs(l - Cx(-2.5, -1.0)));

        const bool ok = d3 <= 1e-8 && d4 <= 1e-8 && ep_dist <= 1e-6;
        return std::make_pair(ok, "match error " + fmt(d3) + " at (3,3), " +
                                      fmt(d4) + " at (4,4), EP eigenvalue off "
                                      "by " + fmt(ep_dist));
    });
}

// 6. Late-time slope of ln D(t) over [10, 20]: -2.5 within 5% at the
//    exceptional tuning, -1.8 within 5% at (10, 2.4).
static void criterion6() {
    run(6, "late-time decay rates equal the spectral gap", [] {
        const auto slope_of = [](const PseudomodeSpec& spec) {
            const auto ts = uniform_grid(10.0, 101);  // offsets below
            std::vector<double> x(ts.size()), y(ts.size());
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const double t = 10.0 + ts[k];
                x[k] = t;
                y[k] = std::log(coherent_distance(
                    std::norm(analytic_P(spec, t))));
            }
            return fitted_slope(x, y);
        };
        const double s_ep = slope_of(single(2.5, 10.0));
        const double s_od = slope_of(single(2.4, 10.0));
        const bool ok = std::abs(s_ep + 2.5) <= 0.05 * 2.5 &&
                        std::abs(s_od + 1.8) <= 0.05 * 1.8;
        return std::make_pair(ok, "slopes " + fmt(s_ep) + " vs -2.5, " +
                                      fmt(s_od) + " vs -1.8");
    });
}

// 7. Relaxation overtaking: (xi = 2, exceptional generator) vs (xi = 1,
//    gamma = 10, alpha = 2.4) cross within 0.1 of the transcendental
//    oracle; the same amplitudes on identical generators never cross.
static void criterion7() {
    run(7, "distance curves cross at the predicted time", [] {
        const auto times = uniform_grid(5.0, 501);
        const Trajectory hot =
            coherent_trajectory(single(2.5, 10.0), Cx{2.0, 0.0}, times);
        const Trajectory cold =
            coherent_trajectory(single(2.4, 10.0), Cx{1.0, 0.0}, times);
        const CrossingReport rep =
            detect_crossing(hot, cold, DistanceKind::CoherentOverlap);

        const double d1 = coherent_distance(4.0);
        const double d2 = coherent_distance(1.0);
        const bool starts_ok =
            std::abs(d1 - std::sqrt(1.0 - std::exp(-4.0))) <= 1e-12 &&
            std::abs(d2 - std::sqrt(1.0 - std::exp(-1.0))) <= 1e-12 &&
            std::abs(d1 - 0.99084) <= 5e-4 && std::abs(d2 - 0.79527) <= 5e-4 &&
            d1 > d2;

        // Independent oracle: 2 e^{-2.5 t}(1 + 2.5 t) equals
        // e^{-2.5 t}[cosh(0.7 t) + (25/7) sinh(0.7 t)] at the crossing.
        const auto h = [](double t) {
            return 2.0 * (1.0 + 2.5 * t) - std::cosh(0.7 * t) -
                   (25.0 / 7.0) * std::sinh(0.7 * t);
        };
        double lo = 1.0, hi = 5.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0.0 ? lo : hi) = mid;
        }
        const double oracle = 0.5 * (lo + hi);

        const Trajectory same_hot =
            coherent_trajectory(single(2.4, 10.0), Cx{2.0, 0.0}, times);
        const CrossingReport none =
            detect_crossing(same_hot, cold, DistanceKind::CoherentOverlap);

        const bool ok = starts_ok && rep.crossed &&
                        std::abs(rep.t_cross - oracle) <= 0.1 &&
                        rep.ordering_at_zero == 1 && !none.crossed;
        return std::make_pair(ok, "t_cross = " + fmt(rep.t_cross) +
                                      ", oracle = " + fmt(oracle) +
                                      ", identical generators crossed = " +
                                      (none.crossed ? "true" : "false"));
    });
}

// 8. Weak-coupling limit: with 2 alpha^2 / gamma fixed at 1.25 the
//    sup-norm gap to the reduced propagator falls monotonically over
//    gamma in {50, 100, 500} and is below 2% at 500; reduced-model pairs
//    preserve their ordering.
static void criterion8() {
    run(8, "convergence to the weak-coupling reduction", [] {
        const auto times = uniform_grid(4.0, 201);
        std::vector<double> sups;
        for (double gamma : {50.0, 100.0, 500.0}) {
            const double alpha = std::sqrt(0.625 * gamma);
            const auto spec = single(alpha, gamma);
            const MarkovianReduction red = markovian_reduction(spec);
            double sup = 0.0;
            for (double t : times)
                sup = std::max(sup, std::abs(analytic_P(spec, t) -
                                             markovian_P(red, t)));
            sups.push_back(sup);
        }
        const bool monotone = sups[0] > sups[1] && sups[1] > sups[2];

        // Ordering preservation in the reduced model: same rate, ordered
        // amplitudes (2 vs 1), and the criterion-7 pair's reductions.
        const auto long_grid = uniform_grid(5.0, 501);
        std::vector<double> a1, a2, b1, b2;
        for (double t : long_grid) {
            a1.push_back(markovian_distance(2.0, 2.5, t));
            a2.push_back(markovian_distance(1.0, 2.5, t));
            b1.push_back(markovian_distance(2.0, 2.5, t));
            b2.push_back(markovian_distance(1.0, 2.304, t));
        }
        const bool no_cross = !detect_crossing(long_grid, a1, a2).crossed &&
                              !detect_crossing(long_grid, b1, b2).crossed;

        const bool ok = monotone && sups[2] < 0.02 && no_cross;
        return std::make_pair(ok, "sup gaps " + fmt(sups[0]) + " > " +
                                      fmt(sups[1]) + " > " + fmt(sups[2]));
    });
}

// 9. Generator hygiene on the stored numeric run: trace drift < 1e-9,
//    hermiticity < 1e-10, purity error < 1e-6; the stationary state is the
//    joint vacuum with residual below 1e-10.
static void criterion9() {
    run(9, "trace, hermiticity, purity and stationary state", [] {
        if (!oracle_trajectory.has_value())
            return std::make_pair(false,
                                  std::string("no stored numeric trajectory"));
        double drift = 0.0, herm = 0.0, purity = 0.0;
        for (const Eigen::MatrixXcd& rho : oracle_trajectory->states) {
            drift = std::max(drift, std::abs(rho.trace() - Cx{1.0, 0.0}));
            herm = std::max(herm, (rho - rho.adjoint()).norm());
            purity = std::max(purity,
                              std::abs((rho * rho).trace() - Cx{1.0, 0.0}));
        }

        const LiouvillianOperator lv =
            build_liouvillian(single(2.4, 10.0), TruncationSpec(3, {3}));
        const Eigen::MatrixXcd steady = steady_state(lv);
        const Eigen::Map<const Eigen::VectorXcd> vec(steady.data(), 81);
        const double residual = (lv.matrix * vec).norm();
        Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(9, 9);
        vac(0, 0) = Cx{1.0, 0.0};
        const double vac_err = (steady - vac).norm();

        const bool ok = drift < 1e-9 && herm < 1e-10 && purity < 1e-6 &&
                        residual < 1e-10 && vac_err < 1e-10;
        return std::make_pair(ok, "drift " + fmt(drift) + ", hermiticity " +
                                      fmt(herm) + ", purity " + fmt(purity) +
                                      ", stationary residual " + fmt(residual));
    });
}

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
