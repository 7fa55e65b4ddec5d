#include "qmpe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace qmpe {

namespace {

using Cx = std::complex<double>;
using Poly = std::vector<Cx>;  // ascending coefficients

Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, Cx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// Sort ascending -Re (slow decay first); runs of nearly equal real parts are
// grouped so the Im tie-break is insensitive to last-bit noise in Re.
void sort_decay_order(std::vector<Cx>& roots) {
    std::sort(roots.begin(), roots.end(), [](const Cx& a, const Cx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    double scale = 1.0;
    for (const Cx& r : roots) scale = std::max(scale, std::abs(r));
    const double tie = 1e-9 * scale;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= roots.size(); ++i) {
        if (i == roots.size() ||
            roots[start].real() - roots[i].real() > tie) {
            std::sort(roots.begin() + start, roots.begin() + i,
                      [](const Cx& a, const Cx& b) { return a.imag() < b.imag(); });
            start = i;
        }
    }
}

// Guarded Newton refinement of a simple-root estimate: accept a step only
// while it reduces |Q|.
Cx polish_root(const PolynomialCoefficients& poly, Cx r) {
    double best = std::abs(poly.evaluate(r));
    for (int it = 0; it < 8; ++it) {
        const Cx d = poly.derivative(r);
        if (d == Cx{0.0, 0.0}) break;
        const Cx step = poly.evaluate(r) / d;
        const Cx cand = r - step;
        const double val = std::abs(poly.evaluate(cand));
        if (!(val < best)) break;
        r = cand;
        best = val;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

// Newton on Q' starting from the midpoint of a near-coalesced pair; at a
// two-fold root of Q the target is a simple root of Q', so this converges
// quadratically where Newton on Q itself stalls.
Cx recentre_pair(const PolynomialCoefficients& poly, Cx midpoint) {
    Cx r = midpoint;
    double best = std::abs(poly.derivative(r));
    for (int it = 0; it < 60; ++it) {
        const Cx d2 = poly.second_derivative(r);
        if (d2 == Cx{0.0, 0.0}) break;
        const Cx step = poly.derivative(r) / d2;
        const Cx cand = r - step;
        const double val = std::abs(poly.derivative(cand));
        if (!(val < best)) break;
        r = cand;
        best = val;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

double derivative_coefficient_scale(const PolynomialCoefficients& poly) {
    const auto& c = poly.coefficients();
    double scale = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k)
        scale = std::max(scale, static_cast<double>(k) * std::abs(c[k]));
    return scale;
}

}  // namespace

Eigen::MatrixXcd build_dynamical_matrix(const PseudomodeSpec& spec) {
    const auto& modes = spec.modes();
    const Eigen::Index n = static_cast<Eigen::Index>(modes.size()) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(0, 0) = Cx{0.0, -spec.omega0()};
    for (Eigen::Index j = 1; j < n; ++j) {
        const auto& mode = modes[static_cast<std::size_t>(j - 1)];
        m(j, j) = Cx{-0.5 * mode.gamma, -mode.omega};
        m(0, j) = Cx{0.0, -mode.alpha};
        m(j, 0) = Cx{0.0, -mode.alpha};
    }
    return m;
}

PolynomialCoefficients::PolynomialCoefficients(std::vector<Cx> ascending)
    : coeffs_(std::move(ascending)) {
    if (coeffs_.size() < 2)
        throw std::invalid_argument("polynomial must have degree >= 1");
    const Cx lead = coeffs_.back();
    if (lead == Cx{0.0, 0.0})
        throw std::invalid_argument("leading coefficient must be nonzero");
    if (lead != Cx{1.0, 0.0})
        for (auto& c : coeffs_) c /= lead;
    coeffs_.back() = Cx{1.0, 0.0};
}

Cx PolynomialCoefficients::evaluate(Cx x) const {
    Cx acc{0.0, 0.0};
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * x + coeffs_[k];
    return acc;
}

Cx PolynomialCoefficients::derivative(Cx x) const {
    Cx acc{0.0, 0.0};
    for (std::size_t k = coeffs_.size(); k-- > 1;)
        acc = acc * x + static_cast<double>(k) * coeffs_[k];
    return acc;
}

Cx PolynomialCoefficients::second_derivative(Cx x) const {
    Cx acc{0.0, 0.0};
    for (std::size_t k = coeffs_.size(); k-- > 2;)
        acc = acc * x + static_cast<double>(k * (k - 1)) * coeffs_[k];
    return acc;
}

double PolynomialCoefficients::coefficient_scale() const {
    double scale = 0.0;
    for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
    return scale;
}

PolynomialCoefficients characteristic_polynomial(const PseudomodeSpec& spec) {
    const auto& modes = spec.modes();
    // Linear factors (x - d_j) with d_0 = -i omega0, d_j = -i omega_j - gamma_j/2.
    std::vector<Poly> factors;
    factors.push_back({Cx{0.0, spec.omega0()}, Cx{1.0, 0.0}});
    for (const auto& m : modes)
        factors.push_back({Cx{0.5 * m.gamma, m.omega}, Cx{1.0, 0.0}});

    Poly q = factors[0];
    for (std::size_t j = 1; j < factors.size(); ++j) q = multiply(q, factors[j]);

    for (std::size_t j = 1; j < factors.size(); ++j) {
        Poly term{Cx{1.0, 0.0}};
        for (std::size_t j2 = 1; j2 < factors.size(); ++j2)
            if (j2 != j) term = multiply(term, factors[j2]);
        const double a2 = modes[j - 1].alpha * modes[j - 1].alpha;
        for (std::size_t k = 0; k < term.size(); ++k) q[k] += a2 * term[k];
    }
    return PolynomialCoefficients(std::move(q));
}

RootSet polynomial_roots(const PolynomialCoefficients& poly) {
    const int d = poly.degree();
    const auto& c = poly.coefficients();

    std::vector<Cx> roots;
    if (d == 1) {
        roots.push_back(-c[0]);
    } else {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i + 1 < d; ++i) companion(i + 1, i) = Cx{1.0, 0.0};
        for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[static_cast<std::size_t>(i)];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("companion eigenvalue iteration failed");
        roots.assign(solver.eigenvalues().data(),
                     solver.eigenvalues().data() + d);
    }

    for (auto& r : roots) r = polish_root(poly, r);

    RootSet set;
    set.multiplicity_tolerance = 1e-6;
    // Coalesced pairs: generic eigensolvers split a two-fold eigenvalue by
    // O(sqrt(eps)); re-centre both members on the nearby root of Q'.
    const double deriv_scale = derivative_coefficient_scale(poly);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            const double scale =
                std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
            if (std::abs(roots[i] - roots[j]) >=
                set.multiplicity_tolerance * scale)
                continue;
            const Cx centre = recentre_pair(poly, 0.5 * (roots[i] + roots[j]));
            if (std::abs(poly.derivative(centre)) <= 1e-9 * deriv_scale &&
                std::abs(centre - roots[i]) <
                    set.multiplicity_tolerance * scale) {
                roots[i] = centre;
                roots[j] = centre;
            }
        }
    }

    set.residual_tolerance = 1e-10 * poly.coefficient_scale();
    for (const auto& r : roots) {
        const double res = std::abs(poly.evaluate(r));
        if (res > set.residual_tolerance)
            throw std::runtime_error(
                "root residual " + std::to_string(res) + " exceeds bound " +
                std::to_string(set.residual_tolerance));
    }

    sort_decay_order(roots);
    set.roots = std::move(roots);
    return set;
}

std::array<Cx, 2> closed_form_roots(const PseudomodeSpec& spec) {
    if (spec.mode_count() != 1 || !spec.resonant())
        throw std::invalid_argument(
            "closed-form roots require a single resonant mode");
    const double gamma = spec.modes()[0].gamma;
    const double alpha = spec.modes()[0].alpha;
    const double omega0 = spec.omega0();
    const double disc = gamma * gamma - 16.0 * alpha * alpha;
    if (disc >= 0.0) {
        const double s = 0.25 * std::sqrt(disc);
        return {Cx{-0.25 * gamma + s, -omega0}, Cx{-0.25 * gamma - s, -omega0}};
    }
    const double s = 0.25 * std::sqrt(-disc);
    return {Cx{-0.25 * gamma, -omega0 - s}, Cx{-0.25 * gamma, -omega0 + s}};
}

LepReport detect_lep(const PolynomialCoefficients& poly, const RootSet& roots,
                     double tol) {
    LepReport report;
    report.tolerance = tol;
    const double deriv_scale = derivative_coefficient_scale(poly);
    report.derivative_residuals.reserve(roots.roots.size());
    for (const auto& r : roots.roots)
        report.derivative_residuals.push_back(std::abs(poly.derivative(r)));

    const double pair_radius = std::sqrt(tol);
    for (std::size_t i = 0; i < roots.roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.roots.size(); ++j) {
            const double scale = std::max(
                {1.0, std::abs(roots.roots[i]), std::abs(roots.roots[j])});
            if (std::abs(roots.roots[i] - roots.roots[j]) >=
                pair_radius * scale)
                continue;
            report.coalescing_pairs.emplace_back(static_cast<int>(i),
                                                 static_cast<int>(j));
            if (report.derivative_residuals[i] < tol * deriv_scale ||
                report.derivative_residuals[j] < tol * deriv_scale)
                report.is_lep = true;
        }
    }
    return report;
}

Cx liouvillian_eigenvalue(const RootSet& roots, const std::vector<int>& index) {
    if (index.size() != 2 * roots.roots.size())
        throw std::invalid_argument(
            "combination index must hold one (m, n) pair per root");
    Cx lambda{0.0, 0.0};
    for (std::size_t j = 0; j < roots.roots.size(); ++j) {
        const int m = index[2 * j];
        const int n = index[2 * j + 1];
        if (m < 0 || n < 0)
            throw std::invalid_argument("combination indices must be >= 0");
        const Cx r = roots.roots[j];
        lambda += Cx{r.real() * (m + n), r.imag() * (m - n)};
    }
    return lambda;
}

double spectral_gap(const RootSet& roots) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& r : roots.roots)
        if (r.real() < 0.0) gap = std::min(gap, -r.real());
    if (!std::isfinite(gap))
        throw std::domain_error("no decaying root: spectral gap undefined");
    return gap;
}

PseudomodeSpec with_parameter(const PseudomodeSpec& base, ScanVariable variable,
                              std::size_t mode_index, double value) {
    if (mode_index >= base.mode_count())
        throw std::invalid_argument("mode index out of range");
    std::vector<PseudomodeMode> modes = base.modes();
    if (variable == ScanVariable::Gamma)
        modes[mode_index].gamma = value;
    else
        modes[mode_index].alpha = value;
    return PseudomodeSpec(base.omega0(), std::move(modes));
}

namespace {

double min_pairwise_root_gap(const RootSet& set) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.roots.size(); ++i)
        for (std::size_t j = i + 1; j < set.roots.size(); ++j)
            gap = std::min(gap, std::abs(set.roots[i] - set.roots[j]));
    return gap;
}

}  // namespace

LepLocation locate_lep(const PseudomodeSpec& base, ScanVariable variable,
                       std::size_t mode_index, double lo, double hi,
                       double tol) {
    if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("need tol > 0");
    if (mode_index >= base.mode_count())
        throw std::invalid_argument("mode index out of range");

    const auto evaluate = [&](double p) {
        const PseudomodeSpec spec = with_parameter(base, variable, mode_index, p);
        return polynomial_roots(characteristic_polynomial(spec));
    };

    LepLocation loc;

    if (base.mode_count() == 1 && base.resonant()) {
        // Single resonant mode: the pair coalesces where the (real)
        // discriminant gamma^2 - 16 alpha^2 vanishes; bisect on its sign.
        const auto disc = [&](double p) {
            const double gamma =
                variable == ScanVariable::Gamma ? p : base.modes()[0].gamma;
            const double alpha =
                variable == ScanVariable::Alpha ? p : base.modes()[0].alpha;
            return gamma * gamma - 16.0 * alpha * alpha;
        };
        double a = lo, b = hi;
        double fa = disc(a), fb = disc(b);
        double hit = std::numeric_limits<double>::quiet_NaN();
        if (fa == 0.0) hit = a;
        if (fb == 0.0) hit = b;
        if (std::isnan(hit) && fa * fb < 0.0) {
            while (b - a > tol) {
                const double m = 0.5 * (a + b);
                const double fm = disc(m);
                if (fm == 0.0) {
                    hit = m;
                    break;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                    fb = fm;
                }
            }
            if (std::isnan(hit)) hit = 0.5 * (a + b);
        }
        if (!std::isnan(hit)) {
            loc.found = true;
            loc.value = hit;
        } else {
            // No sign change: report the endpoint closer to coalescence.
            loc.found = false;
            loc.value = std::abs(fa) <= std::abs(fb) ? lo : hi;
        }
    } else {
        // General family: golden-section minimisation of the smallest
        // pairwise root gap (V-shaped and locally unimodal around a
        // two-fold point).
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = min_pairwise_root_gap(evaluate(x1));
        double f2 = min_pairwise_root_gap(evaluate(x2));
        while (b - a > tol) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = min_pairwise_root_gap(evaluate(x1));
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = min_pairwise_root_gap(evaluate(x2));
            }
        }
        loc.value = 0.5 * (a + b);
        const RootSet probe = evaluate(loc.value);
        double scale = 1.0;
        for (const auto& r : probe.roots) scale = std::max(scale, std::abs(r));
        loc.found = min_pairwise_root_gap(probe) < 1e-3 * scale;
    }

    const PseudomodeSpec at =
        with_parameter(base, variable, mode_index, loc.value);
    const PolynomialCoefficients poly = characteristic_polynomial(at);
    const RootSet roots = polynomial_roots(poly);
    loc.min_root_gap = min_pairwise_root_gap(roots);
    loc.report = detect_lep(poly, roots);
    return loc;
}

}  // namespace qmpe
