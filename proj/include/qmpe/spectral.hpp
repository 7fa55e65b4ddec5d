#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmpe/bath.hpp"

namespace qmpe {

/// Single-excitation generator of the coupled system+modes amplitude vector:
/// an arrow-shaped (N+1)x(N+1) complex matrix with
///   M(0,0) = -i omega0,  M(j,j) = -i omega_j - gamma_j/2,
///   M(0,j) = M(j,0) = -i alpha_j          (j = 1..N).
/// Its eigenvalues are the slow coherence rates of the full relaxation
/// generator; every other generator eigenvalue is an integer combination
/// of them (see liouvillian_eigenvalue).
Eigen::MatrixXcd build_dynamical_matrix(const PseudomodeSpec& spec);

/// Monic polynomial with complex coefficients stored in ascending order:
/// c[0] + c[1] x + ... + c[d] x^d with c[d] == 1.
class PolynomialCoefficients {
public:
    explicit PolynomialCoefficients(std::vector<std::complex<double>> ascending);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<std::complex<double>>& coefficients() const { return coeffs_; }

    std::complex<double> evaluate(std::complex<double> x) const;
    std::complex<double> derivative(std::complex<double> x) const;
    std::complex<double> second_derivative(std::complex<double> x) const;

    /// Largest coefficient magnitude; the scale used by residual thresholds.
    double coefficient_scale() const;

private:
    std::vector<std::complex<double>> coeffs_;
};

/// Characteristic polynomial Q(x) = det(x I - M) of the single-excitation
/// generator, assembled in product form (degree N+1, exactly monic).
PolynomialCoefficients characteristic_polynomial(const PseudomodeSpec& spec);

struct RootSet {
    /// Sorted by ascending decay rate -Re, ties broken by ascending Im.
    std::vector<std::complex<double>> roots;
    /// |Q(root)| bound that was enforced when the set was produced.
    double residual_tolerance = 0.0;
    /// Distance scale below which two roots count as one multiple root.
    double multiplicity_tolerance = 1e-6;
};

/// Roots via companion-matrix eigenvalues with one guarded Newton polish per
/// root.  Pairs closer than multiplicity_tolerance * max(1, |root|) are
/// re-centred on the root of Q' between them (simple there for a 2-fold
/// point), so coalesced pairs carry full precision instead of the O(sqrt(eps))
/// error generic eigensolvers leave at defective eigenvalues.  Throws
/// std::runtime_error with a residual report when any |Q(root)| exceeds
/// 1e-10 * coefficient_scale().
RootSet polynomial_roots(const PolynomialCoefficients& poly);

/// Resonant single-mode closed form
///   -gamma/4 +- sqrt(gamma^2 - 16 alpha^2)/4 - i omega0,
/// square-root branch continuous in gamma (real radicand when overdamped,
/// +i sqrt(|.|) when underdamped).  Requires N == 1 and omega_1 == omega0.
/// Returned in RootSet order (ascending -Re, ties by ascending Im).
std::array<std::complex<double>, 2> closed_form_roots(const PseudomodeSpec& spec);

struct LepReport {
    bool is_lep = false;
    /// Index pairs (into RootSet::roots) within coalescence distance.
    std::vector<std::pair<int, int>> coalescing_pairs;
    /// |Q'(root_j)| for every root.
    std::vector<double> derivative_residuals;
    double tolerance = 1e-6;
};

/// Exceptional-point test on a computed root set: some pair of roots lies
/// within sqrt(tol) * max(1, |root|) of each other and at least one member
/// has derivative residual |Q'(root)| < tol * (derivative coefficient scale).
LepReport detect_lep(const PolynomialCoefficients& poly, const RootSet& roots,
                     double tol = 1e-6);

/// Relaxation-generator eigenvalue assembled from the root combination
/// index = (m_0, n_0, m_1, n_1, ..., m_N, n_N), all entries >= 0:
///   lambda = sum_j [ i Im(root_j) (m_j - n_j) + Re(root_j) (m_j + n_j) ].
/// The all-zero index gives the stationary eigenvalue 0; a single m_j = 1
/// reproduces root_j itself, a single n_j = 1 its conjugate.
std::complex<double> liouvillian_eigenvalue(const RootSet& roots,
                                            const std::vector<int>& index);

/// Slowest decay rate min_j(-Re root_j) over strictly decaying roots.
/// Throws std::domain_error when every root sits on the imaginary axis.
double spectral_gap(const RootSet& roots);

enum class ScanVariable { Gamma, Alpha };

/// Copy of `base` with gamma (or alpha) of mode `mode_index` replaced.
PseudomodeSpec with_parameter(const PseudomodeSpec& base, ScanVariable variable,
                              std::size_t mode_index, double value);

struct LepLocation {
    bool found = false;
    double value = 0.0;        ///< located parameter value
    double min_root_gap = 0.0; ///< smallest pairwise root distance at `value`
    LepReport report;          ///< detect_lep evaluated at `value`
};

/// Locate an exceptional point along the one-parameter family obtained by
/// sweeping gamma (or alpha) of one mode over [lo, hi].  The resonant
/// single-mode family uses bisection on the (real) discriminant sign; the
/// general case minimises the minimum pairwise root gap by golden section
/// and accepts when the optimum gap is inside coalescence distance.
/// `tol` is the absolute tolerance in the scanned parameter.
LepLocation locate_lep(const PseudomodeSpec& base, ScanVariable variable,
                       std::size_t mode_index, double lo, double hi,
                       double tol = 1e-9);

}  // namespace qmpe
