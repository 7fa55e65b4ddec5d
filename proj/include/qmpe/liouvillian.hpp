#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qmpe/bath.hpp"

namespace qmpe {

using SparseCxd = Eigen::SparseMatrix<std::complex<double>>;

/// Fock-space truncation: n_sys levels for the system mode, n_modes[i] levels
/// per auxiliary mode.  Total dimension M = n_sys * prod(n_modes); bounded by
/// max_dimension so dense spectral work stays tractable.  Every cutoff >= 2.
class TruncationSpec {
public:
    TruncationSpec(int n_sys, std::vector<int> n_modes,
                   std::size_t max_dimension = 4096);

    int n_sys() const { return n_sys_; }
    const std::vector<int>& n_modes() const { return n_modes_; }
    std::size_t mode_count() const { return n_modes_.size(); }
    std::size_t dimension() const { return dimension_; }
    std::size_t max_dimension() const { return max_dimension_; }

private:
    int n_sys_;
    std::vector<int> n_modes_;
    std::size_t max_dimension_;
    std::size_t dimension_;
};

/// Annihilation operator of factor `which` (0 = system, i >= 1 the i-th
/// auxiliary mode) on the truncated product space; system index slowest.
SparseCxd mode_annihilator(const TruncationSpec& trunc, std::size_t which);

/// Coupled excitation-conserving Hamiltonian
///   H = omega0 a0^+ a0 + sum_i omega_i ai^+ ai
///     + sum_i alpha_i (a0 ai^+ + a0^+ ai).
/// Hermitian by construction; mode count of `spec` and `trunc` must agree.
SparseCxd build_hamiltonian(const PseudomodeSpec& spec, const TruncationSpec& trunc);

/// Vectorised relaxation generator, column-stacking convention
/// (vec(A X B) = (B^T (x) A) vec X):
///   L = -i (I (x) H  -  H^T (x) I)
///     + sum_i gamma_i [ conj(A_i) (x) A_i
///                       - 1/2 I (x) (A_i^+ A_i)  - 1/2 (A_i^+ A_i)^T (x) I ]
/// with A_i the annihilator of auxiliary mode i.
struct LiouvillianOperator {
    SparseCxd matrix;  ///< M^2 x M^2
    PseudomodeSpec spec;
    TruncationSpec trunc;

    std::size_t dim() const { return trunc.dimension(); }
};

LiouvillianOperator build_liouvillian(const PseudomodeSpec& spec,
                                      const TruncationSpec& trunc);

struct SpectrumResult {
    /// Ascending |Re|, the stationary eigenvalue (0) first; ties by Im.
    std::vector<std::complex<double>> eigenvalues;
    /// Right/left eigenmatrices (filled when requested), reshaped M x M and
    /// biorthonormalised: tr(l_i^+ r_j) = delta_ij.
    std::vector<Eigen::MatrixXcd> right_matrices;
    std::vector<Eigen::MatrixXcd> left_matrices;
    /// Smallest nonzero decay rate min(-Re lambda) over decaying eigenvalues.
    double gap = 0.0;
};

/// Dense spectral decomposition of the generator.  Refuses M > dense_limit
/// (use the closed-form spectral route for larger spaces).  Near-degenerate
/// eigenvalues are reported as computed; no Jordan-chain extraction.
SpectrumResult full_spectrum(const LiouvillianOperator& lv,
                             bool with_eigenmatrices = false,
                             std::size_t dense_limit = 64);

/// Stationary state (kernel of L) as a trace-one Hermitian density matrix.
/// Small M uses dense null-space extraction (SVD); larger M uses shifted
/// inverse iteration on the sparse operator with a two-vector subspace so a
/// degenerate kernel is detected.  Throws std::runtime_error when the kernel
/// is degenerate or the iteration fails to converge.
Eigen::MatrixXcd steady_state(const LiouvillianOperator& lv);

/// Trace out every auxiliary mode, keeping the system factor:
/// rho_s(i, j) = sum_p rho_full(i*P + p, j*P + p).
Eigen::MatrixXcd partial_trace_pseudomodes(const Eigen::MatrixXcd& rho_full,
                                           const TruncationSpec& trunc);

}  // namespace qmpe
