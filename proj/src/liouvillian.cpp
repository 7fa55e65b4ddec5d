#include "qmpe/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace qmpe {

namespace {

using Cx = std::complex<double>;

std::vector<int> factor_dims(const TruncationSpec& trunc) {
    std::vector<int> dims;
    dims.reserve(trunc.mode_count() + 1);
    dims.push_back(trunc.n_sys());
    dims.insert(dims.end(), trunc.n_modes().begin(), trunc.n_modes().end());
    return dims;
}

SparseCxd sparse_identity(std::size_t n) {
    SparseCxd id(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    id.setIdentity();
    return id;
}

}  // namespace

TruncationSpec::TruncationSpec(int n_sys, std::vector<int> n_modes,
                               std::size_t max_dimension)
    : n_sys_(n_sys), n_modes_(std::move(n_modes)), max_dimension_(max_dimension) {
    if (n_sys_ < 2) throw std::invalid_argument("system cutoff must be >= 2");
    std::size_t dim = static_cast<std::size_t>(n_sys_);
    for (int m : n_modes_) {
        if (m < 2) throw std::invalid_argument("mode cutoffs must be >= 2");
        if (dim > max_dimension_ / static_cast<std::size_t>(m))
            throw std::invalid_argument("truncated dimension exceeds limit " +
                                        std::to_string(max_dimension_));
        dim *= static_cast<std::size_t>(m);
    }
    if (dim > max_dimension_)
        throw std::invalid_argument("truncated dimension exceeds limit " +
                                    std::to_string(max_dimension_));
    dimension_ = dim;
}

SparseCxd mode_annihilator(const TruncationSpec& trunc, std::size_t which) {
    const std::vector<int> dims = factor_dims(trunc);
    if (which >= dims.size())
        throw std::invalid_argument("factor index out of range");
    std::size_t stride = 1;
    for (std::size_t f = which + 1; f < dims.size(); ++f)
        stride *= static_cast<std::size_t>(dims[f]);
    const std::size_t dim = trunc.dimension();
    const std::size_t d = static_cast<std::size_t>(dims[which]);

    std::vector<Eigen::Triplet<Cx>> entries;
    entries.reserve(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        const std::size_t occ = (n / stride) % d;
        if (occ >= 1)
            entries.emplace_back(static_cast<Eigen::Index>(n - stride),
                                 static_cast<Eigen::Index>(n),
                                 Cx{std::sqrt(static_cast<double>(occ)), 0.0});
    }
    SparseCxd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

SparseCxd build_hamiltonian(const PseudomodeSpec& spec,
                            const TruncationSpec& trunc) {
    if (spec.mode_count() != trunc.mode_count())
        throw std::invalid_argument(
            "mode counts of model and truncation must agree");
    const SparseCxd a0 = mode_annihilator(trunc, 0);
    SparseCxd h = spec.omega0() * SparseCxd(a0.adjoint() * a0);
    for (std::size_t i = 0; i < spec.mode_count(); ++i) {
        const SparseCxd ai = mode_annihilator(trunc, i + 1);
        const auto& mode = spec.modes()[i];
        h += mode.omega * SparseCxd(ai.adjoint() * ai);
        h += mode.alpha * SparseCxd(a0 * ai.adjoint() + a0.adjoint() * ai);
    }
    h.prune(Cx{0.0, 0.0});
    return h;
}

LiouvillianOperator build_liouvillian(const PseudomodeSpec& spec,
                                      const TruncationSpec& trunc) {
    const SparseCxd h = build_hamiltonian(spec, trunc);
    const SparseCxd id = sparse_identity(trunc.dimension());
    const Cx mi{0.0, -1.0};

    SparseCxd l = mi * SparseCxd(kroneckerProduct(id, h)) -
                  mi * SparseCxd(kroneckerProduct(SparseCxd(h.transpose()), id));
    for (std::size_t i = 0; i < spec.mode_count(); ++i) {
        const SparseCxd ai = mode_annihilator(trunc, i + 1);
        const SparseCxd num = SparseCxd(ai.adjoint() * ai);
        const double gamma = spec.modes()[i].gamma;
        l += gamma * SparseCxd(kroneckerProduct(SparseCxd(ai.conjugate()), ai));
        l -= (0.5 * gamma) * SparseCxd(kroneckerProduct(id, num));
        l -= (0.5 * gamma) *
             SparseCxd(kroneckerProduct(SparseCxd(num.transpose()), id));
    }
    l.prune(Cx{0.0, 0.0});
    return LiouvillianOperator{std::move(l), spec, trunc};
}

SpectrumResult full_spectrum(const LiouvillianOperator& lv,
                             bool with_eigenmatrices, std::size_t dense_limit) {
    const std::size_t dim = lv.dim();
    if (dim > dense_limit)
        throw std::invalid_argument(
            "dense spectrum limited to dimension " + std::to_string(dense_limit) +
            "; got " + std::to_string(dim));

    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(lv.matrix);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense, with_eigenmatrices);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense eigenvalue iteration failed");

    const Eigen::Index n = dense.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto& ev = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ra = std::abs(ev[a].real()), rb = std::abs(ev[b].real());
        if (ra != rb) return ra < rb;
        if (ev[a].imag() != ev[b].imag()) return ev[a].imag() < ev[b].imag();
        return ev[a].real() < ev[b].real();
    });

    SpectrumResult result;
    result.eigenvalues.reserve(order.size());
    for (Eigen::Index idx : order) result.eigenvalues.push_back(ev[idx]);

    double scale = 1.0;
    for (const Cx& l : result.eigenvalues) scale = std::max(scale, std::abs(l));
    double gap = std::numeric_limits<double>::infinity();
    for (const Cx& l : result.eigenvalues)
        if (-l.real() > 1e-12 * scale) gap = std::min(gap, -l.real());
    result.gap = std::isfinite(gap) ? gap : 0.0;

    if (with_eigenmatrices) {
        Eigen::MatrixXcd v(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            v.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
        const Eigen::MatrixXcd w = v.partialPivLu().inverse();
        const Eigen::Index m = static_cast<Eigen::Index>(dim);
        result.right_matrices.reserve(static_cast<std::size_t>(n));
        result.left_matrices.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            result.right_matrices.emplace_back(
                Eigen::Map<const Eigen::MatrixXcd>(v.col(k).data(), m, m));
            const Eigen::VectorXcd lvec = w.row(k).adjoint();
            result.left_matrices.emplace_back(
                Eigen::Map<const Eigen::MatrixXcd>(lvec.data(), m, m));
        }
    }
    return result;
}

namespace {

Eigen::MatrixXcd finalize_steady_state(const Eigen::VectorXcd& kernel_vec,
                                       std::size_t dim) {
    const Eigen::Index m = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd rho =
        Eigen::Map<const Eigen::MatrixXcd>(kernel_vec.data(), m, m);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Cx tr = rho.trace();
    if (std::abs(tr) < 1e-12 * rho.norm())
        throw std::runtime_error("stationary solution is traceless");
    rho /= tr;
    return rho;
}

}  // namespace

Eigen::MatrixXcd steady_state(const LiouvillianOperator& lv) {
    const std::size_t dim = lv.dim();
    const Eigen::Index n = lv.matrix.rows();

    if (dim <= 32) {
        const Eigen::MatrixXcd dense = Eigen::MatrixXcd(lv.matrix);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeFullV);
        const auto& sing = svd.singularValues();
        const double cutoff = 1e-9 * sing[0];
        int kernel_dim = 0;
        for (Eigen::Index k = 0; k < sing.size(); ++k)
            if (sing[k] < cutoff) ++kernel_dim;
        if (kernel_dim == 0)
            throw std::runtime_error("no stationary solution found");
        if (kernel_dim > 1)
            throw std::runtime_error("stationary solution is degenerate");
        return finalize_steady_state(svd.matrixV().col(n - 1), dim);
    }

    // Shifted inverse iteration; a second, orthogonal iterate exposes a
    // degenerate kernel that a single vector would silently average over.
    const double norm = lv.matrix.norm();
    const Cx shift{1e-6 * norm, 0.0};
    SparseCxd shifted = lv.matrix;
    shifted -= shift * sparse_identity(dim * dim);
    shifted.makeCompressed();
    Eigen::SparseLU<SparseCxd> lu(shifted);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("factorisation of shifted generator failed");

    Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd v1 = Eigen::VectorXcd::Zero(n);
    // vec(I/M) and a graded diagonal: both have weight on every diagonal,
    // where any Lindblad kernel component must live.
    for (std::size_t k = 0; k < dim; ++k) {
        const Eigen::Index diag = static_cast<Eigen::Index>(k * dim + k);
        v0[diag] = Cx{1.0, 0.0};
        v1[diag] = Cx{static_cast<double>(k + 1), 0.0};
    }
    v0.normalize();
    v1 -= v0.dot(v1) * v0;
    v1.normalize();

    double res0 = std::numeric_limits<double>::infinity();
    double res1 = res0;
    for (int it = 0; it < 50; ++it) {
        v0 = lu.solve(v0);
        v1 = lu.solve(v1);
        v0.normalize();
        v1 -= v0.dot(v1) * v0;
        v1.normalize();
        res0 = (lv.matrix * v0).norm();
        res1 = (lv.matrix * v1).norm();
        if (res0 <= 1e-12 * norm) break;
    }
    if (res0 > 1e-10 * norm)
        throw std::runtime_error("inverse iteration failed to converge");
    if (res1 <= 1e-10 * norm)
        throw std::runtime_error("stationary solution is degenerate");
    return finalize_steady_state(v0, dim);
}

Eigen::MatrixXcd partial_trace_pseudomodes(const Eigen::MatrixXcd& rho_full,
                                           const TruncationSpec& trunc) {
    const std::size_t dim = trunc.dimension();
    if (rho_full.rows() != static_cast<Eigen::Index>(dim) ||
        rho_full.cols() != static_cast<Eigen::Index>(dim))
        throw std::invalid_argument("state dimension does not match truncation");
    const Eigen::Index ns = trunc.n_sys();
    const Eigen::Index env = static_cast<Eigen::Index>(dim) / ns;
    Eigen::MatrixXcd rho_s = Eigen::MatrixXcd::Zero(ns, ns);
    for (Eigen::Index i = 0; i < ns; ++i)
        for (Eigen::Index j = 0; j < ns; ++j)
            for (Eigen::Index p = 0; p < env; ++p)
                rho_s(i, j) += rho_full(i * env + p, j * env + p);
    return rho_s;
}

}  // namespace qmpe
