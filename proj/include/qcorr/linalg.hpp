#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcorr {

using complexd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-9;

/// Ordered tensor-factor dimensions of a composite Hilbert space.
/// The first factor is the slowest-varying (leftmost) index.
struct SubsystemLayout {
    std::vector<int> dims;

    int total() const {
        int n = 1;
        for (int d : dims) n *= d;
        return n;
    }

    int factors() const { return static_cast<int>(dims.size()); }
};

namespace detail {

inline void check_layout(const ComplexMatrix& m, const SubsystemLayout& layout,
                         const char* where) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(where) + ": matrix is not square");
    if (m.rows() != layout.total())
        throw std::invalid_argument(std::string(where) + ": layout dimension " +
                                    std::to_string(layout.total()) + " does not match matrix size " +
                                    std::to_string(m.rows()));
    for (int d : layout.dims)
        if (d < 1) throw std::invalid_argument(std::string(where) + ": factor dimension < 1");
}

inline void unpack_index(int index, const std::vector<int>& dims, std::vector<int>& digits) {
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
}

inline int pack_index(const std::vector<int>& digits, const std::vector<int>& dims) {
    int index = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
    return index;
}

}  // namespace detail

/// Kronecker product, first argument slowest-varying.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kDefaultTol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = kDefaultTol) {
    if (m.rows() != m.cols()) return false;
    ComplexMatrix g = m.adjoint() * m;
    g -= ComplexMatrix::Identity(m.rows(), m.cols());
    return g.cwiseAbs().maxCoeff() <= tol;
}

/// Reorders tensor factors: output slot j holds input factor perm[j].
/// perm must be a permutation of {0, ..., layout.factors()-1}.
inline ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemLayout& layout,
                                        const std::vector<int>& perm) {
    detail::check_layout(m, layout, "permute_subsystems");
    const int n = layout.factors();
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permute_subsystems: permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p])
            throw std::invalid_argument("permute_subsystems: not a permutation");
        seen[p] = true;
    }

    const int total = layout.total();
    std::vector<int> out_dims(n);
    for (int j = 0; j < n; ++j) out_dims[j] = layout.dims[perm[j]];

    // index map: input index -> output index
    std::vector<int> map(total);
    std::vector<int> in_digits(n), out_digits(n);
    for (int idx = 0; idx < total; ++idx) {
        detail::unpack_index(idx, layout.dims, in_digits);
        for (int j = 0; j < n; ++j) out_digits[j] = in_digits[perm[j]];
        map[idx] = detail::pack_index(out_digits, out_dims);
    }

    ComplexMatrix out(total, total);
    for (int r = 0; r < total; ++r)
        for (int c = 0; c < total; ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

/// Traces out every factor not listed in keep; keep must be strictly increasing.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                                   const std::vector<int>& keep) {
    detail::check_layout(m, layout, "partial_trace");
    const int n = layout.factors();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n)
            throw std::invalid_argument("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
    }

    std::vector<int> traced;
    for (int f = 0; f < n; ++f)
        if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

    std::vector<int> keep_dims, traced_dims;
    for (int f : keep) keep_dims.push_back(layout.dims[f]);
    for (int f : traced) traced_dims.push_back(layout.dims[f]);
    const int dk = [&] { int v = 1; for (int d : keep_dims) v *= d; return v; }();
    const int dt = [&] { int v = 1; for (int d : traced_dims) v *= d; return v; }();

    std::vector<int> kd(keep_dims.size()), td(traced_dims.size()), full(n);
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (int rk = 0; rk < dk; ++rk) {
        for (int ck = 0; ck < dk; ++ck) {
            complexd acc = 0.0;
            for (int e = 0; e < dt; ++e) {
                detail::unpack_index(e, traced_dims, td);
                detail::unpack_index(rk, keep_dims, kd);
                for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = kd[i];
                for (std::size_t i = 0; i < traced.size(); ++i) full[traced[i]] = td[i];
                const int row = detail::pack_index(full, layout.dims);
                detail::unpack_index(ck, keep_dims, kd);
                for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = kd[i];
                const int col = detail::pack_index(full, layout.dims);
                acc += m(row, col);
            }
            out(rk, ck) = acc;
        }
    }
    return out;
}

/// Partial transpose on the first factor of a bipartite layout.
inline ComplexMatrix partial_transpose_a(const ComplexMatrix& m, const SubsystemLayout& layout) {
    detail::check_layout(m, layout, "partial_transpose_a");
    if (layout.factors() != 2)
        throw std::invalid_argument("partial_transpose_a: layout must have exactly two factors");
    const int da = layout.dims[0], db = layout.dims[1];
    ComplexMatrix out(m.rows(), m.cols());
    for (int a1 = 0; a1 < da; ++a1)
        for (int a2 = 0; a2 < da; ++a2)
            out.block(a2 * db, a1 * db, db, db) = m.block(a1 * db, a2 * db, db, db);
    return out;
}

/// Real eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd herm_eigenvalues(const ComplexMatrix& m, double tol = kDefaultTol) {
    if (!is_hermitian(m, tol))
        throw std::invalid_argument("herm_eigenvalues: matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("herm_eigenvalues: eigensolver failed");
    return solver.eigenvalues();
}

/// Tr[a b] without forming the product.
inline complexd trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw std::invalid_argument("trace_of_product: incompatible shapes");
    return a.cwiseProduct(b.transpose()).sum();
}

/// Tr[m^k] for integer k >= 1.
inline complexd trace_power(const ComplexMatrix& m, int k) {
    if (m.rows() != m.cols()) throw std::invalid_argument("trace_power: matrix is not square");
    if (k < 1) throw std::invalid_argument("trace_power: exponent must be >= 1");
    if (k == 1) return m.trace();
    ComplexMatrix acc = m;
    for (int i = 2; i < k; ++i) acc = acc * m;
    return trace_of_product(acc, m);
}

/// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

/// Squared Hilbert-Schmidt norm, sum |m_ij|^2.
inline double hs_norm_sq(const ComplexMatrix& m) { return m.squaredNorm(); }

}  // namespace qcorr
