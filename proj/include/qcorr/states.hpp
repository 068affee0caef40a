#pragma once

#include <qcorr/bases.hpp>
#include <qcorr/linalg.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qcorr {

/// Validated density matrix of a qubit-qudit (2 x d) system.
class DensityMatrix {
  public:
    DensityMatrix(ComplexMatrix m, int dim_b, double tol = kDefaultTol)
        : m_(std::move(m)), db_(dim_b) {
        if (db_ < 1) throw std::invalid_argument("density matrix: dim_b must be >= 1");
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("density matrix: matrix is not square");
        if (m_.rows() != 2 * db_)
            throw std::invalid_argument("density matrix: size " + std::to_string(m_.rows()) +
                                        " does not match 2 x " + std::to_string(db_));
        const double herm_dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_dev > tol)
            throw std::invalid_argument("density matrix: not Hermitian (deviation " +
                                        std::to_string(herm_dev) + ")");
        const double trace_dev = std::abs(m_.trace() - complexd(1.0, 0.0));
        if (trace_dev > tol)
            throw std::invalid_argument("density matrix: trace differs from 1 by " +
                                        std::to_string(trace_dev));
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        if (min_eig < -tol)
            throw std::invalid_argument("density matrix: negative eigenvalue " +
                                        std::to_string(min_eig));
    }

    const ComplexMatrix& matrix() const { return m_; }
    int dim_a() const { return 2; }
    int dim_b() const { return db_; }
    int dim() const { return 2 * db_; }
    SubsystemLayout layout() const { return SubsystemLayout{{2, db_}}; }

    ComplexMatrix marginal_a() const { return partial_trace(m_, layout(), {0}); }
    ComplexMatrix marginal_b() const { return partial_trace(m_, layout(), {1}); }

  private:
    ComplexMatrix m_;
    int db_;
};

/// Local Bloch vectors and correlation matrix of a 2 x d state, relative to a
/// Bob basis with Tr[tau_i tau_j] = basis_norm * delta_ij:
///   rho = (1/2d) (I + sum_i x_i s_i(x)I + sum_j y_j I(x)tau_j + sum_ij t_ij s_i(x)tau_j)
struct BlochFano {
    Eigen::Vector3d x;
    Eigen::VectorXd y;
    Eigen::MatrixXd t;
    int d = 2;
    double basis_norm = 2.0;
};

inline BlochFano bloch_fano_decompose(const DensityMatrix& rho, const OperatorBasis& basis) {
    const int d = rho.dim_b();
    if (basis.d != d)
        throw std::invalid_argument("bloch_fano_decompose: basis dimension mismatch");
    const int nb = basis.size();
    const double scale = d / basis.normalization;
    const ComplexMatrix identity_b = ComplexMatrix::Identity(d, d);

    BlochFano bf;
    bf.d = d;
    bf.basis_norm = basis.normalization;
    bf.y.resize(nb);
    bf.t.resize(3, nb);
    for (int i = 0; i < 3; ++i)
        bf.x(i) = trace_of_product(rho.matrix(), kron(pauli(i + 1), identity_b)).real();
    for (int j = 0; j < nb; ++j) {
        bf.y(j) = scale * trace_of_product(rho.matrix(), kron(pauli(0), basis.ops[j])).real();
        for (int i = 0; i < 3; ++i)
            bf.t(i, j) =
                scale * trace_of_product(rho.matrix(), kron(pauli(i + 1), basis.ops[j])).real();
    }
    return bf;
}

inline DensityMatrix bloch_fano_reconstruct(const BlochFano& bf, const OperatorBasis& basis) {
    if (basis.d != bf.d || basis.normalization != bf.basis_norm)
        throw std::invalid_argument("bloch_fano_reconstruct: basis does not match coefficients");
    const int d = bf.d;
    const ComplexMatrix identity_b = ComplexMatrix::Identity(d, d);
    ComplexMatrix m = ComplexMatrix::Identity(2 * d, 2 * d);
    for (int i = 0; i < 3; ++i) m += bf.x(i) * kron(pauli(i + 1), identity_b);
    for (int j = 0; j < basis.size(); ++j) {
        m += bf.y(j) * kron(pauli(0), basis.ops[j]);
        for (int i = 0; i < 3; ++i) m += bf.t(i, j) * kron(pauli(i + 1), basis.ops[j]);
    }
    m /= 2.0 * d;
    return DensityMatrix(std::move(m), d);
}

/// Werner state r * (Bell projector) + (1-r) * I/4 in the {00,01,10,11} basis.
inline DensityMatrix werner(double r) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("werner: r must be in [0,1]");
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = (1.0 - r) / 4.0;
    m(1, 1) = m(2, 2) = (1.0 + r) / 4.0;
    m(1, 2) = m(2, 1) = r / 2.0;
    return DensityMatrix(std::move(m), 2);
}

/// Two-qubit state (I + sum_i c_i s_i(x)s_i) / 4 with maximally mixed marginals.
/// The diagonal is assembled from exact complements of 1/2 so that the trace
/// is exactly 1 and both marginals are exactly I/2.
inline DensityMatrix bell_diagonal(double c1, double c2, double c3) {
    const double eigs[4] = {
        (1.0 + c1 - c2 + c3) / 4.0,
        (1.0 - c1 + c2 + c3) / 4.0,
        (1.0 + c1 + c2 - c3) / 4.0,
        (1.0 - c1 - c2 - c3) / 4.0,
    };
    for (double e : eigs)
        if (e < -kDefaultTol)
            throw std::invalid_argument("bell_diagonal: eigenvalue " + std::to_string(e) +
                                        " is negative; (c1,c2,c3) is outside the tetrahedron");
    const double hi = (1.0 + std::abs(c3)) / 4.0;
    const double lo = 0.5 - hi;  // exact: hi is in [1/4, 1/2]
    const double outer = c3 >= 0.0 ? hi : lo;
    const double inner = c3 >= 0.0 ? lo : hi;
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = outer;
    m(1, 1) = m(2, 2) = inner;
    m(0, 3) = m(3, 0) = (c1 - c2) / 4.0;
    m(1, 2) = m(2, 1) = (c1 + c2) / 4.0;
    return DensityMatrix(std::move(m), 2);
}

/// Pure 2 x d state with Schmidt coefficients (alpha, 1-alpha) on |00>, |11>.
inline DensityMatrix pure_from_schmidt(double alpha, int d) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("pure_from_schmidt: alpha must be in [0,1]");
    if (d < 2) throw std::invalid_argument("pure_from_schmidt: d must be >= 2");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * d);
    v(0) = std::sqrt(alpha);
    v(d + 1) = std::sqrt(1.0 - alpha);
    return DensityMatrix(v * v.adjoint(), d);
}

/// sum_i p_i |i><i| (x) bob_states[i] over the Alice basis {|0>, |1>}.
inline DensityMatrix classical_quantum(const std::vector<double>& p,
                                       const std::vector<ComplexMatrix>& bob_states,
                                       double tol = kDefaultTol) {
    if (p.size() != 2 || bob_states.size() != 2)
        throw std::invalid_argument("classical_quantum: need two probabilities and two Bob states");
    if (p[0] < -tol || p[1] < -tol)
        throw std::invalid_argument("classical_quantum: negative probability");
    if (std::abs(p[0] + p[1] - 1.0) > tol)
        throw std::invalid_argument("classical_quantum: probabilities do not sum to 1");
    const ComplexMatrix& bob0 = bob_states[0];
    const ComplexMatrix& bob1 = bob_states[1];
    if (bob0.rows() != bob1.rows() || bob0.rows() != bob0.cols() || bob1.rows() != bob1.cols())
        throw std::invalid_argument("classical_quantum: Bob blocks must be square and equal size");
    const int d = static_cast<int>(bob0.rows());
    ComplexMatrix m = ComplexMatrix::Zero(2 * d, 2 * d);
    m.topLeftCorner(d, d) = p[0] * bob0;
    m.bottomRightCorner(d, d) = p[1] * bob1;
    return DensityMatrix(std::move(m), d);
}

/// Stable per-index seed stream (splitmix64 finalizer), so that sample i of a
/// sweep is the same state no matter how the sweep is chunked across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. Gaussian via polar Box-Muller on top of
/// mt19937_64 so that seeded streams are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {

/// Normalized Wishart sample: G G^dag / Tr with G a dim x rank complex
/// Gaussian matrix.
inline ComplexMatrix random_ginibre_density(int dim, int rank, Rng& rng) {
    ComplexMatrix g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = complexd(rng.gaussian(), rng.gaussian());
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace();
    return w;
}

}  // namespace detail

/// Haar-random pure 2 x d state.
inline DensityMatrix random_pure(int d, Rng& rng) {
    if (d < 1) throw std::invalid_argument("random_pure: d must be >= 1");
    Eigen::VectorXcd v(2 * d);
    for (int i = 0; i < 2 * d; ++i) v(i) = complexd(rng.gaussian(), rng.gaussian());
    v /= v.norm();
    return DensityMatrix(v * v.adjoint(), d);
}

inline DensityMatrix random_pure(int d, std::uint64_t seed) {
    Rng rng(seed);
    return random_pure(d, rng);
}

/// Wishart-random mixed 2 x d state of the given rank.
inline DensityMatrix random_mixed(int d, int rank, Rng& rng) {
    if (d < 1) throw std::invalid_argument("random_mixed: d must be >= 1");
    if (rank < 1 || rank > 2 * d)
        throw std::invalid_argument("random_mixed: rank must be in [1, 2d]");
    return DensityMatrix(detail::random_ginibre_density(2 * d, rank, rng), d);
}

inline DensityMatrix random_mixed(int d, int rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_mixed(d, rank, rng);
}

/// Error in the textual state-file format (distinct from an invalid state).
struct StateParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_double(const std::string& token, int line_no, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw StateParseError("line " + std::to_string(line_no) + ": cannot parse " + what +
                              " from '" + token + "'");
    }
    if (used != token.size())
        throw StateParseError("line " + std::to_string(line_no) + ": trailing characters in '" +
                              token + "'");
    return v;
}

}  // namespace detail

/// Reads a state file: header "dims 2 d", then 2d rows of 2d "re,im" entries
/// separated by single spaces, row-major.
inline DensityMatrix read_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StateParseError("cannot open state file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw StateParseError("line 1: missing header");
    std::istringstream header(line);
    std::string tag;
    int two = 0, d = 0;
    if (!(header >> tag >> two >> d) || tag != "dims" || two != 2 || d < 1)
        throw StateParseError("line 1: expected header 'dims 2 <d>', got '" + line + "'");
    std::string extra;
    if (header >> extra) throw StateParseError("line 1: unexpected token '" + extra + "'");

    const int n = 2 * d;
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
        const int line_no = r + 2;
        if (!std::getline(in, line))
            throw StateParseError("line " + std::to_string(line_no) + ": missing matrix row");
        std::istringstream row(line);
        std::string token;
        int c = 0;
        while (row >> token) {
            if (c >= n)
                throw StateParseError("line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(n) + " entries, got more");
            const std::size_t comma = token.find(',');
            if (comma == std::string::npos || token.find(',', comma + 1) != std::string::npos)
                throw StateParseError("line " + std::to_string(line_no) +
                                      ": entry '" + token + "' is not 're,im'");
            const double re = detail::parse_double(token.substr(0, comma), line_no, "real part");
            const double im = detail::parse_double(token.substr(comma + 1), line_no, "imag part");
            m(r, c) = complexd(re, im);
            ++c;
        }
        if (c != n)
            throw StateParseError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(n) + " entries, got " + std::to_string(c));
    }
    return DensityMatrix(std::move(m), d);
}

inline void write_state_file(const std::string& path, const DensityMatrix& rho) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const int n = rho.dim();
    out << "dims 2 " << rho.dim_b() << "\n";
    char buf[64];
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const complexd v = rho.matrix()(r, c);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace qcorr
