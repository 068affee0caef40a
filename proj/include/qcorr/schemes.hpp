#pragma once

#include <qcorr/bases.hpp>
#include <qcorr/linalg.hpp>
#include <qcorr/measures.hpp>
#include <qcorr/states.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qcorr {

/// Cyclic left shift on k factors of dimension local_dim:
/// V |psi_1 psi_2 ... psi_k> = |psi_2 ... psi_k psi_1>, which satisfies
/// Tr[V (rho_1 (x) ... (x) rho_k)] = Tr[rho_1 rho_2 ... rho_k].
inline ComplexMatrix shift_operator(int copies, int local_dim) {
    if (copies < 2 || copies > 4)
        throw std::invalid_argument("shift_operator: copies must be 2, 3 or 4");
    if (local_dim < 1) throw std::invalid_argument("shift_operator: local_dim must be >= 1");
    int total = 1;
    for (int i = 0; i < copies; ++i) total *= local_dim;
    ComplexMatrix v = ComplexMatrix::Zero(total, total);
    std::vector<int> dims(copies, local_dim), in(copies), out(copies);
    for (int idx = 0; idx < total; ++idx) {
        detail::unpack_index(idx, dims, in);
        for (int j = 0; j < copies; ++j) out[j] = in[(j + 1) % copies];
        v(detail::pack_index(out, dims), idx) = 1.0;
    }
    return v;
}

/// Two-party swap written in the operator basis:
/// V = I(x)I / d + (1/N) sum_i tau_i (x) tau_i with Tr[tau_i tau_j] = N delta_ij.
inline ComplexMatrix swap_from_basis(const OperatorBasis& basis) {
    const int d = basis.d;
    ComplexMatrix v = ComplexMatrix::Identity(d * d, d * d) / static_cast<double>(d);
    for (const ComplexMatrix& op : basis.ops) v += kron(op, op) / basis.normalization;
    return v;
}

/// Projector onto the antisymmetric subspace of C^d (x) C^d:
/// P = (1/2d) [ (d-1) I(x)I - (d/2) sum_i tau_i (x) tau_i ], equal to (I - V)/2.
inline ComplexMatrix antisym_projector(int d) {
    const OperatorBasis basis = gell_mann_basis(d);
    ComplexMatrix p = (d - 1.0) * ComplexMatrix::Identity(d * d, d * d);
    for (const ComplexMatrix& op : basis.ops) p -= (d / 2.0) * kron(op, op);
    return p / (2.0 * d);
}

/// A Hermitian observable on `copies` copies of the qubit-qudit pair, with the
/// copies laid out as A1 B1 A2 B2 ... (dims 2, d, 2, d, ...).
struct MulticopyOperator {
    std::string label;
    ComplexMatrix op;
    int copies = 1;
};

namespace detail {

/// Places two-factor operators on disjoint factor pairs of a tensor product
/// and fills the rest with identities.
inline ComplexMatrix embed_pairs(const std::vector<int>& dims_full,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 const std::vector<ComplexMatrix>& pair_ops) {
    const int n = static_cast<int>(dims_full.size());
    std::vector<bool> used(n, false);
    std::vector<int> order;
    order.reserve(n);
    for (const auto& [i, j] : pairs) {
        if (i < 0 || i >= n || j < 0 || j >= n || used[i] || used[j] || i == j)
            throw std::invalid_argument("embed_pairs: pair indices invalid or repeated");
        used[i] = used[j] = true;
        order.push_back(i);
        order.push_back(j);
    }
    for (int f = 0; f < n; ++f)
        if (!used[f]) order.push_back(f);

    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const int di = dims_full[pairs[p].first], dj = dims_full[pairs[p].second];
        if (pair_ops[p].rows() != di * dj || pair_ops[p].cols() != di * dj)
            throw std::invalid_argument("embed_pairs: operator size does not match its pair");
        m = kron(m, pair_ops[p]);
    }
    for (std::size_t p = 2 * pairs.size(); p < order.size(); ++p) {
        const int df = dims_full[order[p]];
        m = kron(m, ComplexMatrix::Identity(df, df));
    }

    SubsystemLayout layout_in;
    layout_in.dims.resize(n);
    std::vector<int> perm(n);
    for (int p = 0; p < n; ++p) {
        layout_in.dims[p] = dims_full[order[p]];
        perm[order[p]] = p;
    }
    return permute_subsystems(m, layout_in, perm);
}

inline std::vector<int> pair_layout_dims(int copies, int bob_dim) {
    std::vector<int> dims;
    dims.reserve(2 * copies);
    for (int c = 0; c < copies; ++c) {
        dims.push_back(2);
        dims.push_back(bob_dim);
    }
    return dims;
}

// Factor index of the m-th copy of each side in the A1 B1 A2 B2 ... layout.
inline int factor_a(int m) { return 2 * (m - 1); }
inline int factor_b(int m) { return 2 * (m - 1) + 1; }

}  // namespace detail

/// The eleven multicopy observables that determine Tr S and Tr S^2: the
/// projective family c1..c7 and the swap family d1..d4.
inline std::vector<MulticopyOperator> optical_operator_set(int bob_dim) {
    if (bob_dim < 2) throw std::invalid_argument("optical_operator_set: bob_dim must be >= 2");
    using detail::factor_a;
    using detail::factor_b;
    const ComplexMatrix pa = antisym_projector(2);
    const ComplexMatrix pb = antisym_projector(bob_dim);
    const ComplexMatrix va = shift_operator(2, 2);
    const ComplexMatrix vb = shift_operator(2, bob_dim);

    struct Spec {
        const char* label;
        int copies;
        std::vector<std::pair<int, int>> a_pairs;
        std::vector<std::pair<int, int>> b_pairs;
        bool projective;
    };
    const std::vector<Spec> specs = {
        {"c1", 2, {{factor_a(1), factor_a(2)}}, {{factor_b(1), factor_b(2)}}, true},
        {"c2", 2, {{factor_a(1), factor_a(2)}}, {}, true},
        {"c3", 2, {}, {{factor_b(1), factor_b(2)}}, true},
        {"c4", 4, {{factor_a(1), factor_a(4)}, {factor_a(2), factor_a(3)}},
         {{factor_b(1), factor_b(2)}, {factor_b(3), factor_b(4)}}, true},
        {"c5", 4, {{factor_a(1), factor_a(4)}},
         {{factor_b(1), factor_b(2)}, {factor_b(3), factor_b(4)}}, true},
        {"c6", 4, {{factor_a(1), factor_a(4)}, {factor_a(2), factor_a(3)}},
         {{factor_b(1), factor_b(2)}}, true},
        {"c7", 4, {{factor_a(2), factor_a(3)}}, {{factor_b(1), factor_b(2)}}, true},
        {"d1", 2, {{factor_a(1), factor_a(2)}}, {{factor_b(1), factor_b(2)}}, false},
        {"d2", 2, {}, {{factor_b(1), factor_b(2)}}, false},
        {"d3", 4, {{factor_a(2), factor_a(3)}},
         {{factor_b(1), factor_b(2)}, {factor_b(3), factor_b(4)}}, false},
        {"d4", 4, {{factor_a(1), factor_a(4)}, {factor_a(2), factor_a(3)}},
         {{factor_b(1), factor_b(2)}, {factor_b(3), factor_b(4)}}, false},
    };

    std::vector<MulticopyOperator> out;
    out.reserve(specs.size());
    for (const Spec& sp : specs) {
        std::vector<std::pair<int, int>> pairs = sp.a_pairs;
        std::vector<ComplexMatrix> ops(sp.a_pairs.size(), sp.projective ? pa : va);
        pairs.insert(pairs.end(), sp.b_pairs.begin(), sp.b_pairs.end());
        ops.insert(ops.end(), sp.b_pairs.size(), sp.projective ? pb : vb);
        MulticopyOperator mo;
        mo.label = sp.label;
        mo.copies = sp.copies;
        mo.op = detail::embed_pairs(detail::pair_layout_dims(sp.copies, bob_dim), pairs, ops);
        out.push_back(std::move(mo));
    }
    return out;
}

/// Expectation values of the optical observable set on rho^(x)copies.
inline std::map<std::string, double> optical_observables(const DensityMatrix& rho) {
    std::map<std::string, double> values;
    ComplexMatrix rho2 = kron(rho.matrix(), rho.matrix());
    ComplexMatrix rho4 = kron(rho2, rho2);
    for (const MulticopyOperator& mo : optical_operator_set(rho.dim_b())) {
        const ComplexMatrix& sigma = mo.copies == 2 ? rho2 : rho4;
        values[mo.label] = trace_of_product(mo.op, sigma).real();
    }
    return values;
}

/// (Tr S, Tr S^2) recovered from the projective observable family.
inline std::pair<double, double> trs_from_projective(const std::map<std::string, double>& v) {
    const double c1 = v.at("c1"), c2 = v.at("c2"), c3 = v.at("c3"), c4 = v.at("c4"),
                 c5 = v.at("c5"), c6 = v.at("c6"), c7 = v.at("c7");
    const double tr_s = 4.0 * c1 - 2.0 * c2 - c3 + 0.5;
    const double tr_s2 = 16.0 * c4 + 8.0 * (c7 - c5 - 2.0 * c6) + c3 * c3 + 4.0 * c2 * c2 - c3 -
                         2.0 * c2 + 0.25;
    return {tr_s, tr_s2};
}

/// (Tr S, Tr S^2) recovered from the swap observable family.
inline std::pair<double, double> trs_from_swap(const std::map<std::string, double>& v) {
    const double d1 = v.at("d1"), d2 = v.at("d2"), d3 = v.at("d3"), d4 = v.at("d4");
    return {d1 - 0.5 * d2, d4 - d3 + 0.25 * d2 * d2};
}

/// Readout of a controlled-O interferometer on the state sigma: control in
/// |+>, controlled-O, Hadamard, <sigma_3>. Simulated blockwise; the result
/// equals Re Tr[O sigma].
inline double interferometer_expectation(const ComplexMatrix& op, const ComplexMatrix& sigma) {
    if (op.rows() != op.cols() || op.rows() != sigma.rows() || sigma.rows() != sigma.cols())
        throw std::invalid_argument("interferometer_expectation: dimension mismatch");
    // After the first Hadamard every control block equals sigma / 2.
    const ComplexMatrix b01 = (sigma / 2.0) * op.adjoint();
    const ComplexMatrix b10 = op * (sigma / 2.0);
    // Final Hadamard then sigma_3: <sigma_3> = Tr[b01 + b10].
    return (b01.trace() + b10.trace()).real();
}

struct PlanEntry {
    std::string label;
    ComplexMatrix op;
    int copies = 1;
};

/// A non-tomographic measurement plan: the observables to record, and the
/// count full state tomography would need for the same system.
struct ObservablePlan {
    std::string setting;
    int d = 2;
    std::vector<PlanEntry> entries;
    int tomography_count = 0;
};

namespace detail {

inline OperatorBasis bob_basis(int d) {
    int n = 0, m = d;
    while (m > 1 && m % 2 == 0) {
        m /= 2;
        ++n;
    }
    if (m == 1 && n >= 1) return pauli_product_basis(n);
    return gell_mann_basis(d);
}

}  // namespace detail

/// Single-copy plan for spin ensembles: the 3 d^2 products sigma_nu (x) tau_lam
/// (nu = 1..3, lam = 0 meaning the identity) that determine x and t.
inline ObservablePlan nmr_plan(int d) {
    if (d < 2) throw std::invalid_argument("nmr_plan: d must be >= 2");
    const OperatorBasis basis = detail::bob_basis(d);
    ObservablePlan plan;
    plan.setting = "nmr";
    plan.d = d;
    plan.tomography_count = 4 * d * d - 1;
    plan.entries.reserve(3 * d * d);
    const ComplexMatrix identity_b = ComplexMatrix::Identity(d, d);
    for (int nu = 1; nu <= 3; ++nu) {
        for (int lam = 0; lam < d * d; ++lam) {
            PlanEntry e;
            e.label = "s" + std::to_string(nu) + "_b" + std::to_string(lam);
            e.copies = 1;
            e.op = kron(pauli(nu), lam == 0 ? identity_b : basis.ops[lam - 1]);
            plan.entries.push_back(std::move(e));
        }
    }
    return plan;
}

inline ObservablePlan optical_plan(int d, bool projective) {
    ObservablePlan plan;
    plan.setting = projective ? "optical-projective" : "optical-swap";
    plan.d = d;
    plan.tomography_count = 4 * d * d - 1;
    for (MulticopyOperator& mo : optical_operator_set(d)) {
        const bool is_projective = mo.label[0] == 'c';
        if (is_projective != projective) continue;
        plan.entries.push_back(PlanEntry{std::move(mo.label), std::move(mo.op), mo.copies});
    }
    return plan;
}

struct NmrReconstruction {
    Eigen::Vector3d x;
    Eigen::MatrixXd t;
    double d_g = 0.0;
    double q = 0.0;
};

/// Rebuilds x, t and the discord pair from the recorded plan expectations.
inline NmrReconstruction reconstruct_from_nmr(int d,
                                              const std::map<std::string, double>& values) {
    const OperatorBasis basis = detail::bob_basis(d);
    const double scale = d / basis.normalization;
    auto expectation = [&values](const std::string& label) {
        const auto it = values.find(label);
        if (it == values.end())
            throw std::invalid_argument("reconstruct_from_nmr: missing expectation '" + label +
                                        "'");
        return it->second;
    };
    NmrReconstruction rec;
    rec.t.resize(3, d * d - 1);
    for (int nu = 1; nu <= 3; ++nu) {
        const std::string prefix = "s" + std::to_string(nu) + "_b";
        rec.x(nu - 1) = expectation(prefix + "0");
        for (int lam = 1; lam < d * d; ++lam)
            rec.t(nu - 1, lam - 1) = scale * expectation(prefix + std::to_string(lam));
    }
    BlochFano bf;
    bf.x = rec.x;
    bf.y = Eigen::VectorXd::Zero(d * d - 1);  // y does not enter S
    bf.t = rec.t;
    bf.d = d;
    bf.basis_norm = basis.normalization;
    const detail::MeasureValues mv = detail::measures_from_s(s_matrix(bf));
    rec.d_g = mv.d_g;
    rec.q = mv.q;
    return rec;
}

/// Single-qubit rotation R with R sigma_nu R^dag = sigma_3.
inline ComplexMatrix rotation_to_z(int nu) {
    ComplexMatrix r(2, 2);
    switch (nu) {
        case 1:
            r << 1, 1, 1, -1;
            return r / std::sqrt(2.0);
        case 2: {
            const double c = std::cos(M_PI / 4.0);
            const complexd is(0.0, std::sin(M_PI / 4.0));
            r << c, -is, -is, c;
            return r;
        }
        case 3:
            return ComplexMatrix::Identity(2, 2);
        default:
            throw std::invalid_argument("rotation_to_z: nu must be 1, 2 or 3");
    }
}

inline ComplexMatrix cnot_alice() {
    ComplexMatrix c = ComplexMatrix::Zero(4, 4);
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
    return c;
}

/// Two-qubit readout localization: rotating both spins so the measured Pauli
/// pair becomes sigma_3 (x) sigma_3 and applying one CNOT moves the product
/// expectation onto Bob's sigma_3 alone. Returns (direct, localized).
inline std::pair<double, double> nmr_localization_check(const DensityMatrix& rho, int nu,
                                                        int lam) {
    if (rho.dim_b() != 2)
        throw std::invalid_argument("nmr_localization_check: needs a two-qubit state");
    const double direct =
        trace_of_product(rho.matrix(), kron(pauli(nu), pauli(lam))).real();
    const ComplexMatrix r = kron(rotation_to_z(nu), rotation_to_z(lam));
    const ComplexMatrix gate = cnot_alice() * r;
    const ComplexMatrix xi = gate * rho.matrix() * gate.adjoint();
    const double localized = trace_of_product(xi, kron(pauli(0), pauli(3))).real();
    return {direct, localized};
}

/// Polynomials in single-copy traces equal to the moments of X = x x^T and
/// T = t t^T for a two-qubit state.
struct MulticopyTraces {
    double tr_x = 0.0;
    double tr_t = 0.0;
    double tr_x2 = 0.0;
    double tr_xt = 0.0;
    double tr_t2 = 0.0;
};

inline MulticopyTraces multicopy_traces(const DensityMatrix& rho) {
    if (rho.dim_b() != 2)
        throw std::invalid_argument("multicopy_traces: needs a two-qubit state");
    const ComplexMatrix& m = rho.matrix();
    const ComplexMatrix ra = rho.marginal_a();
    const ComplexMatrix rb = rho.marginal_b();
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);

    const double p = trace_of_product(m, m).real();
    const double pa = trace_of_product(ra, ra).real();
    const double pb = trace_of_product(rb, rb).real();

    MulticopyTraces out;
    out.tr_x = 2.0 * pa - 1.0;
    out.tr_t = 4.0 * (p - pa / 2.0 - pb / 2.0) + 1.0;
    out.tr_x2 = out.tr_x * out.tr_x;

    const ComplexMatrix ra_id = kron(ra, id2);
    const double mixed_a = (m * ra_id * m * ra_id).trace().real();
    const double mixed_ab = (m * kron(ComplexMatrix(ra * ra), rb)).trace().real();
    out.tr_xt = -1.0 + 4.0 * p * (-1.0 + pa) + 4.0 * pa - 4.0 * pa * pa + 2.0 * pb +
                8.0 * mixed_a - 8.0 * mixed_ab;

    const ComplexMatrix zeta = m - 0.5 * ra_id - 0.5 * kron(id2, rb);
    const double z3 = (zeta * zeta * zeta).trace().real();
    const double z4 = (zeta * zeta * zeta * zeta).trace().real();
    out.tr_t2 = -32.0 * (z4 + z3) + 3.0 * (out.tr_t * out.tr_t / 2.0 - out.tr_t - 0.5);
    return out;
}

/// (Tr S, Tr S^2) as polynomials in single-copy and two-copy traces of rho and
/// its marginals, for a two-qubit state.
inline std::pair<double, double> multicopy_traces_s(const DensityMatrix& rho) {
    if (rho.dim_b() != 2)
        throw std::invalid_argument("multicopy_traces_s: needs a two-qubit state");
    const ComplexMatrix& m = rho.matrix();
    const ComplexMatrix ra = rho.marginal_a();
    const ComplexMatrix rb = rho.marginal_b();
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);

    const double p2 = trace_power(m, 2).real();
    const double p3 = trace_power(m, 3).real();
    const double p4 = trace_power(m, 4).real();
    const double pa = trace_of_product(ra, ra).real();
    const double pb = trace_of_product(rb, rb).real();

    const ComplexMatrix id_rb = kron(id2, rb);
    const ComplexMatrix ra_id = kron(ra, id2);
    const double mixed_b = (m * id_rb * m * id_rb).trace().real();
    const double mixed_a = (m * ra_id * m * ra_id).trace().real();
    const double cross = (m * kron(ra, rb)).trace().real();
    const double cross2 = (m * m * kron(ra, rb)).trace().real();

    const double tr_s = p2 - pb / 2.0;
    const double tr_s2 =
        0.25 * (-2.0 - 8.0 * p4 + 8.0 * p3 + 6.0 * p2 * p2 - 2.0 * p2 * (5.0 + pb) -
                2.0 * pa * pa + 10.0 * pa - pb * pb + 12.0 * pb - 6.0 * pa * pb +
                4.0 * mixed_b - 24.0 * cross + 8.0 * mixed_a + 8.0 * cross2);
    return {tr_s, tr_s2};
}

/// FNV-1a over the raw coefficient bytes, row-major, real then imaginary.
inline std::uint64_t operator_hash(const ComplexMatrix& m) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            mix(m(r, c).real());
            mix(m(r, c).imag());
        }
    return h;
}

}  // namespace qcorr
