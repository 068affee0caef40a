#pragma once

#include <qcorr/linalg.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace qcorr {

/// Hermitian traceless operator basis of a d-dimensional system.
/// Elements satisfy Tr[tau_i tau_j] = normalization * delta_ij.
struct OperatorBasis {
    int d = 0;
    double normalization = 2.0;
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> ops;

    int size() const { return static_cast<int>(ops.size()); }
};

/// Pauli matrix; index 0 is the identity, 1..3 are x, y, z.
inline const ComplexMatrix& pauli(int i) {
    static const std::array<ComplexMatrix, 4> mats = [] {
        std::array<ComplexMatrix, 4> m;
        for (auto& e : m) e = ComplexMatrix::Zero(2, 2);
        m[0](0, 0) = 1;  m[0](1, 1) = 1;
        m[1](0, 1) = 1;  m[1](1, 0) = 1;
        m[2](0, 1) = complexd(0, -1);  m[2](1, 0) = complexd(0, 1);
        m[3](0, 0) = 1;  m[3](1, 1) = -1;
        return m;
    }();
    if (i < 0 || i > 3) throw std::invalid_argument("pauli: index must be 0..3");
    return mats[i];
}

/// Generalized Gell-Mann basis: symmetric pairs, antisymmetric pairs, then
/// diagonal elements. Reduces to {x, y, z} Pauli matrices for d = 2.
inline OperatorBasis gell_mann_basis(int d) {
    if (d < 2) throw std::invalid_argument("gell_mann_basis: d must be >= 2");
    OperatorBasis basis;
    basis.d = d;
    basis.normalization = 2.0;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(d, d);
            m(j, k) = 1;
            m(k, j) = 1;
            basis.ops.push_back(m);
            basis.labels.push_back("s" + std::to_string(j) + std::to_string(k));
        }
    }
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(d, d);
            m(j, k) = complexd(0, -1);
            m(k, j) = complexd(0, 1);
            basis.ops.push_back(m);
            basis.labels.push_back("a" + std::to_string(j) + std::to_string(k));
        }
    }
    for (int l = 1; l < d; ++l) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int j = 0; j < l; ++j) m(j, j) = scale;
        m(l, l) = -scale * l;
        basis.ops.push_back(m);
        basis.labels.push_back("d" + std::to_string(l));
    }
    return basis;
}

/// Nonidentity n-qubit Pauli products, 4^n - 1 elements with
/// Tr[tau_i tau_j] = 2^n delta_ij. The first factor's letter varies fastest,
/// so the list opens with XI...I, YI...I, ZI...I and closes with Z...Z.
inline OperatorBasis pauli_product_basis(int n) {
    if (n < 1) throw std::invalid_argument("pauli_product_basis: n must be >= 1");
    const int count = (1 << (2 * n)) - 1;
    OperatorBasis basis;
    basis.d = 1 << n;
    basis.normalization = static_cast<double>(1 << n);
    static const char letters[] = "IXYZ";
    for (int v = 1; v <= count; ++v) {
        int rest = v;
        std::string label(n, 'I');
        ComplexMatrix m = ComplexMatrix::Identity(1, 1);
        for (int k = 0; k < n; ++k) {
            const int digit = rest % 4;
            rest /= 4;
            label[k] = letters[digit];
            m = kron(m, pauli(digit));
        }
        basis.ops.push_back(m);
        basis.labels.push_back(label);
    }
    return basis;
}

}  // namespace qcorr
