#pragma once

#include <qcorr/linalg.hpp>
#include <qcorr/measures.hpp>
#include <qcorr/states.hpp>

#include <cmath>
#include <vector>

namespace qcorr {

/// The diagonal 8x8 unitary used throughout the one-clean-qubit case study:
/// diag(a, a, b, 1, a, b, 1, 1) with a = -w^4, b = w^8, w = exp(-i 3 pi / 5).
inline ComplexMatrix designed_unitary() {
    const complexd w = std::exp(complexd(0.0, -3.0 * M_PI / 5.0));
    const complexd a = -std::pow(w, 4);
    const complexd b = std::pow(w, 8);
    ComplexMatrix u = ComplexMatrix::Zero(8, 8);
    const complexd diag[8] = {a, a, b, complexd(1.0), a, b, complexd(1.0), complexd(1.0)};
    for (int i = 0; i < 8; ++i) u(i, i) = diag[i];
    return u;
}

/// Output of the trace-estimation circuit on one clean qubit of purity mu and
/// a maximally mixed register: blocks [[I, mu U^dag], [mu U, I]] / (2 d).
inline DensityMatrix dqc1_output_state(const ComplexMatrix& u, double mu) {
    if (u.rows() != u.cols()) throw std::invalid_argument("dqc1_output_state: U must be square");
    if (!is_unitary(u)) throw std::invalid_argument("dqc1_output_state: U is not unitary");
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("dqc1_output_state: mu must be in [0,1]");
    const int d = static_cast<int>(u.rows());
    ComplexMatrix m = ComplexMatrix::Identity(2 * d, 2 * d);
    m.topRightCorner(d, d) = mu * u.adjoint();
    m.bottomLeftCorner(d, d) = mu * u;
    m /= 2.0 * d;
    return DensityMatrix(std::move(m), d);
}

/// Same state built gate by gate: Hadamard on the control, then controlled-U.
inline DensityMatrix dqc1_circuit_state(const ComplexMatrix& u, double mu) {
    if (u.rows() != u.cols()) throw std::invalid_argument("dqc1_circuit_state: U must be square");
    const int d = static_cast<int>(u.rows());
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);

    ComplexMatrix rho = ComplexMatrix::Zero(2 * d, 2 * d);
    rho.topLeftCorner(d, d) = (1.0 + mu) / 2.0 * ComplexMatrix::Identity(d, d) / d;
    rho.bottomRightCorner(d, d) = (1.0 - mu) / 2.0 * ComplexMatrix::Identity(d, d) / d;

    const ComplexMatrix hd = kron(h, ComplexMatrix::Identity(d, d));
    rho = hd * rho * hd.adjoint();

    ComplexMatrix cu = ComplexMatrix::Identity(2 * d, 2 * d);
    cu.bottomRightCorner(d, d) = u;
    rho = cu * rho * cu.adjoint();
    return DensityMatrix(std::move(rho), d);
}

/// Recovers Tr U from the control-qubit readout of the circuit output:
/// Tr U = d (<sigma_1> + i <sigma_2>) / mu.
inline complexd trace_estimate(const DensityMatrix& rho_out, double mu) {
    if (mu == 0.0)
        throw std::invalid_argument("trace_estimate: mu = 0 carries no trace information");
    const int d = rho_out.dim_b();
    const ComplexMatrix identity_b = ComplexMatrix::Identity(d, d);
    const double ex = trace_of_product(rho_out.matrix(), kron(pauli(1), identity_b)).real();
    const double ey = trace_of_product(rho_out.matrix(), kron(pauli(2), identity_b)).real();
    return static_cast<double>(d) * complexd(ex, ey) / mu;
}

/// Entropic discord of the circuit output for a diagonal-spectrum unitary,
/// as a closed function of the control purity mu.
inline double entropic_discord_dqc1(double mu) {
    if (mu < 0.0 || mu > 1.0)
        throw std::invalid_argument("entropic_discord_dqc1: mu must be in [0,1]");
    auto h2 = [](double p) {
        double h = 0.0;
        if (p > 0.0) h -= p * std::log2(p);
        if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
        return h;
    };
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    return 2.0 - h2((1.0 - mu) / 2.0) - std::log2(1.0 + s) -
           (1.0 - s) * std::log2(std::exp(1.0));
}

struct Dqc1Row {
    double mu = 0.0;
    double d_g = 0.0;
    double q = 0.0;
    double entropic = 0.0;
};

inline std::vector<Dqc1Row> dqc1_sweep(const ComplexMatrix& u, const std::vector<double>& mu_grid) {
    std::vector<Dqc1Row> rows;
    rows.reserve(mu_grid.size());
    for (double mu : mu_grid) {
        const DensityMatrix rho = dqc1_output_state(u, mu);
        const SMatrix sm = s_matrix(rho);
        const detail::MeasureValues mv = detail::measures_from_s(sm);
        Dqc1Row row;
        row.mu = mu;
        row.d_g = mv.d_g;
        row.q = mv.q;
        row.entropic = entropic_discord_dqc1(mu);
        rows.push_back(row);
    }
    return rows;
}

/// Least-squares coefficient of the model v = c mu^2 through the origin.
inline double fit_quadratic_coefficient(const std::vector<double>& mu,
                                        const std::vector<double>& values) {
    if (mu.size() != values.size() || mu.empty())
        throw std::invalid_argument("fit_quadratic_coefficient: mismatched or empty inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        num += values[i] * mu[i] * mu[i];
        den += mu[i] * mu[i] * mu[i] * mu[i];
    }
    if (den == 0.0) throw std::invalid_argument("fit_quadratic_coefficient: all mu are zero");
    return num / den;
}

}  // namespace qcorr
