#pragma once

#include <qcorr/bases.hpp>
#include <qcorr/linalg.hpp>
#include <qcorr/states.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace qcorr {

/// The 3x3 matrix S = (x x^T + (N/d) t t^T) / (2d) whose top eigenvalue
/// determines the geometric discord, together with its first trace powers.
struct SMatrix {
    Eigen::Matrix3d s;
    double tr_s = 0.0;
    double tr_s2 = 0.0;
    double tr_s3 = 0.0;
};

inline SMatrix s_matrix(const BlochFano& bf) {
    const double scale = bf.basis_norm / bf.d;
    Eigen::Matrix3d s =
        (bf.x * bf.x.transpose() + scale * (bf.t * bf.t.transpose())) / (2.0 * bf.d);
    s = ((s + s.transpose()) / 2.0).eval();
    SMatrix out;
    out.s = s;
    out.tr_s = s.trace();
    out.tr_s2 = (s * s).trace();
    out.tr_s3 = (s * s * s).trace();
    return out;
}

inline SMatrix s_matrix(const DensityMatrix& rho) {
    return s_matrix(bloch_fano_decompose(rho, gell_mann_basis(rho.dim_b())));
}

/// Roots of the characteristic cubic of S, via the trigonometric formula.
/// k holds the eigenvalues in descending order.
struct CubicSolution {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    double q = 0.0, r = 0.0;
    double theta = 0.0;
    std::array<double, 3> k{};
};

inline CubicSolution cubic_eigenvalues(const SMatrix& sm) {
    CubicSolution sol;
    const double tr_s = sm.tr_s, tr_s2 = sm.tr_s * sm.tr_s, tr_sq = sm.tr_s2;
    sol.a0 = -tr_s;
    sol.a1 = 0.5 * (tr_s2 - tr_sq);
    sol.a2 = -(sol.a1 * tr_s + sol.a0 * tr_sq + sm.tr_s3) / 3.0;
    sol.q = (3.0 * sol.a1 - sol.a0 * sol.a0) / 9.0;
    sol.r = (9.0 * sol.a0 * sol.a1 - 27.0 * sol.a2 - 2.0 * sol.a0 * sol.a0 * sol.a0) / 54.0;

    const double disc = 6.0 * tr_sq - 2.0 * tr_s2;  // = -36 q
    if (disc < 1e-12) {
        sol.theta = 0.0;
        sol.k = {tr_s / 3.0, tr_s / 3.0, tr_s / 3.0};
        return sol;
    }
    const double mq = -sol.q;
    const double cosarg = std::clamp(sol.r / std::sqrt(mq * mq * mq), -1.0, 1.0);
    sol.theta = std::acos(cosarg);
    const double amp = 2.0 * std::sqrt(mq);
    for (int i = 0; i < 3; ++i)
        sol.k[i] = tr_s / 3.0 + amp * std::cos((sol.theta + 2.0 * M_PI * i) / 3.0);
    std::sort(sol.k.begin(), sol.k.end(), std::greater<double>());
    return sol;
}

namespace detail {

struct MeasureValues {
    double d_g = 0.0;
    double q = 0.0;
    double theta = 0.0;
};

/// D_G and its observable lower bound Q from the trace powers of S. Both
/// reduce to (4/3) Tr S when the shifted cubic degenerates.
inline MeasureValues measures_from_traces(double tr_s, double tr_s2, double tr_s3) {
    MeasureValues out;
    const double disc = 6.0 * tr_s2 - 2.0 * tr_s * tr_s;
    if (disc < 1e-12) {
        out.d_g = out.q = (4.0 / 3.0) * tr_s;
        out.theta = 0.0;
        return out;
    }
    SMatrix sm;
    sm.tr_s = tr_s;
    sm.tr_s2 = tr_s2;
    sm.tr_s3 = tr_s3;
    const CubicSolution sol = cubic_eigenvalues(sm);
    out.theta = sol.theta;
    const double root = std::sqrt(disc);
    out.d_g = (2.0 / 3.0) * (2.0 * tr_s - root * std::cos(sol.theta / 3.0));
    out.q = (2.0 / 3.0) * (2.0 * tr_s - root);
    return out;
}

inline MeasureValues measures_from_s(const SMatrix& sm) {
    return measures_from_traces(sm.tr_s, sm.tr_s2, sm.tr_s3);
}

}  // namespace detail

inline double geometric_discord_closed(const DensityMatrix& rho) {
    return detail::measures_from_s(s_matrix(rho)).d_g;
}

/// Lower bound on the geometric discord that drops the cos(theta/3) factor;
/// a polynomial in Tr S and Tr S^2 only, hence directly observable.
inline double q_measure(const DensityMatrix& rho) {
    return detail::measures_from_s(s_matrix(rho)).q;
}

/// Trace norm of the partial transpose minus one (so Bell states give 1),
/// computed as twice the total weight of negative eigenvalues.
inline double negativity(const DensityMatrix& rho) {
    const Eigen::VectorXd eigs = herm_eigenvalues(partial_transpose_a(rho.matrix(), rho.layout()));
    double neg = 0.0;
    for (int i = 0; i < eigs.size(); ++i)
        if (eigs(i) < 0.0) neg -= 2.0 * eigs(i);
    return neg;
}

struct CorrelationReport {
    double d_g = 0.0;
    double q = 0.0;
    double theta = 0.0;
    double negativity = 0.0;
    double negativity_sq = 0.0;
    double tr_s = 0.0;
    double tr_s2 = 0.0;
};

inline CorrelationReport correlation_report(const DensityMatrix& rho) {
    const SMatrix sm = s_matrix(rho);
    const detail::MeasureValues mv = detail::measures_from_s(sm);
    CorrelationReport rep;
    rep.d_g = mv.d_g;
    rep.q = mv.q;
    rep.theta = mv.theta;
    rep.negativity = negativity(rho);
    rep.negativity_sq = rep.negativity * rep.negativity;
    rep.tr_s = sm.tr_s;
    rep.tr_s2 = sm.tr_s2;
    return rep;
}

namespace detail {

/// Hilbert-Schmidt distance (squared) between rho and its dephasing under the
/// projective measurement of n.sigma on the qubit, computed blockwise:
/// the measurement maps rho to (rho + A rho A)/2 with A = n.sigma (x) I.
inline double disturbance(const DensityMatrix& rho, double theta, double phi) {
    const int d = rho.dim_b();
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);

    const ComplexMatrix& m = rho.matrix();
    const ComplexMatrix b00 = m.topLeftCorner(d, d);
    const ComplexMatrix b01 = m.topRightCorner(d, d);
    const ComplexMatrix b10 = m.bottomLeftCorner(d, d);
    const ComplexMatrix b11 = m.bottomRightCorner(d, d);

    // A rho A for A = (a00 a01; a10 a11) (x) I, with scalar a_ij.
    const complexd a00(nz, 0.0), a01(nx, -ny), a10(nx, ny), a11(-nz, 0.0);
    const ComplexMatrix c00 = a00 * (b00 * a00 + b01 * a10) + a01 * (b10 * a00 + b11 * a10);
    const ComplexMatrix c01 = a00 * (b00 * a01 + b01 * a11) + a01 * (b10 * a01 + b11 * a11);
    const ComplexMatrix c10 = a10 * (b00 * a00 + b01 * a10) + a11 * (b10 * a00 + b11 * a10);
    const ComplexMatrix c11 = a10 * (b00 * a01 + b01 * a11) + a11 * (b10 * a01 + b11 * a11);

    const double diff2 = (b00 - c00).squaredNorm() + (b01 - c01).squaredNorm() +
                         (b10 - c10).squaredNorm() + (b11 - c11).squaredNorm();
    return diff2 / 2.0;
}

/// Nelder-Mead on (theta, phi); the objective is smooth so a plain simplex
/// with a few hundred iterations reaches ~1e-10 easily.
inline double nelder_mead_2d(const std::function<double(double, double)>& f, double theta0,
                             double phi0, double step, double tol, int max_iter = 400) {
    struct Vertex {
        double t, p, v;
    };
    std::array<Vertex, 3> simplex = {{{theta0, phi0, f(theta0, phi0)},
                                      {theta0 + step, phi0, f(theta0 + step, phi0)},
                                      {theta0, phi0 + step, f(theta0, phi0 + step)}}};
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.v < b.v; };
    for (int it = 0; it < max_iter; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        if (std::abs(simplex[2].v - simplex[0].v) < tol) break;
        const double ct = (simplex[0].t + simplex[1].t) / 2.0;
        const double cp = (simplex[0].p + simplex[1].p) / 2.0;
        const double rt = ct + (ct - simplex[2].t);
        const double rp = cp + (cp - simplex[2].p);
        const double rv = f(rt, rp);
        if (rv < simplex[0].v) {
            const double et = ct + 2.0 * (ct - simplex[2].t);
            const double ep = cp + 2.0 * (cp - simplex[2].p);
            const double ev = f(et, ep);
            simplex[2] = ev < rv ? Vertex{et, ep, ev} : Vertex{rt, rp, rv};
        } else if (rv < simplex[1].v) {
            simplex[2] = {rt, rp, rv};
        } else {
            const double kt = ct + 0.5 * (simplex[2].t - ct);
            const double kp = cp + 0.5 * (simplex[2].p - cp);
            const double kv = f(kt, kp);
            if (kv < simplex[2].v) {
                simplex[2] = {kt, kp, kv};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].t = simplex[0].t + 0.5 * (simplex[i].t - simplex[0].t);
                    simplex[i].p = simplex[0].p + 0.5 * (simplex[i].p - simplex[0].p);
                    simplex[i].v = f(simplex[i].t, simplex[i].p);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
    return simplex[0].v;
}

}  // namespace detail

/// Direct minimization of 2 || rho - Pi(rho) ||^2 over qubit projective
/// measurements: coarse (theta, phi) grid followed by simplex refinement.
inline double geometric_discord_bruteforce(const DensityMatrix& rho, int grid_n = 60,
                                           double refine_tol = 1e-10) {
    // disturbance() already carries the factor two: it is || rho - A rho A ||^2 / 2
    // with rho - Pi(rho) = (rho - A rho A) / 2.
    auto objective = [&rho](double theta, double phi) {
        return detail::disturbance(rho, theta, phi);
    };
    double best = std::numeric_limits<double>::infinity();
    double best_t = 0.0, best_p = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        const double theta = M_PI * (i + 0.5) / grid_n;
        for (int j = 0; j < grid_n; ++j) {
            const double phi = 2.0 * M_PI * j / grid_n;
            const double v = objective(theta, phi);
            if (v < best) {
                best = v;
                best_t = theta;
                best_p = phi;
            }
        }
    }
    const double refined =
        detail::nelder_mead_2d(objective, best_t, best_p, M_PI / grid_n, refine_tol);
    return std::min(best, refined);
}

}  // namespace qcorr
