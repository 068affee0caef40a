#pragma once

#include <qcorr/linalg.hpp>
#include <qcorr/measures.hpp>
#include <qcorr/states.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qcorr {

/// Independent amplitude environments with a Lorentzian spectral density.
struct LorentzianParams {
    double gamma0 = 1.0;
    double lambda = 1.0;

    // (2 gamma0 lambda - lambda^2) / 4; negative in the overdamped regime.
    double delta_sq() const { return (2.0 * gamma0 * lambda - lambda * lambda) / 4.0; }
};

/// Independent phase-flip channels along the third axis.
struct PhaseFlipParams {
    double gamma = 1.0;
};

using Channel = std::variant<LorentzianParams, PhaseFlipParams>;

inline std::string channel_label(const Channel& ch) {
    return std::holds_alternative<LorentzianParams>(ch) ? "lorentzian" : "phaseflip";
}

/// Single-excitation survival amplitude factor:
/// P_t = e^{-lambda t} [cos(Delta t) + (lambda / 2 Delta) sin(Delta t)],
/// continued with cosh/sinh when Delta^2 < 0 and by limit at Delta = 0.
inline double p_t(double t, const LorentzianParams& params) {
    if (t < 0.0) throw std::invalid_argument("p_t: t must be >= 0");
    if (params.gamma0 <= 0.0 || params.lambda <= 0.0)
        throw std::invalid_argument("p_t: gamma0 and lambda must be > 0");
    const double d2 = params.delta_sq();
    const double lt = params.lambda * t;
    if (d2 > 0.0) {
        const double delta = std::sqrt(d2);
        return std::exp(-lt) *
               (std::cos(delta * t) + params.lambda / (2.0 * delta) * std::sin(delta * t));
    }
    if (d2 < 0.0) {
        const double delta = std::sqrt(-d2);
        return std::exp(-lt) *
               (std::cosh(delta * t) + params.lambda / (2.0 * delta) * std::sinh(delta * t));
    }
    return std::exp(-lt) * (1.0 + lt / 2.0);
}

namespace detail {

/// Nudges the last diagonal entry by rounding residues until the diagonal sums
/// to 1 exactly in left-to-right order.
inline void force_unit_trace(ComplexMatrix& m) {
    const int n = static_cast<int>(m.rows());
    for (int pass = 0; pass < 4; ++pass) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += m(i, i).real();
        if (tr == 1.0) return;
        m(n - 1, n - 1) = complexd(m(n - 1, n - 1).real() - (tr - 1.0), 0.0);
    }
}

}  // namespace detail

/// Exact solution for two qubits in independent Lorentzian amplitude
/// environments. The element map acts in the basis {|11>,|10>,|01>,|00>};
/// the input and output use the standard {|00>,|01>,|10>,|11>} order, so the
/// indices are reversed at the boundary.
inline DensityMatrix evolve_independent(const DensityMatrix& rho0, double t,
                                        const LorentzianParams& params) {
    if (rho0.dim_b() != 2)
        throw std::invalid_argument("evolve_independent: needs a two-qubit state");
    const double pt = p_t(t, params);
    if (pt < 0.0)
        throw std::domain_error("evolve_independent: P_t = " + std::to_string(pt) + " at t = " +
                                std::to_string(t) + "; fractional powers are undefined");
    const double sp = std::sqrt(pt);
    const double p32 = pt * sp;
    const ComplexMatrix& m = rho0.matrix();
    auto r = [&m](int i, int j) { return m(3 - i, 3 - j); };

    ComplexMatrix out(4, 4);
    const double feed = pt * (1.0 - pt);
    out(0, 0) = r(0, 0).real() * pt * pt;
    out(1, 1) = r(1, 1).real() * pt + r(0, 0).real() * feed;
    out(2, 2) = r(2, 2).real() * pt + r(0, 0).real() * feed;
    out(3, 3) = 1.0 - (out(0, 0).real() + out(1, 1).real() + out(2, 2).real());
    out(0, 1) = r(0, 1) * p32;
    out(0, 2) = r(0, 2) * p32;
    out(0, 3) = r(0, 3) * pt;
    out(1, 2) = r(1, 2) * pt;
    out(1, 3) = sp * (r(1, 3) + r(0, 2) * (1.0 - pt));
    out(2, 3) = sp * (r(2, 3) + r(0, 1) * (1.0 - pt));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) out(i, j) = std::conj(out(j, i));

    ComplexMatrix std_order(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) std_order(3 - i, 3 - j) = out(i, j);
    detail::force_unit_trace(std_order);
    return DensityMatrix(std::move(std_order), 2);
}

/// Bell-diagonal triple under independent phase flips: c1 and c2 decay as
/// e^{-2 gamma t}, c3 passes through untouched.
inline std::array<double, 3> phase_flip_c(const std::array<double, 3>& c0, double t,
                                          const PhaseFlipParams& params) {
    if (t < 0.0) throw std::invalid_argument("phase_flip_c: t must be >= 0");
    if (params.gamma <= 0.0) throw std::invalid_argument("phase_flip_c: gamma must be > 0");
    const double decay = std::exp(-2.0 * params.gamma * t);
    return {c0[0] * decay, c0[1] * decay, c0[2]};
}

inline DensityMatrix evolve_phase_flip(const std::array<double, 3>& c0, double t,
                                       const PhaseFlipParams& params) {
    const std::array<double, 3> c = phase_flip_c(c0, t, params);
    return bell_diagonal(c[0], c[1], c[2]);
}

/// Reads the Bell-diagonal triple off a state; rejects states that are not
/// Bell-diagonal in the standard axes.
inline std::array<double, 3> bell_diagonal_c(const DensityMatrix& rho, double tol = 1e-9) {
    if (rho.dim_b() != 2)
        throw std::invalid_argument("bell_diagonal_c: needs a two-qubit state");
    const BlochFano bf = bloch_fano_decompose(rho, gell_mann_basis(2));
    double off = std::max(bf.x.cwiseAbs().maxCoeff(), bf.y.cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) off = std::max(off, std::abs(bf.t(i, j)));
    if (off > tol)
        throw std::invalid_argument(
            "bell_diagonal_c: state is not Bell-diagonal (off-axis coefficient " +
            std::to_string(off) + ")");
    return {bf.t(0, 0), bf.t(1, 1), bf.t(2, 2)};
}

struct Trajectory {
    std::string channel;
    std::vector<double> times;
    std::vector<CorrelationReport> reports;
    bool truncated = false;
    std::string stop_reason;
};

inline DensityMatrix evolve(const DensityMatrix& rho0, double t, const Channel& channel) {
    if (const auto* lor = std::get_if<LorentzianParams>(&channel))
        return evolve_independent(rho0, t, *lor);
    return evolve_phase_flip(bell_diagonal_c(rho0), t, std::get<PhaseFlipParams>(channel));
}

/// Correlation reports along a time grid; sampling stops at the first time the
/// channel map leaves its domain or produces an invalid state.
inline Trajectory trajectory(const DensityMatrix& rho0, const Channel& channel,
                             const std::vector<double>& times) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("trajectory: times must be strictly increasing");
    // For the phase-flip channel, extract (and validate) the triple once.
    std::array<double, 3> c0{};
    const auto* flip = std::get_if<PhaseFlipParams>(&channel);
    if (flip) c0 = bell_diagonal_c(rho0);

    Trajectory traj;
    traj.channel = channel_label(channel);
    traj.times.reserve(times.size());
    traj.reports.reserve(times.size());
    for (double t : times) {
        try {
            const DensityMatrix rho =
                flip ? evolve_phase_flip(c0, t, *flip)
                     : evolve_independent(rho0, t, std::get<LorentzianParams>(channel));
            traj.reports.push_back(correlation_report(rho));
            traj.times.push_back(t);
        } catch (const std::domain_error& e) {
            traj.truncated = true;
            traj.stop_reason = e.what();
            break;
        } catch (const std::invalid_argument& e) {
            traj.truncated = true;
            traj.stop_reason = e.what();
            break;
        }
    }
    return traj;
}

/// Initial-state families for the gap sweeps: Werner states parametrized by r,
/// and Bell-diagonal states c = (1, -s, s) parametrized by s.
enum class InitialFamily { werner, bell_pm };

inline DensityMatrix family_state(InitialFamily family, double param) {
    if (family == InitialFamily::werner) return werner(param);
    return bell_diagonal(1.0, -param, param);
}

struct MaxGapRow {
    double param = 0.0;
    double max_gap = 0.0;
    double t_at_max = 0.0;
};

namespace detail {

/// Golden-section maximization of f on [a, b]; f returns -inf where undefined.
inline std::pair<double, double> refine_max(const std::function<double(double)>& f, double a,
                                            double b, int iters = 80) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && b - a > 1e-12; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace detail

/// For each family parameter, the largest D_G - Q along the time grid (with
/// local refinement around the grid maximum) and the time where it occurs.
inline std::vector<MaxGapRow> max_gap(InitialFamily family, const Channel& channel,
                                      const std::vector<double>& params,
                                      const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("max_gap: empty time grid");
    std::vector<MaxGapRow> rows;
    rows.reserve(params.size());
    for (double param : params) {
        const DensityMatrix rho0 = family_state(family, param);
        auto gap = [&rho0, &channel](double t) {
            try {
                const CorrelationReport rep = correlation_report(evolve(rho0, t, channel));
                return rep.d_g - rep.q;
            } catch (const std::exception&) {
                return -std::numeric_limits<double>::infinity();
            }
        };
        std::size_t best = 0;
        double best_gap = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double g = gap(t_grid[i]);
            if (g > best_gap) {
                best_gap = g;
                best = i;
            }
        }
        MaxGapRow row;
        row.param = param;
        row.max_gap = best_gap;
        row.t_at_max = t_grid[best];
        const double lo = t_grid[best > 0 ? best - 1 : 0];
        const double hi = t_grid[best + 1 < t_grid.size() ? best + 1 : best];
        if (hi > lo) {
            const auto [t_ref, g_ref] = detail::refine_max(gap, lo, hi);
            if (g_ref > row.max_gap) {
                row.max_gap = g_ref;
                row.t_at_max = t_ref;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

/// Change-point detection by zooming on the largest discrete second difference.
inline double kink_time(const std::function<double(double)>& f, double t_lo, double t_hi,
                        int grid_n = 201, int levels = 3) {
    if (!(t_hi > t_lo)) throw std::invalid_argument("kink_time: empty interval");
    if (grid_n < 5) throw std::invalid_argument("kink_time: grid too small");
    double a = t_lo, b = t_hi, best_t = (t_lo + t_hi) / 2.0;
    for (int level = 0; level < levels; ++level) {
        const double h = (b - a) / (grid_n - 1);
        std::vector<double> v(grid_n);
        for (int i = 0; i < grid_n; ++i) v[i] = f(a + i * h);
        int best = 1;
        double best_mag = -1.0;
        for (int i = 1; i + 1 < grid_n; ++i) {
            const double mag = std::abs(v[i - 1] - 2.0 * v[i] + v[i + 1]);
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
        best_t = a + best * h;
        const double new_a = std::max(t_lo, best_t - h);
        const double new_b = std::min(t_hi, best_t + h);
        a = new_a;
        b = new_b;
    }
    return best_t;
}

/// One-sided difference quotients of f at t with step h: (left, right).
inline std::pair<double, double> one_sided_slopes(const std::function<double(double)>& f,
                                                  double t, double h) {
    return {(f(t) - f(t - h)) / h, (f(t + h) - f(t)) / h};
}

}  // namespace qcorr
