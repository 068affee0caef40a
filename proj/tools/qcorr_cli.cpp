#include <qcorr/csv.hpp>
#include <qcorr/dqc1.hpp>
#include <qcorr/dynamics.hpp>
#include <qcorr/measures.hpp>
#include <qcorr/parallel.hpp>
#include <qcorr/schemes.hpp>
#include <qcorr/states.hpp>

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qcorr;

std::vector<double> parse_grid(const std::string& flag, const std::string& text) {
    double lo = 0.0, hi = 0.0;
    long points = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &points, &tail) != 3 || points < 1)
        throw std::invalid_argument(flag + ": expected start:end:points, got '" + text + "'");
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    for (long i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
    return grid;
}

std::array<double, 3> parse_triple(const std::string& flag, const std::string& text) {
    std::array<double, 3> c{};
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &c[0], &c[1], &c[2], &tail) != 3)
        throw std::invalid_argument(flag + ": expected c1,c2,c3, got '" + text + "'");
    return c;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    writer(out);
    std::cerr << "wrote " << path << "\n";
}

std::string format_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void cmd_measure(const std::string& state_path, const std::string& out_path) {
    const DensityMatrix rho = read_state_file(state_path);
    const CorrelationReport rep = correlation_report(rho);
    std::cout << "d_g = " << csv_number(rep.d_g) << "\n"
              << "q = " << csv_number(rep.q) << "\n"
              << "theta = " << csv_number(rep.theta) << "\n"
              << "negativity = " << csv_number(rep.negativity) << "\n";
    if (!out_path.empty())
        with_output(out_path, [&rep](std::ostream& out) {
            csv_row(out, {"d_g", "q", "theta", "negativity"});
            csv_numeric_row(out, {rep.d_g, rep.q, rep.theta, rep.negativity});
        });
}

void cmd_scatter(int samples, std::uint64_t seed, const std::string& out_path) {
    if (samples < 1) throw std::invalid_argument("scatter: --samples must be >= 1");
    std::vector<std::array<double, 2>> rows(samples);
    parallel_for(samples, [&rows, seed](int i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const DensityMatrix rho = random_mixed(2, 4, rng);
        const SMatrix sm = s_matrix(rho);
        const detail::MeasureValues mv = detail::measures_from_s(sm);
        rows[i] = {mv.d_g, mv.q};
    });
    with_output(out_path, [&rows](std::ostream& out) {
        csv_row(out, {"d_g", "q"});
        for (const auto& row : rows) csv_numeric_row(out, {row[0], row[1]});
    });
}

void cmd_dqc1(const std::string& mu_grid_text, const std::string& out_path) {
    const std::vector<double> mu_grid = parse_grid("--mu-grid", mu_grid_text);
    for (double mu : mu_grid)
        if (mu < 0.0 || mu > 1.0)
            throw std::invalid_argument("dqc1: --mu-grid must stay within [0,1]");
    const std::vector<Dqc1Row> rows = dqc1_sweep(designed_unitary(), mu_grid);
    with_output(out_path, [&rows](std::ostream& out) {
        csv_row(out, {"mu", "d_g", "q", "entropic"});
        for (const Dqc1Row& row : rows)
            csv_numeric_row(out, {row.mu, row.d_g, row.q, row.entropic});
    });
}

std::map<std::string, double> read_expectations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StateParseError("cannot open expectations file '" + path + "'");
    std::map<std::string, double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw StateParseError("line " + std::to_string(line_no) +
                                  ": expected 'label,value'");
        const std::string label = line.substr(0, comma);
        if (line_no == 1 && label == "label") continue;
        values[label] = detail::parse_double(line.substr(comma + 1), line_no, "value");
    }
    return values;
}

void cmd_plan(const std::string& setting, int d, const std::string& expectations_path) {
    ObservablePlan plan;
    if (setting == "nmr") {
        plan = nmr_plan(d);
    } else if (setting == "optical-projective" || setting == "optical-swap") {
        if (d > 4)
            throw std::invalid_argument(
                "plan: optical settings are implemented for d <= 4 (four-copy operators)");
        plan = optical_plan(d, setting == "optical-projective");
    } else {
        throw std::invalid_argument(
            "plan: --setting must be nmr, optical-projective or optical-swap");
    }

    std::cout << "setting: " << plan.setting << "\n"
              << "d: " << plan.d << "\n"
              << "observables: " << plan.entries.size() << "\n"
              << "tomography: " << plan.tomography_count << "\n"
              << "label copies hash\n";
    for (const PlanEntry& e : plan.entries)
        std::cout << e.label << " " << e.copies << " " << hash_hex(operator_hash(e.op)) << "\n";

    if (!expectations_path.empty()) {
        if (setting != "nmr")
            throw std::invalid_argument("plan: --expectations applies to the nmr setting only");
        const NmrReconstruction rec = reconstruct_from_nmr(d, read_expectations(expectations_path));
        std::cout << "d_g = " << csv_number(rec.d_g) << "\n"
                  << "q = " << csv_number(rec.q) << "\n";
    }
}

struct IdentityCheck {
    std::string name;
    double max_err = 0.0;
    double tol = 0.0;
    bool pass() const { return max_err < tol; }
};

int cmd_verify(int states, std::uint64_t seed) {
    if (states < 1) throw std::invalid_argument("verify: --states must be >= 1");
    std::vector<IdentityCheck> checks;

    {
        IdentityCheck c{"shift-identity", 0.0, 1e-12};
        for (int dim : {2, 4}) {
            for (int k = 2; k <= 4; ++k) {
                for (int rep = 0; rep < 3; ++rep) {
                    Rng rng(derive_seed(seed, 1000 * dim + 10 * k + rep));
                    std::vector<ComplexMatrix> factors;
                    ComplexMatrix prod = ComplexMatrix::Identity(dim, dim);
                    ComplexMatrix tensor = ComplexMatrix::Identity(1, 1);
                    for (int i = 0; i < k; ++i) {
                        factors.push_back(detail::random_ginibre_density(dim, dim, rng));
                        prod = prod * factors.back();
                        tensor = kron(tensor, factors.back());
                    }
                    const double lhs = trace_of_product(shift_operator(k, dim), tensor).real();
                    c.max_err = std::max(c.max_err, std::abs(lhs - prod.trace().real()));
                }
            }
        }
        checks.push_back(c);
    }

    {
        IdentityCheck c{"swap-projector", 0.0, 1e-12};
        for (int d : {2, 3, 4}) {
            const ComplexMatrix v = shift_operator(2, d);
            const ComplexMatrix p = antisym_projector(d);
            const ComplexMatrix identity = ComplexMatrix::Identity(d * d, d * d);
            c.max_err = std::max(c.max_err, (v * v - identity).cwiseAbs().maxCoeff());
            c.max_err = std::max(
                c.max_err, (v - swap_from_basis(gell_mann_basis(d))).cwiseAbs().maxCoeff());
            c.max_err = std::max(c.max_err, (p - (identity - v) / 2.0).cwiseAbs().maxCoeff());
            c.max_err = std::max(c.max_err, (p * p - p).cwiseAbs().maxCoeff());
            c.max_err =
                std::max(c.max_err, std::abs(p.trace().real() - d * (d - 1) / 2.0));
        }
        checks.push_back(c);
    }

    IdentityCheck moment{"moment-route", 0.0, 1e-10};
    IdentityCheck overlap{"overlap-route", 0.0, 1e-10};
    IdentityCheck proj_route{"projective-route", 0.0, 1e-10};
    IdentityCheck swap_route{"swap-route", 0.0, 1e-10};
    IdentityCheck interferometer{"interferometer", 0.0, 1e-10};
    IdentityCheck localization{"nmr-localization", 0.0, 1e-10};
    IdentityCheck roundtrip{"nmr-roundtrip", 0.0, 1e-10};

    const std::vector<MulticopyOperator> optical_ops = optical_operator_set(2);
    for (int i = 0; i < states; ++i) {
        Rng rng(derive_seed(seed, 50000 + i));
        const DensityMatrix rho = random_mixed(2, 4, rng);
        const BlochFano bf = bloch_fano_decompose(rho, gell_mann_basis(2));
        const Eigen::Matrix3d x_mat = bf.x * bf.x.transpose();
        const Eigen::Matrix3d t_mat = bf.t * bf.t.transpose();
        const SMatrix sm = s_matrix(bf);

        const MulticopyTraces mt = multicopy_traces(rho);
        moment.max_err = std::max(moment.max_err, std::abs(mt.tr_x - x_mat.trace()));
        moment.max_err = std::max(moment.max_err, std::abs(mt.tr_t - t_mat.trace()));
        moment.max_err =
            std::max(moment.max_err, std::abs(mt.tr_x2 - (x_mat * x_mat).trace()));
        moment.max_err =
            std::max(moment.max_err, std::abs(mt.tr_xt - (x_mat * t_mat).trace()));
        moment.max_err =
            std::max(moment.max_err, std::abs(mt.tr_t2 - (t_mat * t_mat).trace()));

        const auto [s1, s2] = multicopy_traces_s(rho);
        overlap.max_err = std::max(overlap.max_err, std::abs(s1 - sm.tr_s));
        overlap.max_err = std::max(overlap.max_err, std::abs(s2 - sm.tr_s2));

        const ComplexMatrix rho2 = kron(rho.matrix(), rho.matrix());
        const ComplexMatrix rho4 = kron(rho2, rho2);
        std::map<std::string, double> values;
        for (const MulticopyOperator& mo : optical_ops)
            values[mo.label] =
                trace_of_product(mo.op, mo.copies == 2 ? rho2 : rho4).real();
        const auto [pc1, pc2] = trs_from_projective(values);
        proj_route.max_err = std::max(proj_route.max_err, std::abs(pc1 - sm.tr_s));
        proj_route.max_err = std::max(proj_route.max_err, std::abs(pc2 - sm.tr_s2));
        const auto [dc1, dc2] = trs_from_swap(values);
        swap_route.max_err = std::max(swap_route.max_err, std::abs(dc1 - sm.tr_s));
        swap_route.max_err = std::max(swap_route.max_err, std::abs(dc2 - sm.tr_s2));

        if (i < 20) {
            for (const MulticopyOperator& mo : optical_ops) {
                const ComplexMatrix& sigma = mo.copies == 2 ? rho2 : rho4;
                const double direct = trace_of_product(mo.op, sigma).real();
                interferometer.max_err =
                    std::max(interferometer.max_err,
                             std::abs(interferometer_expectation(mo.op, sigma) - direct));
            }
        }

        for (int nu = 1; nu <= 3; ++nu)
            for (int lam = 1; lam <= 3; ++lam) {
                const auto [lhs, rhs] = nmr_localization_check(rho, nu, lam);
                localization.max_err = std::max(localization.max_err, std::abs(lhs - rhs));
            }
    }

    for (int d : {2, 3}) {
        const int nmr_states = std::max(1, states / 10);
        const ObservablePlan plan = nmr_plan(d);
        for (int i = 0; i < nmr_states; ++i) {
            Rng rng(derive_seed(seed, 90000 + 100 * d + i));
            const DensityMatrix rho = random_mixed(d, 2 * d, rng);
            std::map<std::string, double> values;
            for (const PlanEntry& e : plan.entries)
                values[e.label] = trace_of_product(rho.matrix(), e.op).real();
            const NmrReconstruction rec = reconstruct_from_nmr(d, values);
            const detail::MeasureValues mv = detail::measures_from_s(s_matrix(rho));
            roundtrip.max_err = std::max(roundtrip.max_err, std::abs(rec.d_g - mv.d_g));
            roundtrip.max_err = std::max(roundtrip.max_err, std::abs(rec.q - mv.q));
        }
    }

    checks.push_back(moment);
    checks.push_back(overlap);
    checks.push_back(proj_route);
    checks.push_back(swap_route);
    checks.push_back(interferometer);
    checks.push_back(localization);
    checks.push_back(roundtrip);

    bool all_pass = true;
    for (const IdentityCheck& c : checks) {
        std::printf("%-18s max_err %.3e  tol %.0e  %s\n", c.name.c_str(), c.max_err, c.tol,
                    c.pass() ? "PASS" : "FAIL");
        all_pass = all_pass && c.pass();
    }
    return all_pass ? 0 : 1;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    csv_row(out, {"t", "d_g", "q", "gap", "negativity"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const CorrelationReport& rep = traj.reports[i];
        csv_numeric_row(out, {traj.times[i], rep.d_g, rep.q, rep.d_g - rep.q, rep.negativity});
    }
}

std::string output_target(const std::string& out_dir, const std::string& filename) {
    if (out_dir.empty()) return "";
    std::filesystem::create_directories(out_dir);
    return (std::filesystem::path(out_dir) / filename).string();
}

void emit_trajectory(const Trajectory& traj, const std::string& out_dir,
                     const std::string& filename) {
    with_output(output_target(out_dir, filename),
                [&traj](std::ostream& out) { write_trajectory_csv(out, traj); });
    if (traj.truncated)
        std::cerr << "trajectory truncated: " << traj.stop_reason << "\n";
}

void emit_max_gap(const std::vector<MaxGapRow>& rows, const std::string& param_name,
                  const std::string& out_dir, const std::string& filename) {
    with_output(output_target(out_dir, filename), [&rows, &param_name](std::ostream& out) {
        csv_row(out, {param_name, "max_gap", "t_at_max"});
        for (const MaxGapRow& row : rows)
            csv_numeric_row(out, {row.param, row.max_gap, row.t_at_max});
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcorr: geometric-discord and measurement-plan toolkit for qubit-qudit states"};
    app.require_subcommand(1);
    int exit_code = 0;

    auto* measure = app.add_subcommand("measure", "Correlation report for a state file");
    std::string measure_file, measure_out;
    measure->add_option("file", measure_file, "state file (dims 2 d header)")->required();
    measure->add_option("--out", measure_out, "also write the report as CSV");
    measure->callback([&] { cmd_measure(measure_file, measure_out); });

    auto* scatter = app.add_subcommand("scatter", "Random two-qubit (d_g, q) sample as CSV");
    int scatter_samples = 10000;
    std::uint64_t scatter_seed = 1;
    std::string scatter_out;
    scatter->add_option("--samples", scatter_samples, "number of random states");
    scatter->add_option("--seed", scatter_seed, "base seed");
    scatter->add_option("--out", scatter_out, "output CSV path (default stdout)");
    scatter->callback([&] { cmd_scatter(scatter_samples, scatter_seed, scatter_out); });

    auto* dqc1 = app.add_subcommand("dqc1", "One-clean-qubit sweep over ancilla purity");
    std::string dqc1_grid = "0:1:21", dqc1_out;
    dqc1->add_option("--mu-grid", dqc1_grid, "purity grid start:end:points");
    dqc1->add_option("--out", dqc1_out, "output CSV path (default stdout)");
    dqc1->callback([&] { cmd_dqc1(dqc1_grid, dqc1_out); });

    auto* plan = app.add_subcommand("plan", "Non-tomographic measurement plan");
    std::string plan_setting = "nmr", plan_expectations;
    int plan_d = 2;
    plan->add_option("--setting", plan_setting, "nmr | optical-projective | optical-swap");
    plan->add_option("--d", plan_d, "Bob dimension")->check(CLI::Range(2, 16));
    plan->add_option("--expectations", plan_expectations,
                     "label,value CSV of recorded expectations (nmr only)");
    plan->callback([&] { cmd_plan(plan_setting, plan_d, plan_expectations); });

    auto* verify = app.add_subcommand("verify", "Run the measurement-scheme identity suite");
    int verify_states = 100;
    std::uint64_t verify_seed = 7;
    verify->add_option("--states", verify_states, "random states per identity");
    verify->add_option("--seed", verify_seed, "base seed");
    verify->callback([&] { exit_code = cmd_verify(verify_states, verify_seed); });

    auto* dynamics = app.add_subcommand("dynamics", "Open-system trajectories and gap sweeps");
    dynamics->require_subcommand(1);

    auto* lorentzian = dynamics->add_subcommand(
        "lorentzian", "Werner state in independent Lorentzian amplitude environments");
    double lor_r = 0.75, lor_gamma0 = 1.0, lor_lambda = 0.1;
    std::string lor_t = "0:8:400", lor_out_dir, lor_r_grid = "0:1:11";
    bool lor_max_gap = false;
    lorentzian->add_option("--r", lor_r, "Werner parameter")->check(CLI::Range(0.0, 1.0));
    lorentzian->add_option("--gamma0", lor_gamma0, "coupling rate");
    lorentzian->add_option("--lambda", lor_lambda, "spectral width");
    lorentzian->add_option("--t", lor_t, "time grid start:end:points");
    lorentzian->add_option("--out-dir", lor_out_dir, "write CSV files here (default stdout)");
    lorentzian->add_flag("--max-gap", lor_max_gap, "sweep max (d_g - q) over an r grid");
    lorentzian->add_option("--r-grid", lor_r_grid, "r grid for --max-gap");
    lorentzian->callback([&] {
        const LorentzianParams params{lor_gamma0, lor_lambda};
        const std::vector<double> t_grid = parse_grid("--t", lor_t);
        const std::string suffix =
            "gamma0-" + format_param(lor_gamma0) + "_lambda-" + format_param(lor_lambda);
        if (lor_max_gap) {
            const std::vector<MaxGapRow> rows = max_gap(
                InitialFamily::werner, params, parse_grid("--r-grid", lor_r_grid), t_grid);
            emit_max_gap(rows, "r", lor_out_dir, "lorentzian_maxgap_" + suffix + ".csv");
        } else {
            const Trajectory traj = trajectory(werner(lor_r), params, t_grid);
            emit_trajectory(traj, lor_out_dir,
                            "lorentzian_r-" + format_param(lor_r) + "_" + suffix + ".csv");
        }
    });

    auto* phaseflip = dynamics->add_subcommand(
        "phaseflip", "Bell-diagonal state under independent phase flips");
    std::string pf_c = "1,-0.6,0.6", pf_t = "0:2:400", pf_out_dir, pf_s_grid = "0:1:11";
    double pf_gamma = 1.0;
    bool pf_max_gap = false;
    phaseflip->add_option("--c", pf_c, "initial triple c1,c2,c3");
    phaseflip->add_option("--gamma", pf_gamma, "flip rate");
    phaseflip->add_option("--t", pf_t, "time grid start:end:points");
    phaseflip->add_option("--out-dir", pf_out_dir, "write CSV files here (default stdout)");
    phaseflip->add_flag("--max-gap", pf_max_gap,
                        "sweep max (d_g - q) over the c = (1,-s,s) family");
    phaseflip->add_option("--s-grid", pf_s_grid, "s grid for --max-gap");
    phaseflip->callback([&] {
        const PhaseFlipParams params{pf_gamma};
        const std::vector<double> t_grid = parse_grid("--t", pf_t);
        if (pf_max_gap) {
            const std::vector<MaxGapRow> rows = max_gap(
                InitialFamily::bell_pm, params, parse_grid("--s-grid", pf_s_grid), t_grid);
            emit_max_gap(rows, "s", pf_out_dir,
                         "phaseflip_maxgap_gamma-" + format_param(pf_gamma) + ".csv");
        } else {
            const std::array<double, 3> c0 = parse_triple("--c", pf_c);
            const Trajectory traj = trajectory(bell_diagonal(c0[0], c0[1], c0[2]), params, t_grid);
            emit_trajectory(traj, pf_out_dir,
                            "phaseflip_c1-" + format_param(c0[0]) + "_c2-" + format_param(c0[1]) +
                                "_c3-" + format_param(c0[2]) + "_gamma-" +
                                format_param(pf_gamma) + ".csv");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qcorr::StateParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
