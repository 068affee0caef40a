#include <catch2/catch_amalgamated.hpp>

#include "qcorr/dqc1.hpp"
#include "qcorr/measures.hpp"

using namespace qcorr;

namespace {

ComplexMatrix random_diagonal_unitary(int dim, Rng& rng) {
    ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double phase = 2.0 * 3.14159265358979324 * rng.uniform();
        u(i, i) = std::polar(1.0, phase);
    }
    return u;
}

} // namespace

TEST_CASE("designed unitary entries and trace", "[dqc1]") {
    const ComplexMatrix u = designed_unitary();
    REQUIRE(u.rows() == 8);
    CHECK(is_unitary(u));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (i != j) CHECK(u(i, j) == complexd(0.0, 0.0));

    const complexd a(-0.3090169943749478, 0.9510565162951535);
    const complexd b(-0.8090169943749471, -0.5877852522924738);
    CHECK(std::abs(u(0, 0) - a) < 1e-15);
    CHECK(std::abs(u(1, 1) - a) < 1e-15);
    CHECK(std::abs(u(2, 2) - b) < 1e-15);
    CHECK(u(3, 3) == complexd(1.0, 0.0));
    CHECK(std::abs(u(4, 4) - a) < 1e-15);
    CHECK(std::abs(u(5, 5) - b) < 1e-15);
    CHECK(u(6, 6) == complexd(1.0, 0.0));
    CHECK(u(7, 7) == complexd(1.0, 0.0));

    CHECK(std::abs(u.trace() - complexd(0.4549150281252625, 1.6775990443005129)) < 1e-14);
}

TEST_CASE("one-clean-qubit output state", "[dqc1]") {
    const ComplexMatrix u = designed_unitary();

    const DensityMatrix unpolarized = dqc1_output_state(u, 0.0);
    CHECK((unpolarized.matrix() - ComplexMatrix::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff() <
          1e-15);

    const DensityMatrix out = dqc1_output_state(u, 0.8);
    CHECK(out.dim_b() == 8);
    const ComplexMatrix block = out.matrix().block(8, 0, 8, 8);
    CHECK((block - 0.8 * u / 16.0).cwiseAbs().maxCoeff() < 1e-15);

    // tracing out the register leaves the polarization-scaled trace of U
    const ComplexMatrix ma = out.marginal_a();
    CHECK(std::abs(ma(0, 0) - complexd(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(ma(1, 0) - 0.8 * u.trace() / 16.0) < 1e-14);

    CHECK_THROWS_AS(dqc1_output_state(u, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(dqc1_output_state(u, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(dqc1_output_state(2.0 * u, 0.5), std::invalid_argument);
}

TEST_CASE("circuit and block constructions agree", "[dqc1]") {
    const ComplexMatrix designed = designed_unitary();
    for (double mu : {0.1, 0.5, 1.0}) {
        const DensityMatrix a = dqc1_output_state(designed, mu);
        const DensityMatrix b = dqc1_circuit_state(designed, mu);
        CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }

    Rng rng(601);
    for (int i = 0; i < 5; ++i) {
        const ComplexMatrix u = random_diagonal_unitary(4, rng);
        for (double mu : {0.1, 0.5, 1.0}) {
            const DensityMatrix a = dqc1_output_state(u, mu);
            const DensityMatrix b = dqc1_circuit_state(u, mu);
            CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("trace estimation from the clean qubit", "[dqc1]") {
    const ComplexMatrix id = ComplexMatrix::Identity(8, 8);
    CHECK(std::abs(trace_estimate(dqc1_output_state(id, 1.0), 1.0) - complexd(8.0, 0.0)) <
          1e-12);

    const ComplexMatrix u = designed_unitary();
    for (double mu : {0.25, 0.5, 1.0}) {
        const complexd est = trace_estimate(dqc1_output_state(u, mu), mu);
        CHECK(std::abs(est - u.trace()) < 1e-10);
    }

    ComplexMatrix traceless = ComplexMatrix::Zero(2, 2);
    traceless(0, 0) = 1.0;
    traceless(1, 1) = -1.0;
    CHECK(std::abs(trace_estimate(dqc1_output_state(traceless, 0.7), 0.7)) < 1e-12);

    CHECK_THROWS_AS(trace_estimate(dqc1_output_state(u, 0.5), 0.0), std::invalid_argument);
}

TEST_CASE("entropic discord closed form", "[dqc1]") {
    CHECK(entropic_discord_dqc1(0.0) == 0.0);
    CHECK(std::abs(entropic_discord_dqc1(1.0) - 0.5573049591110366) < 1e-15);
    CHECK(std::abs(entropic_discord_dqc1(0.5) - 0.09546876302258372) < 1e-15);
    CHECK_THROWS_AS(entropic_discord_dqc1(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(entropic_discord_dqc1(1.1), std::invalid_argument);
}

TEST_CASE("polarization sweep of the designed circuit", "[dqc1]") {
    const ComplexMatrix u = designed_unitary();
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    const std::vector<Dqc1Row> rows = dqc1_sweep(u, grid);
    REQUIRE(rows.size() == 21);

    CHECK(rows[0].d_g < 1e-14);
    CHECK(rows[0].q < 1e-14);
    CHECK(rows[0].entropic == 0.0);

    CHECK(std::abs(rows[20].d_g - 0.05313250918817881) < 1e-12);
    CHECK(std::abs(rows[20].q - 0.04028555805294843) < 1e-12);
    CHECK(std::abs(rows[20].entropic - 0.5573049591110366) < 1e-14);

    // both geometric quantities follow an exact quadratic in the polarization
    const double c_dg = rows[20].d_g;
    const double c_q = rows[20].q;
    for (const Dqc1Row& row : rows) {
        CHECK(std::abs(row.d_g - c_dg * row.mu * row.mu) < 1e-10);
        CHECK(std::abs(row.q - c_q * row.mu * row.mu) < 1e-10);
    }

    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].d_g >= rows[i - 1].d_g - 1e-12);
        CHECK(rows[i].q >= rows[i - 1].q - 1e-12);
        CHECK(rows[i].entropic >= rows[i - 1].entropic - 1e-12);
    }
}

TEST_CASE("quadratic coefficient fit", "[dqc1]") {
    std::vector<double> mu, val;
    for (int i = 0; i <= 10; ++i) {
        const double m = i / 10.0;
        mu.push_back(m);
        val.push_back(0.3125 * m * m);
    }
    CHECK(std::abs(fit_quadratic_coefficient(mu, val) - 0.3125) < 1e-14);

    CHECK_THROWS_AS(fit_quadratic_coefficient({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(fit_quadratic_coefficient({0.1}, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(fit_quadratic_coefficient({0.0}, {0.0}), std::invalid_argument);

    const ComplexMatrix u = designed_unitary();
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    const std::vector<Dqc1Row> rows = dqc1_sweep(u, grid);
    std::vector<double> dg, q;
    for (const Dqc1Row& r : rows) {
        dg.push_back(r.d_g);
        q.push_back(r.q);
    }
    CHECK(std::abs(fit_quadratic_coefficient(grid, dg) - 0.0531325) < 1e-5);
    CHECK(std::abs(fit_quadratic_coefficient(grid, q) - 0.0402856) < 1e-5);
}
