#include <catch2/catch_amalgamated.hpp>

#include "qcorr/linalg.hpp"
#include "qcorr/bases.hpp"
#include "qcorr/states.hpp"

using namespace qcorr;

namespace {

ComplexMatrix random_complex(int rows, int cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = complexd(rng.gaussian(), rng.gaussian());
    return m;
}

// Entries are small integers so products of three factors stay exact in
// double precision.
ComplexMatrix random_int_matrix(int rows, int cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = std::floor(rng.uniform() * 5.0) - 2.0;
            const double im = std::floor(rng.uniform() * 5.0) - 2.0;
            m(i, j) = complexd(re, im);
        }
    return m;
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
    const ComplexMatrix g = random_complex(dim, dim, rng);
    return (g + g.adjoint()).eval() / 2.0;
}

} // namespace

TEST_CASE("kron basics", "[linalg]") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(kron(i2, i2) == ComplexMatrix::Identity(4, 4));

    const ComplexMatrix zz = kron(pauli(3), pauli(3));
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    expected(1, 1) = -1.0;
    expected(2, 2) = -1.0;
    expected(3, 3) = 1.0;
    CHECK(zz == expected);

    // first factor indexes the slow (most significant) digit
    const ComplexMatrix xi = kron(pauli(1), i2);
    CHECK(xi(2, 0) == complexd(1.0, 0.0));
    CHECK(xi(3, 1) == complexd(1.0, 0.0));
    CHECK(xi(0, 0) == complexd(0.0, 0.0));
}

TEST_CASE("kron is associative with exact entries", "[linalg]") {
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const ComplexMatrix a = random_int_matrix(2, 2, rng);
        const ComplexMatrix b = random_int_matrix(3, 3, rng);
        const ComplexMatrix c = random_int_matrix(2, 2, rng);
        CHECK(kron(kron(a, b), c) == kron(a, kron(b, c)));
    }
}

TEST_CASE("kron of mixed shapes", "[linalg]") {
    Rng rng(12);
    const ComplexMatrix a = random_complex(2, 3, rng);
    const ComplexMatrix b = random_complex(3, 2, rng);
    const ComplexMatrix ab = kron(a, b);
    REQUIRE(ab.rows() == 6);
    REQUIRE(ab.cols() == 6);
    CHECK(ab(0, 0) == a(0, 0) * b(0, 0));
    CHECK(ab(5, 5) == a(1, 2) * b(2, 1));
}

TEST_CASE("permute_subsystems identity and inversion", "[linalg]") {
    Rng rng(13);
    const SubsystemLayout layout{{2, 3, 2}};
    const ComplexMatrix m = random_complex(12, 12, rng);

    CHECK(permute_subsystems(m, layout, {0, 1, 2}) == m);

    const ComplexMatrix fwd = permute_subsystems(m, layout, {2, 0, 1});
    // output slot j holds input slot perm[j]; applying the inverse map on the
    // permuted layout restores the original
    const SubsystemLayout permuted{{2, 2, 3}};
    const ComplexMatrix back = permute_subsystems(fwd, permuted, {1, 2, 0});
    CHECK(back == m);
}

TEST_CASE("permute_subsystems swaps kron factors exactly", "[linalg]") {
    Rng rng(14);
    const ComplexMatrix a = random_complex(2, 2, rng);
    const ComplexMatrix b = random_complex(3, 3, rng);
    const SubsystemLayout layout{{2, 3}};
    CHECK(permute_subsystems(kron(a, b), layout, {1, 0}) == kron(b, a));
}

TEST_CASE("permute_subsystems conjugation consistency", "[linalg]") {
    Rng rng(15);
    const SubsystemLayout layout{{2, 2, 2}};
    const ComplexMatrix m = random_complex(8, 8, rng);
    const ComplexMatrix o = random_complex(8, 8, rng);
    const std::vector<int> perm{1, 2, 0};
    const complexd lhs = trace_of_product(o, m);
    const complexd rhs = trace_of_product(permute_subsystems(o, layout, perm),
                                          permute_subsystems(m, layout, perm));
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("permute_subsystems rejects bad permutations", "[linalg]") {
    const SubsystemLayout layout{{2, 2}};
    const ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    CHECK_THROWS_AS(permute_subsystems(m, layout, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(permute_subsystems(m, layout, {0}), std::invalid_argument);
    CHECK_THROWS_AS(permute_subsystems(m, layout, {0, 2}), std::invalid_argument);
}

TEST_CASE("partial_trace on product states", "[linalg]") {
    Rng rng(16);
    const ComplexMatrix a = random_complex(2, 2, rng);
    const ComplexMatrix b = random_complex(3, 3, rng);
    const SubsystemLayout layout{{2, 3}};

    const ComplexMatrix ta = partial_trace(kron(a, b), layout, {0});
    CHECK((ta - a * b.trace()).cwiseAbs().maxCoeff() < 1e-12);

    const ComplexMatrix tb = partial_trace(kron(a, b), layout, {1});
    CHECK((tb - b * a.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_trace keeps everything or preserves trace", "[linalg]") {
    Rng rng(17);
    const SubsystemLayout layout{{2, 2, 3}};
    const ComplexMatrix m = random_complex(12, 12, rng);

    CHECK(partial_trace(m, layout, {0, 1, 2}) == m);

    const ComplexMatrix reduced = partial_trace(m, layout, {1});
    CHECK(std::abs(reduced.trace() - m.trace()) < 1e-12);
}

TEST_CASE("partial_trace of Bell state gives maximally mixed marginals", "[linalg]") {
    const DensityMatrix bell = bell_diagonal(1.0, -1.0, 1.0);
    const ComplexMatrix ma = bell.marginal_a();
    const ComplexMatrix mb = bell.marginal_b();
    CHECK((ma - ComplexMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((mb - ComplexMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial_transpose_a on products and Bell states", "[linalg]") {
    Rng rng(18);
    const ComplexMatrix a = random_complex(2, 2, rng);
    const ComplexMatrix b = random_complex(3, 3, rng);
    const SubsystemLayout layout{{2, 3}};

    CHECK(partial_transpose_a(kron(a, b), layout) == kron(a.transpose().eval(), b));

    const ComplexMatrix m = random_complex(6, 6, rng);
    CHECK(partial_transpose_a(partial_transpose_a(m, layout), layout) == m);

    const DensityMatrix bell = bell_diagonal(1.0, -1.0, 1.0);
    const Eigen::VectorXd eigs =
        herm_eigenvalues(partial_transpose_a(bell.matrix(), bell.layout()));
    REQUIRE(eigs.size() == 4);
    CHECK(std::abs(eigs(0) + 0.5) < 1e-12);
    CHECK(std::abs(eigs(1) - 0.5) < 1e-12);
    CHECK(std::abs(eigs(3) - 0.5) < 1e-12);
}

TEST_CASE("herm_eigenvalues sums match traces", "[linalg]") {
    Rng rng(19);
    for (int rep = 0; rep < 5; ++rep) {
        const ComplexMatrix h = random_hermitian(5, rng);
        const Eigen::VectorXd eigs = herm_eigenvalues(h);
        CHECK(std::abs(eigs.sum() - h.trace().real()) < 1e-10);
        double sum3 = 0.0;
        for (int i = 0; i < eigs.size(); ++i) sum3 += eigs(i) * eigs(i) * eigs(i);
        CHECK(std::abs(sum3 - trace_power(h, 3).real()) < 1e-10);
        for (int i = 1; i < eigs.size(); ++i) CHECK(eigs(i - 1) <= eigs(i));
    }
}

TEST_CASE("herm_eigenvalues rejects non-Hermitian input", "[linalg]") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = complexd(1.0, 0.0);
    CHECK_THROWS_AS(herm_eigenvalues(m), std::invalid_argument);
}

TEST_CASE("trace helpers", "[linalg]") {
    Rng rng(20);
    const ComplexMatrix a = random_complex(4, 4, rng);
    const ComplexMatrix b = random_complex(4, 4, rng);
    CHECK(std::abs(trace_of_product(a, b) - (a * b).trace()) < 1e-12);
    CHECK(std::abs(trace_power(a, 3) - (a * a * a).trace()) < 1e-11);
    CHECK(std::abs(trace_power(ComplexMatrix::Identity(4, 4), 2) - complexd(4.0, 0.0)) < 1e-15);
    CHECK(std::abs(trace_norm(pauli(3)) - 2.0) < 1e-12);

    const ComplexMatrix h = random_hermitian(4, rng);
    const Eigen::VectorXd eigs = herm_eigenvalues(h);
    CHECK(std::abs(trace_norm(h) - eigs.cwiseAbs().sum()) < 1e-10);

    CHECK(std::abs(hs_norm_sq(a) - (a.adjoint() * a).trace().real()) < 1e-11);
}

TEST_CASE("hermiticity and unitarity predicates", "[linalg]") {
    Rng rng(21);
    CHECK(is_hermitian(random_hermitian(3, rng)));
    CHECK_FALSE(is_hermitian(random_complex(3, 3, rng)));
    CHECK(is_unitary(pauli(2)));
    CHECK_FALSE(is_unitary(2.0 * pauli(2)));
}

TEST_CASE("layout validation", "[linalg]") {
    const SubsystemLayout bad{{2, 3}};
    const ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    CHECK_THROWS_AS(partial_trace(m, bad, {0}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(m, SubsystemLayout{{2, 2}}, {1, 0}),
                    std::invalid_argument);

    const ComplexMatrix full = partial_trace(m, SubsystemLayout{{2, 2}}, {});
    REQUIRE(full.rows() == 1);
    CHECK(full(0, 0) == m.trace());
}
