#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rayleigh_ritz/matrix.hpp"
#include "rayleigh_ritz/model.hpp"

namespace rr {
namespace {

SymMatrix<Rational> sym(std::initializer_list<std::initializer_list<Rational>> rows) {
    const std::size_t n = rows.size();
    SymMatrix<Rational> s(n, Rational(0));
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const auto& v : row) {
            if (j >= i) s.set(i, j, v);
            ++j;
        }
        ++i;
    }
    return s;
}

oracle::RationalGrid grid(const SymMatrix<Rational>& s) {
    oracle::RationalGrid g(s.dim(), std::vector<Rational>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) g[i][j] = s(i, j);
    return g;
}

// (1/60) [[2, 1], [1, 4/7]]
SymMatrix<Rational> example_overlap() { return sym({{Rational(1, 30), Rational(1, 60)}, {Rational(1, 60), Rational(1, 105)}}); }

TEST(SymMatrix, StoresUpperTriangleSymmetrically) {
    SymMatrix<Rational> s(3, Rational(0));
    s.set(2, 0, Rational(5));
    EXPECT_EQ(s(0, 2), Rational(5));
    EXPECT_EQ(s(2, 0), Rational(5));
    EXPECT_THROW(SymMatrix<Rational>(0, Rational(0)), dimension_mismatch);
}

TEST(GramDeterminant, ExampleOverlap) { EXPECT_EQ(gram_determinant(example_overlap()), Rational(1, 25200)); }

TEST(GramDeterminant, Identity) { EXPECT_EQ(gram_determinant(SymMatrix<Rational>::identity(3, Rational(0))), Rational(1)); }

TEST(GramDeterminant, EqualRowsGiveZero) {
    const auto s = sym({{Rational(1), Rational(1), Rational(2)}, {Rational(1), Rational(1), Rational(2)}, {Rational(2), Rational(2), Rational(3)}});
    EXPECT_EQ(gram_determinant(s), Rational(0));
}

TEST(GramDeterminant, MatchesCofactorExpansion) {
    std::mt19937_64 rng(17);
    for (std::size_t n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 10; ++trial) {
            SymMatrix<Rational> s(n, Rational(0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) s.set(i, j, oracle::random_rational(rng));
            EXPECT_EQ(gram_determinant(s), oracle::cofactor_determinant(grid(s))) << "n=" << n;
        }
}

TEST(GramDeterminant, OverlapFamilyEqualsPivotProductAndIsPositive) {
    for (int n = 1; n <= 20; ++n) {
        const auto s = build_matrices({Rational(0), n}).overlap;
        const auto f = ldlt(s);
        Rational product(1);
        for (const auto& d : f.diag) product *= d;
        const Rational det = gram_determinant(s);
        EXPECT_EQ(det, product) << "n=" << n;
        EXPECT_GT(det, Rational(0));
        if (n <= 5) {
            EXPECT_EQ(det, oracle::cofactor_determinant(grid(s)));
        }
    }
}

TEST(Ldlt, Diagonal) {
    const auto f = ldlt(sym({{Rational(4), Rational(0)}, {Rational(0), Rational(9)}}));
    EXPECT_EQ(f.lower, Matrix<Rational>::identity(2, Rational(0)));
    EXPECT_EQ(f.diag, (std::vector<Rational>{Rational(4), Rational(9)}));
}

TEST(Ldlt, ExampleOverlapByHand) {
    const auto f = ldlt(example_overlap());
    EXPECT_EQ(f.diag[0], Rational(1, 30));
    EXPECT_EQ(f.diag[1], Rational(1, 840));
    EXPECT_EQ(f.lower(1, 0), Rational(1, 2));
}

TEST(Ldlt, IndefiniteHasNegativePivot) {
    const auto f = ldlt(sym({{Rational(1), Rational(2)}, {Rational(2), Rational(1)}}));
    EXPECT_EQ(f.diag[0], Rational(1));
    EXPECT_EQ(f.diag[1], Rational(-3));
}

TEST(Ldlt, ZeroPivotReportsLeadingMinor) {
    const auto s = sym({{Rational(1), Rational(1), Rational(0)}, {Rational(1), Rational(1), Rational(0)}, {Rational(0), Rational(0), Rational(1)}});
    try {
        ldlt(s);
        FAIL() << "expected zero_pivot";
    } catch (const zero_pivot& e) {
        EXPECT_EQ(e.minor(), 2u);
    }
}

TEST(Ldlt, ReconstructionIsExactForOverlapFamily) {
    for (int n = 1; n <= 20; ++n) {
        const auto s = build_matrices({Rational(1), n}).overlap;
        EXPECT_EQ(reconstruct(ldlt(s)), s.dense()) << "n=" << n;
    }
}

TEST(PositiveDefinite, OverlapFamily) {
    for (int n = 1; n <= 20; ++n) EXPECT_TRUE(is_positive_definite(build_matrices({Rational(0), n}).overlap));
}

TEST(PositiveDefinite, NegativeCases) {
    EXPECT_FALSE(is_positive_definite(sym({{Rational(1), Rational(2)}, {Rational(2), Rational(1)}})));
    EXPECT_FALSE(is_positive_definite(SymMatrix<Rational>(3, Rational(0))));
}

TEST(Products, IdentityAndMismatch) {
    const Matrix<Rational> a = example_overlap().dense();
    EXPECT_EQ(matmul(Matrix<Rational>::identity(2, Rational(0)), a), a);
    EXPECT_THROW(matmul(a, Matrix<Rational>(3, 1, Rational(0))), dimension_mismatch);
    const std::vector<Rational> x{Rational(1), Rational(-2)};
    EXPECT_EQ(matvec<Rational>(a, x), (std::vector<Rational>{Rational(0), Rational(1, 60) - Rational(2, 105)}));
    EXPECT_THROW(matvec<Rational>(a, std::vector<Rational>{Rational(1)}), dimension_mismatch);
}

TEST(Products, PrintedCoefficientsSatisfyBothIdentitiesExactly) {
    // C = sqrt(30) [[1, sqrt 7], [0, -2 sqrt 7]] = K diag(sqrt 30, sqrt 210) with K = [[1, 1], [0, -2]];
    // the two identities reduce to exact rational statements about K.
    const auto m = build_matrices({Rational(0), 2});
    Matrix<Rational> k(2, 2, Rational(0));
    k(0, 0) = Rational(1);
    k(0, 1) = Rational(1);
    k(1, 1) = Rational(-2);
    const Matrix<Rational> kt = transpose_conjugate(k);

    Matrix<Rational> scale(2, 2, Rational(0));  // diag(1/30, 1/210)
    scale(0, 0) = Rational(1, 30);
    scale(1, 1) = Rational(1, 210);
    EXPECT_EQ(matmul(matmul(kt, m.overlap.dense()), k), scale);

    Matrix<Rational> w(2, 2, Rational(0));
    w(0, 0) = Rational(5);
    w(1, 1) = Rational(21);
    EXPECT_EQ(matmul(matmul(kt, m.hamiltonian.dense()), k), matmul(scale, w));
    EXPECT_EQ(matmul(m.hamiltonian.dense(), k), matmul(matmul(m.overlap.dense(), k), w));
}

TEST(LuSolve, ExactInverseApplication) {
    const Matrix<Rational> s = example_overlap().dense();
    const Matrix<Rational> x = lu_solve(s, Matrix<Rational>::identity(2, Rational(0)));
    EXPECT_EQ(matmul(s, x), Matrix<Rational>::identity(2, Rational(0)));
    EXPECT_THROW(lu_solve(Matrix<Rational>(2, 2, Rational(0)), x), zero_pivot);
}

TEST(UnitLowerInverse, Exact) {
    const auto f = ldlt(build_matrices({Rational(0), 6}).overlap);
    EXPECT_EQ(matmul(unit_lower_inverse(f.lower), f.lower), Matrix<Rational>::identity(6, Rational(0)));
}

}  // namespace
}  // namespace rr
