#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "latsum/lattice.hpp"

using namespace latsum;

namespace {

const double kZeta3 = 1.2020569031595942854;

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

GenericLattice diag2(double a, double b)
{
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = a;
    B(1, 1) = b;
    return GenericLattice(B);
}

} // namespace

TEST(Enumerate, IntegerGrid)
{
    EXPECT_EQ(enumerate_points(integer_lattice(2), 1.0, Vec::Zero(2)).size(), 9u);
    EXPECT_EQ(enumerate_points(integer_lattice(3), 1.0, Vec::Zero(3)).size(), 27u);
}

TEST(Enumerate, ThetaLatticeMatchesFormula)
{
    ThetaLattice L{make_preset("sqrt2"), ThetaLattice::Role::primal};
    auto pts = enumerate_points(L, 1.5, Vec::Zero(2));
    std::set<std::pair<long, long>> want;
    double s = std::sqrt(2.0);
    for (long k = -3; k <= 3; ++k)
        for (long m = -10; m <= 10; ++m)
            if (std::abs(s * k - m) <= 1.5 && std::abs(double(k)) <= 1.5)
                want.insert({m, k});
    std::set<std::pair<long, long>> got;
    for (const auto& p : pts) {
        got.insert({long(p.k[0]), long(p.k[1])});
        EXPECT_NEAR(p.x(0), s * p.k[1] - p.k[0], 1e-12);
        EXPECT_NEAR(p.x(1), double(p.k[1]), 1e-12);
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(pts.size(), want.size());
}

TEST(Enumerate, LexicographicAndSinglePoint)
{
    auto pts = enumerate_points(integer_lattice(2), 2.0, Vec::Zero(2));
    for (std::size_t i = 1; i < pts.size(); ++i)
        EXPECT_LT(pts[i - 1].k, pts[i].k);
    ThetaLattice L{make_preset("sqrt3"), ThetaLattice::Role::primal};
    Vec c = L.generic().basis() * vec2(2.0, -3.0);
    auto one = enumerate_points(L, 0.0, c);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].k[0], 2);
    EXPECT_EQ(one[0].k[1], -3);
}

TEST(Enumerate, ResourceCap)
{
    double saved = point_cap();
    point_cap() = 1e4;
    EXPECT_THROW(enumerate_points(integer_lattice(3), 100.0, Vec::Zero(3)), ResourceError);
    point_cap() = saved;
}

TEST(CountPoints, Examples)
{
    EXPECT_EQ(count_points(integer_lattice(2), 0.4, Vec::Zero(2)), 1);
    EXPECT_EQ(count_points(integer_lattice(2), 0.5, Vec::Zero(2)), 1);
    EXPECT_EQ(count_points(integer_lattice(2), 1.0, Vec::Zero(2)), 9);
    EXPECT_EQ(count_points(integer_lattice(2), 1.0, vec2(0.5, 0.5)), 4);
    EXPECT_EQ(count_points(integer_lattice(3), 0.5, Vec::Constant(3, 0.5)), 8);
}

TEST(CountPoints, MonotoneInT)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10; ++i) {
        GenericLattice L = random_unimodular(3, rng);
        Vec u = Vec::Random(3);
        std::int64_t prev = 0;
        for (double t = 0.1; t < 4.0; t *= 1.3) {
            std::int64_t n = count_points(L, t, u);
            EXPECT_GE(n, prev);
            prev = n;
        }
    }
}

TEST(Lattice, UnimodularAndDuality)
{
    std::mt19937_64 rng(8);
    for (int d = 2; d <= 4; ++d) {
        GenericLattice L = random_unimodular(d, rng);
        EXPECT_NEAR(std::abs(L.determinant()), 1.0, 1e-12);
        auto a = enumerate_points(L, 1.5, Vec::Zero(d));
        auto b = enumerate_points(L.dual().dual(), 1.5, Vec::Zero(d));
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            double best = 1e9;
            for (const auto& q : b)
                best = std::min(best, (a[i].x - q.x).norm());
            EXPECT_LT(best, 1e-9);
        }
    }
}

TEST(Lattice, ThetaDualPairingIsIntegral)
{
    ThetaVector th = make_preset("sqrt2_sqrt3");
    auto P = enumerate_points(ThetaLattice{th, ThetaLattice::Role::primal}, 2.0, Vec::Zero(3));
    auto D = enumerate_points(ThetaLattice{th, ThetaLattice::Role::dual}, 2.0, Vec::Zero(3));
    ASSERT_GT(P.size(), 5u);
    ASSERT_GT(D.size(), 5u);
    for (const auto& x : P)
        for (const auto& y : D) {
            double s = x.x.dot(y.x);
            EXPECT_LT(std::abs(s - std::round(s)), 1e-10);
        }
    // dual points are (n, n_d - theta.n)
    for (const auto& y : D) {
        EXPECT_NEAR(y.x(0), double(y.k[0]), 1e-12);
        EXPECT_NEAR(y.x(2), double(y.k[2]) - th[0] * y.k[0] - th[1] * y.k[1], 1e-12);
    }
    // layers of the primal lattice: X in Z^{d-1} + x_d theta
    for (const auto& x : P)
        for (int j = 0; j < 2; ++j) {
            double r = x.x(j) - x.x(2) * th[j];
            EXPECT_LT(std::abs(r - std::round(r)), 1e-12);
        }
}

TEST(LLL, ProducesEquivalentBasis)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
        int d = 2 + i % 4;
        GenericLattice L = random_unimodular(d, rng, 3.0);
        Reduction r = lll_reduce(L.basis());
        EXPECT_TRUE(((L.basis() * r.unimodular) - r.basis).norm() < 1e-9 * (1 + L.basis().norm()));
        EXPECT_NEAR(std::abs(r.unimodular.determinant()), 1.0, 1e-9);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                EXPECT_EQ(r.unimodular(a, b), std::round(r.unimodular(a, b)));
    }
}

TEST(SuccessiveMinima, Examples)
{
    auto z = successive_minima(integer_lattice(3));
    for (double v : z.values)
        EXPECT_DOUBLE_EQ(v, 1.0);
    auto s = successive_minima(diag2(2.0, 0.5));
    EXPECT_DOUBLE_EQ(s.values[0], 0.5);
    EXPECT_DOUBLE_EQ(s.values[1], 2.0);
}

TEST(SuccessiveMinima, MinkowskiOnRandomLattices)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 30; ++i) {
        int d = 2 + i % 3;
        GenericLattice L = random_unimodular(d, rng);
        auto sm = successive_minima(L);
        double prod = 1.0;
        for (int j = 0; j < d; ++j) {
            prod *= sm.values[j];
            if (j)
                EXPECT_LE(sm.values[j - 1], sm.values[j]);
            EXPECT_NEAR(sm.witnesses[j].cwiseAbs().maxCoeff(), sm.values[j], 1e-12);
        }
        Mat W(d, d);
        for (int j = 0; j < d; ++j)
            W.col(j) = sm.witnesses[j];
        EXPECT_GT(std::abs(W.determinant()), 1e-9);
        EXPECT_GE(prod, 1.0 / factorial(d) * (1 - 1e-12));
        EXPECT_LE(prod, 1.0 + 1e-12);
        EXPECT_NEAR(first_minimum(L), sm.values[0], 1e-12);
    }
}

TEST(Mahler, Examples)
{
    auto z = mahler_check(integer_lattice(3));
    EXPECT_TRUE(z.ok);
    for (double p : z.products)
        EXPECT_DOUBLE_EQ(p, 1.0);
    auto g = mahler_check(diag2(2.0, 0.5));
    EXPECT_TRUE(g.ok);
    EXPECT_DOUBLE_EQ(g.products[0], 1.0);
    EXPECT_DOUBLE_EQ(g.products[1], 1.0);
    EXPECT_TRUE(mahler_check(ThetaLattice{make_preset("sqrt2"), ThetaLattice::Role::primal}.generic()).ok);
}

TEST(ElementarySum, BaselOneDimensional)
{
    auto r = elementary_sum(integer_lattice(1), 2.0, 1.0, Vec::Zero(1), 1e-10);
    EXPECT_NEAR(r.value, kPi * kPi / 3.0 - 1.0, 1e-8);
    EXPECT_GE(r.tail_bound, 0.0);
}

TEST(ElementarySum, HalfIntegerShiftClosedForm)
{
    // shells |x|_inf = k + 1/2 hold 8k + 4 points
    double want = 4 * kPi * kPi + 32 - 56 * kZeta3;
    auto r = elementary_sum(integer_lattice(2), 3.0, 1.0, vec2(0.5, 0.5), 1e-10);
    EXPECT_NEAR(r.value, want, 1e-8);
}

TEST(ElementarySum, LimitsAndErrors)
{
    auto big = elementary_sum(integer_lattice(2), 3.0, 1e9, Vec::Zero(2), 1e-10);
    EXPECT_NEAR(big.value, 1.0, 1e-8);
    EXPECT_THROW(elementary_sum(integer_lattice(2), 2.0, 1.0, Vec::Zero(2), 1e-8), DomainError);
    std::mt19937_64 rng(2);
    GenericLattice L = random_unimodular(2, rng);
    double prev = 1e300;
    for (double nu : {0.5, 1.0, 2.0, 4.0}) {
        double v = elementary_sum(L, 3.5, nu, Vec::Zero(2), 1e-9).value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

// N(t, L) <= C (t^d + lambda_1(dual)^{-d}): calibrate C on one batch, assert
// with headroom on another
TEST(PointCounting, CountingBoundFunctionalForm)
{
    std::mt19937_64 rng(17);
    for (int d = 2; d <= 3; ++d) {
        auto ratio = [&](const GenericLattice& L, double t) {
            double l1 = first_minimum(L.dual());
            return double(count_points(L, t, Vec::Zero(d))) / (std::pow(t, d) + std::pow(l1, -d));
        };
        double C = 0.0;
        for (int i = 0; i < 20; ++i) {
            GenericLattice L = random_unimodular(d, rng, 2.0);
            for (double t : {0.1, 0.5, 1.0, 3.0})
                C = std::max(C, ratio(L, t));
        }
        for (int i = 0; i < 20; ++i) {
            GenericLattice L = random_unimodular(d, rng, 2.0);
            for (double t : {0.2, 0.7, 2.0, 5.0})
                EXPECT_LE(ratio(L, t), 2.0 * C);
        }
    }
}
