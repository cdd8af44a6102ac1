#include <gtest/gtest.h>

#include "mv/errors.hpp"
#include "mv/presburger.hpp"

#include <random>

using namespace mv;

namespace {

LinForm r_times(long a, long b = 0) { return LinForm({a}, b); }
Guard r_ge(long lo) { return Guard::at_least(1, 0, lo); }

MotFun geometric(long a, long lo = 0, const CVal& c = CVal(1)) {
    MotFun f(1);
    f.add(r_ge(lo), c, r_times(a));
    return f;
}

MotElem L(long e) { return MotElem::L(e); }

}  // namespace

TEST(Presburger, Eval) {
    EXPECT_EQ(geometric(-1).eval1(3), CVal(L(-3)));
    MotFun parity(1);
    parity.add(r_ge(0) & Guard::congruent(1, 0, 0, 2), CVal(1), r_times(0));
    parity.add(r_ge(0) & Guard::congruent(1, 0, 1, 2), CVal(1), r_times(0, 1));
    EXPECT_EQ(parity.eval1(5), CVal(L(1)));
    EXPECT_EQ(parity.eval1(4), CVal(1));
    MotFun rf(1);
    rf.add_piece(Piece{r_ge(0), CVal(1), MPoly::var(1, 0), r_times(-1), 1});
    EXPECT_EQ(rf.eval1(2), CVal(L(-2) * MotElem(2)));
}

TEST(Presburger, SumGeometric) {
    MotFun s = sum_over(geometric(-2), 0, LinForm({0}, 0), std::nullopt);
    MotElem expect = L(2) * -MotElem::inv_one_minus_L(2);  // L^2/(L^2 - 1)
    EXPECT_EQ(s.eval({}), CVal(expect));
    // partial sums times (1 - L^-2) telescope
    MotElem partial(0);
    for (int r = 0; r < 6; ++r) partial += L(-2 * r);
    EXPECT_EQ(partial * (MotElem(1) - L(-2)), MotElem(1) - L(-12));
}

TEST(Presburger, SumFinite) {
    MotFun s = sum_over(geometric(-1), 0, LinForm({0}, 0), LinForm({0}, 2));
    EXPECT_EQ(s.eval({}), CVal(MotElem(1) + L(-1) + L(-2)));
}

TEST(Presburger, SumDivergent) {
    EXPECT_THROW(sum_over(geometric(1), 0, LinForm({0}, 0), std::nullopt), Divergent);
    EXPECT_THROW(sum_over(geometric(0), 0, LinForm({0}, 0), std::nullopt), Divergent);
}

TEST(Presburger, SumPolynomialWeight) {
    // sum_{r>=0} r L^{-r} = L^{-1}/(1-L^{-1})^2
    MotFun f(1);
    f.add_piece(Piece{r_ge(0), CVal(1), MPoly::var(1, 0), r_times(-1), 1});
    MotFun s = sum_over(f, 0, LinForm({0}, 0), std::nullopt);
    MotElem one_m = MotElem(1) - L(-1);
    MotElem expect = L(-1) * MotElem::inv_one_minus_L(-1) * MotElem::inv_one_minus_L(-1);
    EXPECT_EQ(s.eval({}).point_coeff(), expect);
    EXPECT_EQ(expect * one_m * one_m, L(-1));
    // finite sum of r^2 for r = 0..10 is 385
    MotFun g(1);
    g.add_piece(Piece{r_ge(0), CVal(1), MPoly::var(1, 0).pow(2), r_times(0), 1});
    EXPECT_EQ(sum_over(g, 0, LinForm({0}, 0), LinForm({0}, 10)).eval({}), CVal(385));
}

TEST(Presburger, SumWithCongruence) {
    // sum over even r >= 0 of L^{-r} = 1/(1 - L^-2)
    MotFun f(1);
    f.add(r_ge(0) & Guard::congruent(1, 0, 0, 2), CVal(1), r_times(-1));
    MotFun s = sum_over(f, 0, LinForm({0}, 0), std::nullopt);
    EXPECT_EQ(s.eval({}).point_coeff(), MotElem::inv_one_minus_L(-2));
}

TEST(Presburger, Limit) {
    Limit l1 = limit(geometric(-1));
    ASSERT_TRUE(l1.exists);
    EXPECT_TRUE(l1.value.is_zero());

    MotFun f = geometric(0);
    f.add_piece(Piece{r_ge(0), CVal(1), MPoly::var(1, 0), r_times(-1), 1});
    Limit l2 = limit(f);
    ASSERT_TRUE(l2.exists);
    EXPECT_EQ(l2.value, CVal(1));

    MotFun osc(1);
    osc.add(r_ge(0) & Guard::congruent(1, 0, 0, 2), CVal(1), r_times(0));
    osc.add(r_ge(0) & Guard::congruent(1, 0, 1, 2), CVal(1), r_times(0, 1));
    EXPECT_FALSE(limit(osc).exists);
    EXPECT_FALSE(limit(geometric(1)).exists);
}

TEST(Presburger, BoundedAndIncreasing) {
    EXPECT_EQ(is_bounded_by(geometric(-1), CVal(1)), Tri::True);
    MotFun f = geometric(0) - geometric(-1);  // 1 - L^-r
    EXPECT_EQ(is_increasing(f), Tri::True);
    EXPECT_EQ(is_bounded_by(f, CVal(1)), Tri::True);
    MotFun r(1);
    r.add_piece(Piece{r_ge(0), CVal(1), MPoly::var(1, 0), r_times(0), 1});
    EXPECT_EQ(is_bounded_by(r, CVal(5)), Tri::False);
    EXPECT_EQ(is_increasing(geometric(-1)), Tri::False);
}

TEST(Presburger, GeneratingSeries) {
    RationalSeries s = generating_series(geometric(-1));
    ASSERT_EQ(s.den.size(), 1u);
    EXPECT_EQ(s.den[0], std::make_pair(-1L, 1L));
    EXPECT_EQ(s.num.size(), 1u);
    for (int r = 0; r <= 5; ++r) EXPECT_EQ(s.coeff(r), L(-r));

    RationalSeries one = generating_series(geometric(0));
    EXPECT_EQ(one.den[0], std::make_pair(0L, 1L));

    // L^{-ceil(r/2)}
    MotFun c(1);
    c.add(r_ge(0) & Guard::congruent(1, 0, 0, 2), CVal(1), r_times(-1), 2);
    c.add(r_ge(0) & Guard::congruent(1, 0, 1, 2), CVal(1), r_times(-1, -1), 2);
    RationalSeries cs = generating_series(c);
    ASSERT_EQ(cs.den.size(), 1u);
    EXPECT_EQ(cs.den[0], std::make_pair(-1L, 2L));
    ASSERT_EQ(cs.num.size(), 2u);
    EXPECT_EQ(cs.num.at(0), MotElem(1));
    EXPECT_EQ(cs.num.at(1), L(-1));
    for (int r = 0; r <= 8; ++r) EXPECT_EQ(cs.coeff(r), L(-(r + 1) / 2));
}

namespace {

CVal random_nonneg_coeff(std::mt19937_64& rng) {
    switch (rng() % 4) {
        case 0: return CVal(1);
        case 1: return CVal(2);
        case 2: return CVal(MotElem(1) - L(-1));
        default: return CVal(L(-1));
    }
}

MotFun random_geometric(std::mt19937_64& rng, bool allow_growth) {
    MotFun f(1);
    int n = 1 + rng() % 3;
    for (int i = 0; i < n; ++i) {
        long a = -static_cast<long>(rng() % 3);
        if (allow_growth && rng() % 5 == 0) a = 1;
        long lo = rng() % 4;
        Guard g = r_ge(lo);
        if (rng() % 3 == 0) g = g & Guard::congruent(1, 0, rng() % 2, 2);
        f.add(g, random_nonneg_coeff(rng), r_times(a, static_cast<long>(rng() % 3) - 1));
    }
    return f;
}

}  // namespace

TEST(Presburger, FuzzSqueeze) {
    std::mt19937_64 rng(3);
    int hits = 0;
    for (int it = 0; it < 200; ++it) {
        MotFun f = random_geometric(rng, true), g = random_geometric(rng, true);
        Limit lfg = limit(f + g);
        if (lfg.exists && lfg.value.is_zero()) {
            ++hits;
            Limit lf = limit(f), lg = limit(g);
            ASSERT_TRUE(lf.exists && lg.exists);
            EXPECT_TRUE(lf.value.is_zero());
            EXPECT_TRUE(lg.value.is_zero());
        }
    }
    EXPECT_GT(hits, 10);
}

TEST(Presburger, FuzzMonotoneConvergence) {
    std::mt19937_64 rng(5);
    int hits = 0;
    for (int it = 0; it < 200; ++it) {
        // sum of c_i (1 - L^{-a_i r}) on r >= 0, plus random noise pieces
        MotFun f(1);
        CVal bound;
        int n = 1 + rng() % 3;
        for (int i = 0; i < n; ++i) {
            CVal c = random_nonneg_coeff(rng);
            long a = 1 + rng() % 2;
            f.add(r_ge(0), c, r_times(0));
            f.add(r_ge(0), -c, r_times(-a));
            bound += c;
        }
        if (rng() % 4 == 0) f = f + random_geometric(rng, true);
        if (is_increasing(f) == Tri::True && is_bounded_by(f, bound + CVal(2)) == Tri::True) {
            ++hits;
            EXPECT_TRUE(limit(f).exists);
        }
    }
    EXPECT_GT(hits, 100);
}

TEST(Presburger, FuzzSeriesCoefficients) {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 100; ++it) {
        MotFun f = random_geometric(rng, true);
        RationalSeries s = generating_series(f);
        for (int r = 0; r <= 10; ++r) EXPECT_EQ(s.coeff(r), f.eval1(r).point_coeff()) << f.str() << " r=" << r;
    }
}

TEST(Presburger, FubiniFiniteDoubleSum) {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 30; ++it) {
        MotFun f(2, {"a", "b"});
        int n = 1 + rng() % 3;
        for (int i = 0; i < n; ++i) {
            LinForm e({-static_cast<long>(rng() % 3), -static_cast<long>(rng() % 2)}, 0);
            Piece p{Guard(), random_nonneg_coeff(rng), MPoly::constant(2, MotElem(1)), e, 1};
            if (rng() % 2) p.poly = MPoly::var(2, 0) * MPoly::var(2, 1);
            f.add_piece(p);
        }
        long A = rng() % 4, B = rng() % 4;
        MotFun ab = sum_over(sum_over(f, 1, LinForm({0, 0}, 0), LinForm({0, 0}, B)), 0, LinForm({0}, 0), LinForm({0}, A));
        MotFun ba = sum_over(sum_over(f, 0, LinForm({0, 0}, 0), LinForm({0, 0}, A)), 0, LinForm({0}, 0), LinForm({0}, B));
        CVal direct;
        for (long a = 0; a <= A; ++a)
            for (long b = 0; b <= B; ++b) direct += f.eval({a, b});
        EXPECT_EQ(ab.eval({}), direct);
        EXPECT_EQ(ba.eval({}), direct);
    }
}

TEST(Presburger, NonConstantBounds) {
    // sum_{s=0}^{r} L^{-s} as a function of r
    MotFun f(2, {"r", "s"});
    f.add(Guard(), CVal(1), LinForm({0, -1}, 0));
    MotFun g = sum_over(f, 1, LinForm({0, 0}, 0), LinForm({1, 0}, 0));
    for (long r = 0; r < 6; ++r) {
        MotElem direct(0);
        for (long s = 0; s <= r; ++s) direct += L(-s);
        EXPECT_EQ(g.eval1(r), CVal(direct));
    }
    Limit l = limit(g);
    ASSERT_TRUE(l.exists);
    EXPECT_EQ(l.value.point_coeff(), MotElem::inv_one_minus_L(-1));
}
