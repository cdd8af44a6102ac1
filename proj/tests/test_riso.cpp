#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "mv/errors.hpp"
#include "mv/riso.hpp"

using namespace mv;

namespace {

Series S(const Field* F, std::map<long, long> t) {
    std::map<long, KElem> m;
    for (auto [e, c] : t) m[e] = F->from_int(c);
    return Series(F, m);
}

Ball B2(const Series& x, const Series& y, long r) { return Ball({x, y}, r); }

const char* kLine = "graph(y = 0, x in B(0,0))";
const char* kParabola = "graph(y = x^2, x in B(0,0))";
const char* kTwoLines = "graph(y = 0, x in B(0,0)) | graph(y = t*x, x in B(0,0))";
const char* kCubicUnion = "graph(y = t*(x^3 - x), x in B(0,0)) | graph(y = 0, x in B(0,0))";

// Random balls near X: centres on or close to a random cell.
Ball random_ball(std::mt19937& rng, const CellSet& X) {
    const Field* F = X.F;
    auto small = [&](long lo, int len) {
        std::map<long, KElem> m;
        for (long e = lo; e < lo + len; ++e) m[e] = F->from_int(static_cast<long>(rng() % 3) - 1);
        return Series(F, m);
    };
    long r = static_cast<long>(rng() % 6) - 2;
    Series x = small(rng() % 4 == 0 ? -1 : 0, 4);
    Series y = small(0, 3);
    const Cell& c = X.cells[rng() % X.cells.size()];
    if (c.kind == Cell::Kind::Graph && rng() % 4 != 0) y = c.f.eval(x) + small(r + 1, 2);
    if (c.kind == Cell::Kind::Singleton && rng() % 2) {
        x = c.point[0] + small(r + static_cast<long>(rng() % 2), 2);
        y = c.point[1];
    }
    return B2(x, y, r);
}

void check_characterization(const std::string& text, const Field* F, int trials, int seed) {
    CellSet X = lower(text, F);
    RisoReport rep = min_nonrisotrivial(X);
    std::mt19937 rng(seed);
    int nontrivial = 0;
    for (int i = 0; i < trials; ++i) {
        Ball B = random_ball(rng, X);
        bool nt = rtsp(X, B).dim() == 0;
        bool has = false;
        for (const auto& it : rep.items) has = has || it.inside(B);
        nontrivial += nt;
        ASSERT_EQ(nt, has) << text << " at " << B.str();
    }
    EXPECT_GT(nontrivial, 0) << text;
    EXPECT_LT(nontrivial, trials) << text;
}

}  // namespace

TEST(Riso, ReferenceExamples) {
    const Field* Q = Field::Q();
    auto t0 = std::chrono::steady_clock::now();
    RisoReport a = min_nonrisotrivial(lower(kLine, Q));
    ASSERT_EQ(a.items.size(), 1u);
    EXPECT_FALSE(a.items[0].singleton);
    EXPECT_EQ(a.items[0].ball, B2(Series(Q), Series(Q), -1));
    EXPECT_EQ(a.s0_class, CVal(1));

    RisoReport b = min_nonrisotrivial(lower(kParabola, Q));
    ASSERT_EQ(b.items.size(), 1u);
    EXPECT_EQ(b.items[0].ball, B2(Series(Q), Series(Q), 0));
    EXPECT_EQ(b.s0_class, CVal(1));

    RisoReport c = min_nonrisotrivial(lower(kTwoLines, Q));
    ASSERT_EQ(c.items.size(), 1u);
    EXPECT_TRUE(c.items[0].singleton);
    EXPECT_EQ(c.items[0].point, (std::vector<Series>{Series(Q), Series(Q)}));
    EXPECT_EQ(c.s0_class, CVal(1));

    RisoReport d = min_nonrisotrivial(lower(kCubicUnion, Q));
    ASSERT_EQ(d.items.size(), 3u);
    for (const auto& it : d.items) EXPECT_TRUE(it.singleton);
    EXPECT_EQ(d.s0_class, CVal(3));
    EXPECT_EQ(v0(lower("graph(y = t*(x^3 - x), x in B(0,0))", Q)), CVal(1));
    EXPECT_EQ(v0(lower(kLine, Q)), CVal(1));
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 4.0);
}

TEST(Riso, RtspExamples) {
    const Field* Q = Field::Q();
    CellSet line = lower(kLine, Q);
    RtspResult r = rtsp(line, B2(Series(Q), Series(Q), 0));
    ASSERT_EQ(r.dim(), 1);
    EXPECT_EQ(r.basis[0], (std::vector<KElem>{1, 0}));
    EXPECT_EQ(rtsp(line, B2(Series(Q), Series(Q), -1)).dim(), 0);
    EXPECT_EQ(rtsp(line, B2(Series(Q), S(Q, {{-1, 1}}), 0)).dim(), 2);  // misses X

    CellSet par = lower(kParabola, Q);
    EXPECT_EQ(rtsp(par, B2(Series(Q), Series(Q), 0)).dim(), 0);
    RtspResult sub = rtsp(par, B2(S(Q, {{0, 1}}), S(Q, {{0, 1}}), 1));
    ASSERT_EQ(sub.dim(), 1);
    EXPECT_EQ(sub.basis[0], (std::vector<KElem>{1, 2}));

    CellSet two = lower(kTwoLines, Q);
    EXPECT_EQ(rtsp(two, B2(S(Q, {{0, 1}}), Series(Q), 0)).dim(), 0);
    // away from the crossing the two lines are parallel up to a risometry
    RtspResult par2 = rtsp(two, B2(S(Q, {{0, 1}}), Series(Q), 1));
    EXPECT_EQ(par2.dim(), 1);
}

TEST(Riso, FiniteSetsAndLine) {
    const Field* Q = Field::Q();
    EXPECT_EQ(v0(lower("point(0,0) | point(1,2) | point(t,t)", Q)), CVal(3));
    CellSet K1 = lower("box(B(0,1)) | point(1/t)", Q);
    RisoReport rep = min_nonrisotrivial(K1);
    ASSERT_EQ(rep.items.size(), 2u);
    EXPECT_EQ(rep.s0_class, CVal(2));
    EXPECT_EQ(rtsp(K1, Ball::one_dim(Series(Q), 2)).dim(), 1);
    EXPECT_EQ(rtsp(K1, Ball::one_dim(Series(Q), 0)).dim(), 0);
    EXPECT_THROW(min_nonrisotrivial(lower("box(B(0,0), B(0,0))", Q)), Unsupported);
    EXPECT_THROW(min_nonrisotrivial(lower("val(y - x) >= 2 & x in B(0,0)", Q)), Unsupported);
}

TEST(Riso, RelativeV0) {
    const Field* Q = Field::Q();
    CellSet two = lower(kTwoLines, Q);
    EXPECT_EQ(v0_rel(two, B2(Series(Q), Series(Q), 1)), CVal(1));
    EXPECT_EQ(v0_rel(two, B2(S(Q, {{0, 1}}), Series(Q), 1)), CVal(0));
    // V0(X, B) <= V0(X cap B), with defect 1 when X is 1-riso-trivial on B
    std::vector<Ball> balls = {B2(Series(Q), Series(Q), 1), B2(S(Q, {{0, 1}}), Series(Q), 1),
                               B2(Series(Q), Series(Q), 0), B2(S(Q, {{0, 1}}), S(Q, {{0, 1}}), 0)};
    for (const auto& text : {kTwoLines, kParabola, kCubicUnion}) {
        CellSet X = lower(text, Q);
        for (const auto& B : balls) {
            CVal rel = v0_rel(X, B);
            CellSet XB = restrict(X, B);
            if (XB.cells.empty()) {
                EXPECT_EQ(rel, CVal(0));
                continue;
            }
            CVal whole = v0(XB);
            EXPECT_TRUE((whole - rel).is_nonneg()) << text << " " << B.str();
            if (rtsp(X, B).dim() >= 1) EXPECT_EQ(whole - rel, CVal(1)) << text << " " << B.str();
        }
    }
}

TEST(Riso, CharacterizationOnRandomBalls) {
    const Field* Q = Field::Q();
    for (const char* text : {kLine, kParabola, kTwoLines, kCubicUnion}) check_characterization(text, Q, 100, 3);
    check_characterization("graph(y = x^2 - t, x in B(0,0)) | graph(y = 0, x in B(0,0))", Q, 100, 4);
    check_characterization("graph(y = x, x in B(0,1)) | point(1, 1) | point(0, t)", Q, 100, 5);
    const Field* F = Field::F(3);
    check_characterization(kTwoLines, F, 100, 6);
    check_characterization("graph(y = x^3, x in B(0,0)) | graph(y = x, x in B(0,0))", F, 100, 7);
}

TEST(Riso, MinimalityOfBallItems) {
    const Field* Q = Field::Q();
    for (const char* text : {kLine, kParabola, "graph(y = x^2 - t, x in B(0,0)) | graph(y = 0, x in B(0,0))"}) {
        CellSet X = lower(text, Q);
        for (const auto& it : min_nonrisotrivial(X).items) {
            if (it.singleton) continue;
            EXPECT_EQ(rtsp(X, it.ball).dim(), 0);
            long s = it.ball.rad + 1;
            for (long u = -2; u <= 2; ++u) {
                Series x = it.ball.center[0] + Series::monomial(Q, it.ball.rad, u);
                for (const auto& c : X.cells) {
                    Ball child = B2(x, c.f.eval(x), s);
                    EXPECT_GE(rtsp(X, child).dim(), 1) << text << " " << child.str();
                }
            }
        }
    }
}

TEST(Riso, HenselSingletonAndItemBound) {
    const Field* Q = Field::Q();
    // y = x^2 + t x - t crosses y = 0 at a root of x^2 + t x - t: val 1/2, no root
    // in K, the separation keeps a constant valuation off the ball O^2.
    CellSet X = lower("graph(y = x - t - t^2*x^2, x in B(0,0)) | graph(y = 0, x in B(0,0))", Q);
    RisoReport rep = min_nonrisotrivial(X);
    ASSERT_EQ(rep.items.size(), 1u);
    ASSERT_TRUE(rep.items[0].singleton);
    EXPECT_FALSE(rep.items[0].point[0].exact());
    EXPECT_EQ(rep.items[0].point[0].val(), 1);
    // item count bounded by (number of branches) + sum of pairwise degree
    std::mt19937 rng(17);
    for (int i = 0; i < 30; ++i) {
        std::string f = std::to_string(rng() % 3) + "*t*x^3 + " + std::to_string(rng() % 3) + "*x^2 - t*x";
        std::string g = std::to_string(rng() % 2) + "*t*x^2";
        CellSet Y = lower("graph(y = " + f + ", x in B(0,0)) | graph(y = " + g + ", x in B(0,0))", Q);
        RisoReport r = min_nonrisotrivial(Y);
        EXPECT_LE(static_cast<int>(r.items.size()), 2 + 3);
    }
}
