#include <gtest/gtest.h>

#include <random>

#include "mv/dsl.hpp"
#include "mv/errors.hpp"

using namespace mv;

namespace {

Series S(const Field* F, std::map<long, long> t) {
    std::map<long, KElem> m;
    for (auto [e, c] : t) m[e] = F->from_int(c);
    return Series(F, m);
}

Expr random_expr(std::mt19937& rng, int depth) {
    int pick = static_cast<int>(rng() % (depth > 0 ? 8 : 2));
    switch (pick) {
        case 0: return Expr::number(static_cast<long>(rng() % 12));
        case 1: return Expr::variable("xyt"[rng() % 3]);
        case 2: return Expr::binary(Expr::Op::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 3: return Expr::binary(Expr::Op::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 4: return Expr::binary(Expr::Op::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 5: return Expr::binary(Expr::Op::Div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6: {
            Expr e;
            e.op = Expr::Op::Neg;
            e.args.push_back(random_expr(rng, depth - 1));
            return e;
        }
        default: {
            Expr e;
            e.op = Expr::Op::Pow;
            e.exp = static_cast<long>(rng() % 5) - 1;
            e.args.push_back(random_expr(rng, depth - 1));
            return e;
        }
    }
}

BallAst random_ball(std::mt19937& rng) {
    BallAst b;
    b.center.push_back(random_expr(rng, 2));
    b.rad = static_cast<long>(rng() % 5) - 1;
    return b;
}

SetAst random_set(std::mt19937& rng, int depth) {
    SetAst s;
    int pick = static_cast<int>(rng() % (depth > 0 ? 8 : 6));
    switch (pick) {
        case 0:
            s.kind = SetAst::Kind::Point;
            s.exprs = {random_expr(rng, 2), random_expr(rng, 2)};
            break;
        case 1:
            s.kind = SetAst::Kind::Box;
            s.balls = {random_ball(rng), random_ball(rng)};
            break;
        case 2:
            s.kind = SetAst::Kind::Graph;
            s.exprs = {random_expr(rng, 3)};
            s.balls = {random_ball(rng)};
            if (rng() % 2) s.balls.push_back(random_ball(rng));
            if (rng() % 2) s.tube = static_cast<long>(rng() % 4);
            s.swap = rng() % 3 == 0;
            break;
        case 3:
            s.kind = SetAst::Kind::ValGe;
            s.exprs = {random_expr(rng, 3)};
            s.bound = static_cast<long>(rng() % 7) - 2;
            break;
        case 4:
            s.kind = SetAst::Kind::AcEq;
            s.exprs = {random_expr(rng, 2), Expr::number(static_cast<long>(rng() % 5))};
            break;
        case 5:
            s.kind = SetAst::Kind::InBall;
            s.var = rng() % 2 ? 'x' : 'y';
            s.balls = {random_ball(rng)};
            break;
        default: {
            s.kind = pick == 6 ? SetAst::Kind::Union : SetAst::Kind::And;
            int k = 2 + static_cast<int>(rng() % 2);
            for (int i = 0; i < k; ++i) s.kids.push_back(random_set(rng, depth - 1));
        }
    }
    return s;
}

}  // namespace

TEST(Dsl, ParseExamples) {
    Program p = parse("field Q\ngraph(y = x^2, x in B(0,0))");
    EXPECT_EQ(p.set.kind, SetAst::Kind::Graph);
    EXPECT_EQ(p.F, Field::Q());
    p = parse("point(0,0) | graph(y = 0, x in B(0,0))", Field::Q());
    EXPECT_EQ(p.set.kind, SetAst::Kind::Union);
    EXPECT_EQ(p.set.kids.size(), 2u);
    p = parse("graph(y = x^2, x in B(0,0)) & val(y) >= 3", Field::Q());
    EXPECT_EQ(p.set.kind, SetAst::Kind::And);
    p = parse("field F<7>\nbox(B(z, 1))");
    EXPECT_EQ(p.F, Field::F(7));
}

TEST(Dsl, SyntaxErrorsCarryPositions) {
    try {
        parse("field Q\ngraph(y = x^2,\n  x in B(0 0))");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 12);
    }
    EXPECT_THROW(parse("graph(y = x^2, x in B(0,0))"), SyntaxError);  // no header
    EXPECT_THROW(parse("field Q\npoint(1,$)"), SyntaxError);
}

TEST(Dsl, RoundTripFuzz) {
    std::mt19937 rng(3);
    for (int i = 0; i < 400; ++i) {
        Program p{Field::Q(), random_set(rng, 3)};
        std::string text = print(p);
        Program back = parse(text);
        ASSERT_EQ(back.set, p.set) << text;
        ASSERT_EQ(print(back), text);
    }
}

TEST(Dsl, LowerExamples) {
    const Field* Q = Field::Q();
    CellSet X = lower("graph(y = x^2, x in B(0,0))", Q);
    ASSERT_EQ(X.cells.size(), 1u);
    EXPECT_EQ(X.cells[0].kind, Cell::Kind::Graph);
    EXPECT_TRUE(lipschitz_certificate(X.cells[0].f, X.cells[0].domain[0]));
    EXPECT_EQ(dim(X), 1);

    X = lower("val(y - x^2) >= 3 & x in B(0,0)", Q);
    ASSERT_EQ(X.cells.size(), 1u);
    EXPECT_EQ(X.cells[0].tube, 3);
    EXPECT_EQ(dim(X), 2);

    EXPECT_THROW(lower("val(x*y) >= 1", Q), Unsupported);

    X = lower("graph(y = x^2, x in B(0,0)) & val(y) >= 3", Q);
    ASSERT_EQ(X.cells.size(), 1u);
    ASSERT_EQ(X.cells[0].domain.size(), 1u);
    EXPECT_EQ(X.cells[0].domain[0], Ball::one_dim(Series(Q), 2));

    X = lower("graph(y = 0, x in B(0,0)) | point(1, 5)", Q);
    EXPECT_EQ(dim(X), 1);
    EXPECT_EQ(bounding_ball(lower("graph(y = 0, x in B(0,0))", Q)), Ball({Series(Q), Series(Q)}, 0));
    EXPECT_EQ(lower("box(B(0,1))", Q).n, 1);
}

TEST(Dsl, AutoSwapSteepLine) {
    const Field* Q = Field::Q();
    CellSet X = lower("graph(y = x/t, x in B(0,1))", Q);
    ASSERT_EQ(X.cells.size(), 1u);
    const Cell& c = X.cells[0];
    EXPECT_TRUE(c.swap);
    EXPECT_TRUE(lipschitz_certificate(c.f, c.domain[0]));
    EXPECT_EQ(c.domain[0].rad, 0);
    EXPECT_TRUE(X.contains({S(Q, {{1, 1}}), S(Q, {{0, 1}})}));
    EXPECT_THROW(lower("graph(y = x^2/t, x in B(0,0))", Q), Unsupported);
}

TEST(Dsl, SiblingDomainsMerge) {
    const Field* F = Field::F(2);
    CellSet X = lower("graph(y = 0, x in B(0,1) | B(1,1))", F);
    ASSERT_EQ(X.cells[0].domain.size(), 1u);
    EXPECT_EQ(X.cells[0].domain[0].rad, 0);
}

TEST(Dsl, LoweringPreservesMembership) {
    std::mt19937 rng(5);
    const Field* F = Field::F(3);
    const std::vector<std::string> programs = {
        "graph(y = x^2 + t, x in B(0,0))",
        "graph(y = t*x^3 - x, x in B(1,1) | B(0,2))",
        "val(y - x^2) >= 2 & x in B(0,0)",
        "box(B(0,1), B(1,0))",
        "point(0, 1) | point(t, t^2) | graph(y = t*x, x in B(0,0))",
        "graph(y = x^2, x in B(0,0)) & val(y) >= 3",
        "graph(y = x^2 + 1, x in B(0,0)) & ac(y) = 2",
        "graph(y = x^2 - 1, x in B(0,0)) & val(y) >= 2",
        "x in B(0,1) & y in B(t,2)",
        "val(x - 1) >= 1 & val(y) >= 0",
        "graph(y = x/t, x in B(0,1))",
        "(point(0,0) | point(1,1)) & val(x) >= 1",
    };
    auto rs = [&](long lo) {
        std::map<long, KElem> m;
        for (long e = lo; e < lo + 4; ++e) m[e] = KElem(static_cast<long>(rng() % 3));
        return Series(F, m);
    };
    for (const auto& text : programs) {
        Program p = parse(text, F);
        CellSet X = lower(p);
        int hits = 0;
        for (int i = 0; i < 100; ++i) {
            std::vector<Series> pt;
            if (X.n == 2) {
                Series x = rs(rng() % 2 ? 0 : -1);
                Series y = rs(0);
                if (i % 3 == 0) y = eval_bipoly(eval_expr(Expr::binary(Expr::Op::Mul, Expr::variable('x'),
                                                                      Expr::variable('x')),
                                                         F),
                                               F, {x, x});
                if (i % 3 == 1 && X.cells[0].kind == Cell::Kind::Graph) {
                    const Cell& c = X.cells[0];
                    Series s = c.domain[0].center[0] + x.shift(c.domain[0].rad);
                    y = c.f.eval(s);
                    x = s;
                    if (c.swap) std::swap(x, y);
                }
                pt = {x, y};
            } else {
                pt = {rs(0)};
            }
            bool a = ast_contains(p.set, F, pt);
            bool b = X.contains(pt);
            hits += a;
            ASSERT_EQ(a, b) << text << " at " << pt[0].str();
        }
        for (const auto& c : X.cells)
            if (c.kind == Cell::Kind::Graph)
                for (const auto& D : c.domain) EXPECT_TRUE(lipschitz_certificate(c.f, D));
        (void)hits;
    }
}

TEST(Dsl, RestrictToBall) {
    const Field* Q = Field::Q();
    CellSet X = lower("graph(y = 0, x in B(0,0)) | graph(y = t*x, x in B(0,0))", Q);
    CellSet R = restrict(X, Ball({S(Q, {{0, 1}}), Series(Q)}, 1));
    ASSERT_EQ(R.cells.size(), 2u);
    EXPECT_EQ(R.cells[0].domain[0], Ball::one_dim(S(Q, {{0, 1}}), 1));
    R = restrict(X, Ball({Series(Q), S(Q, {{0, 1}})}, 1));
    EXPECT_TRUE(R.cells.empty());
}

TEST(Dsl, AcLocusAccumulatingAtZeroIsUnsupported) {
    EXPECT_THROW(lower("graph(y = x, x in B(0,0)) & ac(y) = 2", Field::F(3)), Unsupported);
}
