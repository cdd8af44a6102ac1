#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mv/field.hpp"
#include "mv/series.hpp"

namespace mv {

// Polynomial expression over K in the coordinates x, y.
struct Expr {
    enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Pow };
    Op op = Op::Num;
    mpz_class num;      // Num, nonnegative
    char var = 0;       // Var: x, y, t or z
    long exp = 0;       // Pow exponent
    std::vector<Expr> args;

    static Expr number(long n);
    static Expr variable(char v);
    static Expr binary(Op op, Expr a, Expr b);
    bool operator==(const Expr& o) const = default;
};

struct BallAst {
    std::vector<Expr> center;
    long rad = 0;
    bool operator==(const BallAst& o) const = default;
};

struct SetAst {
    enum class Kind { Point, Box, Graph, Union, And, ValGe, AcEq, InBall };
    Kind kind = Kind::Point;
    std::vector<Expr> exprs;   // Point coordinates; ValGe/AcEq: [f] or [f, xi]; Graph: [f]
    std::vector<BallAst> balls;  // Box factors, Graph domain, InBall ball
    std::optional<long> tube;
    bool swap = false;
    long bound = 0;            // ValGe right-hand side
    char var = 0;              // InBall variable
    std::vector<SetAst> kids;  // Union, And
    bool operator==(const SetAst& o) const = default;
};

struct Program {
    const Field* F = nullptr;
    SetAst set;
};

// The header line "field Q" / "field F<q>" may be omitted when dflt is given.
Program parse(const std::string& text, const Field* dflt = nullptr);
std::string print(const Program& p);
std::string print(const SetAst& s);
std::string print(const Expr& e);

// Bivariate polynomial over K: (deg_x, deg_y) -> coefficient.
using BiPoly = std::map<std::pair<int, int>, Series>;
BiPoly eval_expr(const Expr& e, const Field* F);
Series eval_bipoly(const BiPoly& p, const Field* F, const std::vector<Series>& pt);

struct Cell {
    enum class Kind { Singleton, Box, Graph };
    Kind kind = Kind::Singleton;
    std::vector<Series> point;  // Singleton
    std::vector<Ball> box;      // Box: one-dimensional factors
    // Graph: {(x, f(x)) : x in domain}, or {(f(y), y)} when swap; with a
    // tube, {val(dep - f(param)) >= tube}.
    KPoly f;
    std::vector<Ball> domain;
    std::optional<long> tube;
    bool swap = false;

    static Cell singleton(std::vector<Series> p);
    static Cell make_box(std::vector<Ball> balls);
    static Cell graph(KPoly f, std::vector<Ball> domain, std::optional<long> tube = {}, bool swap = false);
    int dim(int n) const;
    std::string str() const;
};

struct CellSet {
    const Field* F = nullptr;
    int n = 2;
    std::vector<Cell> cells;

    int dim() const;  // -1 for the empty set
    bool contains(const std::vector<Series>& p) const;
    std::string str() const;
};

CellSet lower(const Program& p);
CellSet lower(const std::string& text, const Field* dflt = nullptr);
bool ast_contains(const SetAst& s, const Field* F, const std::vector<Series>& p);
int ambient_dim(const SetAst& s);

// |f'| <= 1 on D, from the Gauss valuation of f' around the center.
bool lipschitz_certificate(const KPoly& f, const Ball& D);
int dim(const CellSet& c);
// Smallest ball containing every cell; rad = VAL_INF for a single point.
Ball bounding_ball(const CellSet& c);
// X intersected with a ball of K^n.
CellSet restrict(const CellSet& X, const Ball& B);

// One-dimensional ball helpers.
std::optional<Ball> intersect(const Ball& a, const Ball& b);
// Drop nested balls and, over F_q, merge complete families of siblings.
std::vector<Ball> canonical_balls(const Field* F, std::vector<Ball> balls);
// {x in D : val h(x) >= c} as disjoint balls.
std::vector<Ball> val_ge_locus(const KPoly& h, const Ball& D, long c, int max_depth = 64);

}  // namespace mv
