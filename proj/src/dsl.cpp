#include "mv/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "mv/errors.hpp"

namespace mv {

Expr Expr::number(long n) {
    Expr e;
    e.op = Op::Num;
    e.num = n;
    return e;
}

Expr Expr::variable(char v) {
    Expr e;
    e.op = Op::Var;
    e.var = v;
    return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    Expr e;
    e.op = op;
    e.args = {std::move(a), std::move(b)};
    return e;
}

// ---------------------------------------------------------------- lexer

namespace {

struct Tok {
    enum class K { Ident, Int, Sym, End } k = K::End;
    std::string s;
    int line = 1, col = 1;
};

std::vector<Tok> tokenize(const std::string& text) {
    std::vector<Tok> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t n) {
        for (size_t j = 0; j < n; ++j, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') adv(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        Tok t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            t.k = Tok::K::Ident;
            t.s = text.substr(i, j - i);
            adv(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.k = Tok::K::Int;
            t.s = text.substr(i, j - i);
            adv(j - i);
        } else if (c == '>' && i + 1 < text.size() && text[i + 1] == '=') {
            t.k = Tok::K::Sym;
            t.s = ">=";
            adv(2);
        } else if (std::string("()[],=&|+-*/^<>").find(c) != std::string::npos) {
            t.k = Tok::K::Sym;
            t.s = std::string(1, c);
            adv(1);
        } else {
            throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
        }
        out.push_back(t);
    }
    Tok end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Tok> toks) : t_(std::move(toks)) {}

    Program program(const Field* dflt) {
        Program p;
        p.F = dflt;
        if (is_ident("field")) {
            next();
            const Field* F = header_field();
            if (dflt && dflt != F)
                throw UsageError("residue field " + F->name() + " in the header conflicts with " + dflt->name());
            p.F = F;
        }
        if (!p.F) fail(peek(), "missing header line 'field Q' or 'field F<q>'");
        p.set = set();
        if (peek().k != Tok::K::End) fail(peek(), "unexpected '" + peek().s + "'");
        return p;
    }

private:
    const Tok& peek() const { return t_[pos_]; }
    Tok next() { return t_[pos_++]; }
    [[noreturn]] void fail(const Tok& t, const std::string& msg) const { throw SyntaxError(t.line, t.col, msg); }
    bool is_sym(const char* s) const { return peek().k == Tok::K::Sym && peek().s == s; }
    bool is_ident(const char* s) const { return peek().k == Tok::K::Ident && peek().s == s; }
    void expect_sym(const char* s) {
        if (!is_sym(s)) fail(peek(), std::string("expected '") + s + "'");
        next();
    }
    void expect_ident(const char* s) {
        if (!is_ident(s)) fail(peek(), std::string("expected '") + s + "'");
        next();
    }

    const Field* header_field() {
        Tok t = next();
        if (t.k != Tok::K::Ident) fail(t, "expected Q or F<q> after 'field'");
        std::string name = t.s;
        if (name == "F" && is_sym("<")) {
            next();
            Tok q = next();
            if (q.k != Tok::K::Int) fail(q, "expected the field size");
            expect_sym(">");
            name = "F" + q.s;
        }
        try {
            return Field::parse(name);
        } catch (const Error& e) {
            fail(t, e.what());
        }
    }

    long signed_int() {
        bool neg = false;
        if (is_sym("-")) {
            next();
            neg = true;
        }
        Tok t = next();
        if (t.k != Tok::K::Int) fail(t, "expected an integer");
        if (t.s.size() > 15) fail(t, "integer out of range");
        long v = std::stol(t.s);
        return neg ? -v : v;
    }

    SetAst set() {
        SetAst first = conj();
        if (!is_sym("|")) return first;
        SetAst u;
        u.kind = SetAst::Kind::Union;
        u.kids.push_back(std::move(first));
        while (is_sym("|")) {
            next();
            u.kids.push_back(conj());
        }
        return u;
    }

    SetAst conj() {
        SetAst first = prim();
        if (!is_sym("&")) return first;
        SetAst a;
        a.kind = SetAst::Kind::And;
        a.kids.push_back(std::move(first));
        while (is_sym("&")) {
            next();
            a.kids.push_back(prim());
        }
        return a;
    }

    SetAst prim() {
        SetAst s;
        const Tok& t = peek();
        if (is_sym("(")) {
            next();
            s = set();
            expect_sym(")");
            return s;
        }
        if (t.k != Tok::K::Ident) fail(t, "expected a set");
        if (t.s == "point") {
            next();
            s.kind = SetAst::Kind::Point;
            expect_sym("(");
            s.exprs.push_back(expr());
            while (is_sym(",")) {
                next();
                s.exprs.push_back(expr());
            }
            expect_sym(")");
        } else if (t.s == "box") {
            next();
            s.kind = SetAst::Kind::Box;
            expect_sym("(");
            s.balls.push_back(ball());
            while (is_sym(",")) {
                next();
                s.balls.push_back(ball());
            }
            expect_sym(")");
        } else if (t.s == "graph") {
            next();
            s.kind = SetAst::Kind::Graph;
            expect_sym("(");
            expect_ident("y");
            expect_sym("=");
            s.exprs.push_back(expr());
            expect_sym(",");
            expect_ident("x");
            expect_ident("in");
            s.balls.push_back(ball());
            while (is_sym("|")) {
                next();
                s.balls.push_back(ball());
            }
            while (is_sym(",")) {
                next();
                if (is_ident("tube")) {
                    next();
                    expect_sym("=");
                    s.tube = signed_int();
                } else if (is_ident("swap")) {
                    next();
                    s.swap = true;
                } else {
                    fail(peek(), "expected 'tube = n' or 'swap'");
                }
            }
            expect_sym(")");
        } else if (t.s == "val") {
            next();
            s.kind = SetAst::Kind::ValGe;
            expect_sym("(");
            s.exprs.push_back(expr());
            expect_sym(")");
            expect_sym(">=");
            s.bound = signed_int();
        } else if (t.s == "ac") {
            next();
            s.kind = SetAst::Kind::AcEq;
            expect_sym("(");
            s.exprs.push_back(expr());
            expect_sym(")");
            expect_sym("=");
            s.exprs.push_back(expr());
        } else if (t.s == "x" || t.s == "y") {
            next();
            s.kind = SetAst::Kind::InBall;
            s.var = t.s[0];
            expect_ident("in");
            s.balls.push_back(ball());
        } else {
            fail(t, "unknown constructor '" + t.s + "'");
        }
        return s;
    }

    BallAst ball() {
        BallAst b;
        expect_ident("B");
        expect_sym("(");
        if (is_sym("(")) {
            next();
            b.center.push_back(expr());
            while (is_sym(",")) {
                next();
                b.center.push_back(expr());
            }
            expect_sym(")");
            // "B((e)..., r)" starts a scalar with a parenthesized factor.
            if (b.center.size() == 1) {
                Expr e = std::move(b.center[0]);
                b.center.clear();
                b.center.push_back(rest_of_sum(rest_of_term(power_of(std::move(e)))));
            }
        } else {
            b.center.push_back(expr());
        }
        expect_sym(",");
        b.rad = signed_int();
        expect_sym(")");
        return b;
    }

    Expr expr() { return rest_of_sum(term()); }

    Expr rest_of_sum(Expr lhs) {
        while (is_sym("+") || is_sym("-")) {
            Expr::Op op = next().s == "+" ? Expr::Op::Add : Expr::Op::Sub;
            lhs = Expr::binary(op, std::move(lhs), term());
        }
        return lhs;
    }

    Expr term() { return rest_of_term(unary()); }

    Expr rest_of_term(Expr lhs) {
        while (is_sym("*") || is_sym("/")) {
            Expr::Op op = next().s == "*" ? Expr::Op::Mul : Expr::Op::Div;
            lhs = Expr::binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr unary() {
        if (is_sym("-")) {
            next();
            Expr e;
            e.op = Expr::Op::Neg;
            e.args.push_back(unary());
            return e;
        }
        return power_of(atom());
    }

    Expr power_of(Expr base) {
        if (is_sym("^")) {
            next();
            Expr e;
            e.op = Expr::Op::Pow;
            e.exp = signed_int();
            e.args.push_back(std::move(base));
            return e;
        }
        return base;
    }

    Expr atom() {
        Tok t = next();
        if (t.k == Tok::K::Int) {
            Expr e;
            e.num = mpz_class(t.s);
            return e;
        }
        if (t.k == Tok::K::Ident && t.s.size() == 1 && std::string("xytz").find(t.s[0]) != std::string::npos)
            return Expr::variable(t.s[0]);
        if (t.k == Tok::K::Sym && t.s == "(") {
            Expr e = expr();
            expect_sym(")");
            return e;
        }
        fail(t, t.k == Tok::K::End ? "unexpected end of input" : "unexpected '" + t.s + "'");
    }

    std::vector<Tok> t_;
    size_t pos_ = 0;
};

// ---------------------------------------------------------------- printer

int prec(const Expr& e) {
    switch (e.op) {
        case Expr::Op::Add:
        case Expr::Op::Sub: return 1;
        case Expr::Op::Mul:
        case Expr::Op::Div: return 2;
        case Expr::Op::Neg: return 3;
        case Expr::Op::Pow: return 4;
        default: return 5;
    }
}

std::string wrap(const Expr& e, int min_prec) {
    std::string s = print(e);
    return prec(e) < min_prec ? "(" + s + ")" : s;
}

std::string print_ball(const BallAst& b) {
    std::ostringstream os;
    os << "B(";
    if (b.center.size() == 1) {
        os << print(b.center[0]);
    } else {
        os << "(";
        for (size_t i = 0; i < b.center.size(); ++i) os << (i ? ", " : "") << print(b.center[i]);
        os << ")";
    }
    os << ", " << b.rad << ")";
    return os.str();
}

int set_prec(const SetAst& s) {
    if (s.kind == SetAst::Kind::Union) return 1;
    if (s.kind == SetAst::Kind::And) return 2;
    return 3;
}

}  // namespace

Program parse(const std::string& text, const Field* dflt) { return Parser(tokenize(text)).program(dflt); }

std::string print(const Expr& e) {
    switch (e.op) {
        case Expr::Op::Num: return e.num.get_str();
        case Expr::Op::Var: return std::string(1, e.var);
        case Expr::Op::Add: return wrap(e.args[0], 1) + " + " + wrap(e.args[1], 2);
        case Expr::Op::Sub: return wrap(e.args[0], 1) + " - " + wrap(e.args[1], 2);
        case Expr::Op::Mul: return wrap(e.args[0], 2) + "*" + wrap(e.args[1], 3);
        case Expr::Op::Div: return wrap(e.args[0], 2) + "/" + wrap(e.args[1], 3);
        case Expr::Op::Neg: return "-" + wrap(e.args[0], 3);
        case Expr::Op::Pow: return wrap(e.args[0], 5) + "^" + std::to_string(e.exp);
    }
    return "";
}

std::string print(const SetAst& s) {
    std::ostringstream os;
    auto kid = [&](const SetAst& k) {
        std::string r = print(k);
        return set_prec(k) <= set_prec(s) ? "(" + r + ")" : r;
    };
    switch (s.kind) {
        case SetAst::Kind::Point:
            os << "point(";
            for (size_t i = 0; i < s.exprs.size(); ++i) os << (i ? ", " : "") << print(s.exprs[i]);
            os << ")";
            break;
        case SetAst::Kind::Box:
            os << "box(";
            for (size_t i = 0; i < s.balls.size(); ++i) os << (i ? ", " : "") << print_ball(s.balls[i]);
            os << ")";
            break;
        case SetAst::Kind::Graph:
            os << "graph(y = " << print(s.exprs[0]) << ", x in ";
            for (size_t i = 0; i < s.balls.size(); ++i) os << (i ? " | " : "") << print_ball(s.balls[i]);
            if (s.tube) os << ", tube = " << *s.tube;
            if (s.swap) os << ", swap";
            os << ")";
            break;
        case SetAst::Kind::Union:
        case SetAst::Kind::And:
            for (size_t i = 0; i < s.kids.size(); ++i)
                os << (i ? (s.kind == SetAst::Kind::Union ? " | " : " & ") : "") << kid(s.kids[i]);
            break;
        case SetAst::Kind::ValGe: os << "val(" << print(s.exprs[0]) << ") >= " << s.bound; break;
        case SetAst::Kind::AcEq: os << "ac(" << print(s.exprs[0]) << ") = " << print(s.exprs[1]); break;
        case SetAst::Kind::InBall: os << s.var << " in " << print_ball(s.balls[0]); break;
    }
    return os.str();
}

std::string print(const Program& p) { return "field " + p.F->name() + "\n" + print(p.set) + "\n"; }

// ---------------------------------------------------------------- evaluation

namespace {

void bp_add_term(BiPoly& p, std::pair<int, int> k, const Series& c) {
    auto it = p.find(k);
    Series v = it == p.end() ? c : it->second + c;
    if (v.is_zero()) {
        if (it != p.end()) p.erase(it);
    } else {
        p[k] = v;
    }
}

BiPoly bp_add(const BiPoly& a, const BiPoly& b, bool sub = false) {
    BiPoly r = a;
    for (const auto& [k, c] : b) bp_add_term(r, k, sub ? -c : c);
    return r;
}

BiPoly bp_mul(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) bp_add_term(r, {ka.first + kb.first, ka.second + kb.second}, ca * cb);
    return r;
}

BiPoly bp_const(const Series& c) {
    BiPoly r;
    if (!c.is_zero()) r[{0, 0}] = c;
    return r;
}

std::optional<Series> inverse_monomial(const Series& a) {
    if (!a.exact() || a.terms().size() != 1) return std::nullopt;
    auto [e, c] = *a.terms().begin();
    return Series::monomial(a.field(), -e, a.field()->inv(c));
}

std::optional<Series> as_constant(const BiPoly& p, const Field* F) {
    if (p.empty()) return Series(F);
    if (p.size() == 1 && p.begin()->first == std::make_pair(0, 0)) return p.begin()->second;
    return std::nullopt;
}

}  // namespace

BiPoly eval_expr(const Expr& e, const Field* F) {
    switch (e.op) {
        case Expr::Op::Num: return bp_const(Series::constant(F, F->from_rational(mpq_class(e.num))));
        case Expr::Op::Var:
            switch (e.var) {
                case 'x': return {{{1, 0}, Series::constant(F, 1)}};
                case 'y': return {{{0, 1}, Series::constant(F, 1)}};
                case 't': return bp_const(Series::monomial(F, 1));
                default:
                    if (F->is_Q()) throw Unsupported("the generator z exists only over F_q");
                    return bp_const(Series::constant(F, F->generator()));
            }
        case Expr::Op::Add: return bp_add(eval_expr(e.args[0], F), eval_expr(e.args[1], F));
        case Expr::Op::Sub: return bp_add(eval_expr(e.args[0], F), eval_expr(e.args[1], F), true);
        case Expr::Op::Mul: return bp_mul(eval_expr(e.args[0], F), eval_expr(e.args[1], F));
        case Expr::Op::Neg: return bp_add(BiPoly{}, eval_expr(e.args[0], F), true);
        case Expr::Op::Div: {
            auto d = as_constant(eval_expr(e.args[1], F), F);
            auto inv = d ? inverse_monomial(*d) : std::nullopt;
            if (!inv) throw Unsupported("division only by nonzero monomials c*t^e: " + print(e));
            return bp_mul(eval_expr(e.args[0], F), bp_const(*inv));
        }
        case Expr::Op::Pow: {
            BiPoly base = eval_expr(e.args[0], F);
            long k = e.exp;
            if (k < 0) {
                auto c = as_constant(base, F);
                auto inv = c ? inverse_monomial(*c) : std::nullopt;
                if (!inv) throw Unsupported("negative powers only of nonzero monomials: " + print(e));
                base = bp_const(*inv);
                k = -k;
            }
            BiPoly r = bp_const(Series::constant(F, 1));
            for (long i = 0; i < k; ++i) r = bp_mul(r, base);
            return r;
        }
    }
    return {};
}

Series eval_bipoly(const BiPoly& p, const Field* F, const std::vector<Series>& pt) {
    Series r(F);
    for (const auto& [k, c] : p) {
        Series term = c;
        for (int i = 0; i < k.first; ++i) term = term * pt.at(0);
        for (int j = 0; j < k.second; ++j) term = term * pt.at(1);
        r = r + term;
    }
    return r;
}

// ---------------------------------------------------------------- cells

Cell Cell::singleton(std::vector<Series> p) {
    Cell c;
    c.kind = Kind::Singleton;
    c.point = std::move(p);
    return c;
}

Cell Cell::make_box(std::vector<Ball> balls) {
    Cell c;
    c.kind = Kind::Box;
    c.box = std::move(balls);
    return c;
}

Cell Cell::graph(KPoly f, std::vector<Ball> domain, std::optional<long> tube, bool swap) {
    Cell c;
    c.kind = Kind::Graph;
    c.f = std::move(f);
    c.domain = std::move(domain);
    c.tube = tube;
    c.swap = swap;
    return c;
}

int Cell::dim(int n) const {
    switch (kind) {
        case Kind::Singleton: return 0;
        case Kind::Box: return n;
        case Kind::Graph: return tube ? n : 1;
    }
    return 0;
}

std::string Cell::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Singleton:
            os << "point(";
            for (size_t i = 0; i < point.size(); ++i) os << (i ? ", " : "") << point[i].str();
            os << ")";
            break;
        case Kind::Box:
            os << "box(";
            for (size_t i = 0; i < box.size(); ++i)
                os << (i ? ", " : "") << "B(" << box[i].center[0].str() << ", " << box[i].rad << ")";
            os << ")";
            break;
        case Kind::Graph:
            os << "graph(y = " << f.str() << ", x in ";
            for (size_t i = 0; i < domain.size(); ++i)
                os << (i ? " | " : "") << "B(" << domain[i].center[0].str() << ", " << domain[i].rad << ")";
            if (tube) os << ", tube = " << *tube;
            if (swap) os << ", swap";
            os << ")";
            break;
    }
    return os.str();
}

namespace {

bool cell_contains(const Cell& c, const std::vector<Series>& p) {
    switch (c.kind) {
        case Cell::Kind::Singleton: return c.point == p;
        case Cell::Kind::Box:
            for (size_t i = 0; i < c.box.size(); ++i)
                if (!c.box[i].contains({p[i]})) return false;
            return true;
        case Cell::Kind::Graph: {
            const Series& s = p[c.swap ? 1 : 0];
            const Series& d = p[c.swap ? 0 : 1];
            bool in = false;
            for (const auto& B : c.domain) in = in || B.contains({s});
            if (!in) return false;
            Series diff = d - c.f.eval(s);
            if (c.tube) return diff.is_zero() || diff.val() >= *c.tube;
            return diff.is_zero();
        }
    }
    return false;
}

}  // namespace

int CellSet::dim() const {
    int d = -1;
    for (const auto& c : cells) d = std::max(d, c.dim(n));
    return d;
}

bool CellSet::contains(const std::vector<Series>& p) const {
    for (const auto& c : cells)
        if (cell_contains(c, p)) return true;
    return false;
}

std::string CellSet::str() const {
    if (cells.empty()) return "empty";
    std::string s;
    for (size_t i = 0; i < cells.size(); ++i) s += (i ? " | " : "") + cells[i].str();
    return s;
}

int dim(const CellSet& c) { return c.dim(); }

// ---------------------------------------------------------------- balls

std::optional<Ball> intersect(const Ball& a, const Ball& b) {
    if (a.contains(b)) return b;
    if (b.contains(a)) return a;
    return std::nullopt;
}

std::vector<Ball> canonical_balls(const Field* F, std::vector<Ball> balls) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::sort(balls.begin(), balls.end());
        std::vector<Ball> kept;
        for (const auto& b : balls) {
            bool inside = false;
            for (const auto& k : kept) inside = inside || k.contains(b);
            if (!inside) kept.push_back(b);
        }
        balls = kept;
        if (F->is_Q()) break;
        std::map<Ball, std::set<Ball>> fam;
        for (const auto& b : balls)
            if (b.rad != VAL_INF) fam[Ball(b.center, b.rad - 1)].insert(b);
        for (const auto& [parent, kids] : fam) {
            if (static_cast<int>(kids.size()) == F->q()) {
                std::vector<Ball> next;
                for (const auto& b : balls)
                    if (!kids.count(b)) next.push_back(b);
                next.push_back(parent);
                balls = next;
                changed = true;
                break;
            }
        }
    }
    return balls;
}

std::vector<Ball> val_ge_locus(const KPoly& h, const Ball& D, long c, int max_depth) {
    std::vector<Ball> out;
    const Field* F = h.F ? h.F : D.center[0].field();
    auto rec = [&](auto&& self, const Series& a, long s, int depth) -> void {
        if (depth > max_depth) throw Unsupported("valuation locus does not stabilize within the depth cap");
        Expansion E = expand(h, a, s);
        if (E.h.is_zero() || E.m >= c) {
            out.push_back(Ball::one_dim(a, s));
            return;
        }
        if (E.w == 0) return;
        for (const auto& [z, mult] : roots_in_k(E.red))
            self(self, a + Series::monomial(F, s, z), s + 1, depth + 1);
    };
    rec(rec, D.center[0], D.rad, 0);
    return canonical_balls(F, out);
}

namespace {

std::vector<Ball> ac_locus(const KPoly& h, const Ball& D, const KElem& xi, int max_depth = 64) {
    std::vector<Ball> out;
    const Field* F = D.center[0].field();
    if (xi == 0 || h.is_zero()) return out;
    auto rec = [&](auto&& self, const Series& a, long s, int depth) -> void {
        if (depth > max_depth) throw Unsupported("angular component locus accumulates at a zero");
        Expansion E = expand(h, a, s);
        if (E.w == 0) {
            if (E.red.c[0] == xi) out.push_back(Ball::one_dim(a, s));
            return;
        }
        auto child = [&](const KElem& z) { return a + Series::monomial(F, s, z); };
        if (F->is_Q()) {
            KUPoly shifted = E.red - KUPoly(F, {xi});
            for (const auto& [z, mult] : roots_in_k(shifted)) out.push_back(Ball::one_dim(child(z), s + 1));
            for (const auto& [z, mult] : roots_in_k(E.red)) self(self, child(z), s + 1, depth + 1);
        } else {
            for (const auto& z : F->elements()) {
                KElem v = E.red.eval(z);
                if (v == xi) out.push_back(Ball::one_dim(child(z), s + 1));
                else if (v == 0) self(self, child(z), s + 1, depth + 1);
            }
        }
    };
    rec(rec, D.center[0], D.rad, 0);
    return canonical_balls(F, out);
}

}  // namespace

bool lipschitz_certificate(const KPoly& f, const Ball& D) {
    KPoly d = f.derivative();
    if (d.is_zero()) return true;
    return expand(d, D.center[0], D.rad).m >= 0;
}

// ---------------------------------------------------------------- lowering

namespace {

bool is_atom(const SetAst& s) {
    return s.kind == SetAst::Kind::ValGe || s.kind == SetAst::Kind::AcEq || s.kind == SetAst::Kind::InBall;
}

bool uses_y(const Expr& e) {
    if (e.op == Expr::Op::Var) return e.var == 'y';
    for (const auto& a : e.args)
        if (uses_y(a)) return true;
    return false;
}

// a * v + b with a constant monomial a, in a single coordinate v.
struct Affine1 {
    int var;
    Series a, b;
};

std::optional<Affine1> affine_single(const BiPoly& p, const Field* F) {
    std::optional<int> var;
    Series a(F), b(F);
    for (const auto& [k, c] : p) {
        if (k == std::make_pair(0, 0)) {
            b = c;
        } else if (k == std::make_pair(1, 0) || k == std::make_pair(0, 1)) {
            int v = k.first == 1 ? 0 : 1;
            if (var && *var != v) return std::nullopt;
            var = v;
            a = c;
        } else {
            return std::nullopt;
        }
    }
    if (!var) return std::nullopt;
    return Affine1{*var, a, b};
}

Series const_series(const Expr& e, const Field* F) {
    auto c = as_constant(eval_expr(e, F), F);
    if (!c) throw Unsupported("expected a constant, got " + print(e));
    return *c;
}

Ball const_ball(const BallAst& b, const Field* F) {
    std::vector<Series> c;
    for (const auto& e : b.center) c.push_back(const_series(e, F));
    return Ball(c, b.rad);
}

// {v : val(a v + b) >= c} as a ball, for a constant monomial a.
Ball affine_ball(const Affine1& af, long c) {
    auto inv = inverse_monomial(af.a);
    if (!inv) throw Unsupported("coefficient " + af.a.str() + " is not a monomial");
    Series center = -(af.b * *inv);
    return Ball::one_dim(center, c - af.a.val());
}

KPoly kpoly_power(const KPoly& p, int k) {
    KPoly r = KPoly::constant(Series::constant(p.F, 1));
    for (int i = 0; i < k; ++i) r = r * p;
    return r;
}

// p(x, y) restricted to the graph of a cell, as a polynomial in the parameter.
KPoly substitute(const BiPoly& p, const Cell& c, const Field* F) {
    KPoly s = KPoly::x(F);
    KPoly x = c.swap ? c.f : s;
    KPoly y = c.swap ? s : c.f;
    KPoly r(F, {});
    for (const auto& [k, coef] : p) r = r + KPoly::constant(coef) * kpoly_power(x, k.first) * kpoly_power(y, k.second);
    return r;
}

KPoly univariate(const BiPoly& p, const Field* F) {
    std::vector<Series> cs;
    for (const auto& [k, c] : p) {
        if (static_cast<int>(cs.size()) <= k.first) cs.resize(k.first + 1, Series(F));
        cs[k.first] = c;
    }
    return KPoly(F, cs);
}

class Lowerer {
public:
    Lowerer(const Field* F, int n) : F_(F), n_(n) {}

    std::vector<Cell> lower_set(const SetAst& s) {
        switch (s.kind) {
            case SetAst::Kind::Point: {
                if (static_cast<int>(s.exprs.size()) != n_) throw Unsupported("mixed ambient dimensions");
                std::vector<Series> p;
                for (const auto& e : s.exprs) p.push_back(const_series(e, F_));
                return {Cell::singleton(p)};
            }
            case SetAst::Kind::Box: {
                if (static_cast<int>(s.balls.size()) != n_) throw Unsupported("mixed ambient dimensions");
                std::vector<Ball> bs;
                for (const auto& b : s.balls) {
                    if (b.center.size() != 1) throw Unsupported("box factors are balls in K");
                    bs.push_back(const_ball(b, F_));
                }
                return {Cell::make_box(bs)};
            }
            case SetAst::Kind::Graph: {
                if (n_ != 2) throw Unsupported("graphs live in K^2");
                BiPoly p = eval_expr(s.exprs[0], F_);
                for (const auto& [k, c] : p)
                    if (k.second != 0) throw Unsupported("graph right-hand side must be a polynomial in x");
                std::vector<Ball> dom;
                for (const auto& b : s.balls) dom.push_back(const_ball(b, F_));
                Cell c = Cell::graph(univariate(p, F_), canonical_balls(F_, dom), s.tube, s.swap);
                certify(c);
                return {c};
            }
            case SetAst::Kind::Union: {
                std::vector<Cell> out;
                for (const auto& k : s.kids) {
                    auto part = lower_set(k);
                    out.insert(out.end(), part.begin(), part.end());
                }
                return out;
            }
            case SetAst::Kind::And: return lower_and(s.kids);
            default: return lower_and({s});
        }
    }

private:
    void certify(Cell& c) {
        bool ok = true;
        for (const auto& D : c.domain) ok = ok && lipschitz_certificate(c.f, D);
        if (ok) return;
        if (c.tube || c.f.degree() != 1)
            throw Unsupported("graph of " + c.f.str() + " is not 1-Lipschitz on its domain");
        auto inv = inverse_monomial(c.f.c[1]);
        if (!inv) throw Unsupported("graph of " + c.f.str() + " is not 1-Lipschitz on its domain");
        long va = c.f.c[1].val();
        KPoly g(F_, {-(c.f.c[0] * *inv), *inv});
        std::vector<Ball> dom;
        for (const auto& D : c.domain) dom.push_back(Ball::one_dim(c.f.eval(D.center[0]), D.rad + va));
        c = Cell::graph(g, canonical_balls(F_, dom), std::nullopt, !c.swap);
    }

    std::vector<Cell> lower_and(const std::vector<SetAst>& kids) {
        std::vector<const SetAst*> atoms;
        std::vector<std::vector<Cell>> parts;
        for (const auto& k : kids) {
            if (is_atom(k)) atoms.push_back(&k);
            else parts.push_back(lower_set(k));
        }
        std::vector<Cell> cells;
        if (parts.empty()) return from_atoms(atoms);
        cells = parts[0];
        for (size_t i = 1; i < parts.size(); ++i) cells = intersect_parts(cells, parts[i]);
        for (const auto* a : atoms) {
            std::vector<Cell> next;
            for (const auto& c : cells) {
                auto r = restrict_cell(c, *a);
                next.insert(next.end(), r.begin(), r.end());
            }
            cells = next;
        }
        return cells;
    }

    std::vector<Cell> intersect_parts(const std::vector<Cell>& a, const std::vector<Cell>& b) {
        auto only_points = [](const std::vector<Cell>& v) {
            return std::all_of(v.begin(), v.end(), [](const Cell& c) { return c.kind == Cell::Kind::Singleton; });
        };
        const std::vector<Cell>* pts = only_points(a) ? &a : only_points(b) ? &b : nullptr;
        if (!pts) throw Unsupported("intersection of two non-finite constructors");
        CellSet other{F_, n_, pts == &a ? b : a};
        std::vector<Cell> out;
        for (const auto& c : *pts)
            if (other.contains(c.point)) out.push_back(c);
        return out;
    }

    std::vector<Cell> from_atoms(const std::vector<const SetAst*>& atoms) {
        std::vector<std::optional<Ball>> coord(n_);
        std::vector<bool> empty(n_, false);
        std::optional<std::pair<KPoly, long>> tube;
        auto meet = [&](int v, const Ball& b) {
            if (empty[v]) return;
            if (!coord[v]) {
                coord[v] = b;
                return;
            }
            auto r = intersect(*coord[v], b);
            if (r) coord[v] = *r;
            else empty[v] = true;
        };
        for (const auto* a : atoms) {
            if (a->kind == SetAst::Kind::InBall) {
                meet(a->var == 'x' ? 0 : 1, const_ball(a->balls[0], F_));
                continue;
            }
            if (a->kind == SetAst::Kind::AcEq)
                throw Unsupported("ac(...) conditions need a constructor to restrict: " + print(*a));
            BiPoly p = eval_expr(a->exprs[0], F_);
            if (auto af = affine_single(p, F_)) {
                meet(af->var, affine_ball(*af, a->bound));
                continue;
            }
            auto ycoef = p.find({0, 1});
            bool tube_shape = n_ == 2 && ycoef != p.end() && !tube;
            for (const auto& [k, c] : p)
                if (k.second > 1 || (k.second == 1 && k.first != 0)) tube_shape = false;
            if (!tube_shape) throw Unsupported("condition outside the supported class: " + print(*a));
            auto inv = inverse_monomial(ycoef->second);
            if (!inv) throw Unsupported("condition outside the supported class: " + print(*a));
            KPoly g(F_, {});
            for (const auto& [k, c] : p)
                if (k.second == 0) {
                    std::vector<Series> cs(k.first + 1, Series(F_));
                    cs[k.first] = -(c * *inv);
                    g = g + KPoly(F_, cs);
                }
            tube = std::make_pair(g, a->bound - ycoef->second.val());
        }
        for (int v = 0; v < n_; ++v)
            if (empty[v]) return {};
        if (tube) {
            if (!coord[0]) throw Unsupported("tube condition needs a bounded x domain");
            if (coord[1]) throw Unsupported("tube intersected with a y ball");
            Cell c = Cell::graph(tube->first, {*coord[0]}, tube->second);
            certify(c);
            return {c};
        }
        std::vector<Ball> bs;
        for (int v = 0; v < n_; ++v) {
            if (!coord[v]) throw Unsupported("unbounded set: no ball for coordinate " + std::to_string(v + 1));
            bs.push_back(*coord[v]);
        }
        return {Cell::make_box(bs)};
    }

    std::vector<Cell> restrict_cell(const Cell& c, const SetAst& a) {
        if (c.kind == Cell::Kind::Singleton) {
            SetAst wrapped = a;
            if (ast_contains(wrapped, F_, c.point)) return {c};
            return {};
        }
        int var = a.kind == SetAst::Kind::InBall ? (a.var == 'x' ? 0 : 1) : -1;
        if (c.kind == Cell::Kind::Box) {
            Cell r = c;
            Ball b;
            if (var >= 0) {
                b = const_ball(a.balls[0], F_);
            } else if (a.kind == SetAst::Kind::ValGe) {
                auto af = affine_single(eval_expr(a.exprs[0], F_), F_);
                if (!af) throw Unsupported("box restricted by a non-affine condition: " + print(a));
                var = af->var;
                b = affine_ball(*af, a.bound);
            } else {
                throw Unsupported("box restricted by " + print(a));
            }
            if (var >= n_) throw Unsupported("coordinate out of range");
            auto m = intersect(r.box[var], b);
            if (!m) return {};
            r.box[var] = *m;
            return {r};
        }
        int param = c.swap ? 1 : 0;
        std::vector<Ball> dom;
        if (var == param) {
            Ball b = const_ball(a.balls[0], F_);
            for (const auto& D : c.domain)
                if (auto m = intersect(D, b)) dom.push_back(*m);
        } else {
            if (c.tube) throw Unsupported("tube restricted by " + print(a));
            KPoly h;
            long bound = 0;
            std::optional<KElem> xi;
            if (var >= 0) {
                Ball b = const_ball(a.balls[0], F_);
                h = c.f - KPoly::constant(b.center[0]);
                bound = b.rad;
            } else {
                h = substitute(eval_expr(a.exprs[0], F_), c, F_);
                bound = a.bound;
                if (a.kind == SetAst::Kind::AcEq) xi = const_series(a.exprs[1], F_).coeff(0);
            }
            for (const auto& D : c.domain) {
                auto part = xi ? ac_locus(h, D, *xi) : val_ge_locus(h, D, bound);
                dom.insert(dom.end(), part.begin(), part.end());
            }
        }
        dom = canonical_balls(F_, dom);
        if (dom.empty()) return {};
        Cell r = c;
        r.domain = dom;
        return {r};
    }

    const Field* F_;
    int n_;
};

}  // namespace

int ambient_dim(const SetAst& s) {
    switch (s.kind) {
        case SetAst::Kind::Point: return static_cast<int>(s.exprs.size());
        case SetAst::Kind::Box: return static_cast<int>(s.balls.size());
        case SetAst::Kind::Graph: return 2;
        case SetAst::Kind::Union:
        case SetAst::Kind::And: {
            int n = 1;
            for (const auto& k : s.kids) n = std::max(n, ambient_dim(k));
            return n;
        }
        case SetAst::Kind::InBall: return s.var == 'y' ? 2 : 1;
        default: {
            for (const auto& e : s.exprs)
                if (uses_y(e)) return 2;
            return 1;
        }
    }
}

CellSet lower(const Program& p) {
    CellSet out;
    out.F = p.F;
    out.n = ambient_dim(p.set);
    out.cells = Lowerer(p.F, out.n).lower_set(p.set);
    return out;
}

CellSet lower(const std::string& text, const Field* dflt) { return lower(parse(text, dflt)); }

bool ast_contains(const SetAst& s, const Field* F, const std::vector<Series>& p) {
    switch (s.kind) {
        case SetAst::Kind::Point: {
            if (s.exprs.size() != p.size()) return false;
            for (size_t i = 0; i < p.size(); ++i)
                if (const_series(s.exprs[i], F) != p[i]) return false;
            return true;
        }
        case SetAst::Kind::Box: {
            if (s.balls.size() != p.size()) return false;
            for (size_t i = 0; i < p.size(); ++i)
                if (!const_ball(s.balls[i], F).contains({p[i]})) return false;
            return true;
        }
        case SetAst::Kind::Graph: {
            const Series& par = p[s.swap ? 1 : 0];
            const Series& dep = p[s.swap ? 0 : 1];
            bool in = false;
            for (const auto& b : s.balls) in = in || const_ball(b, F).contains({par});
            if (!in) return false;
            Series d = dep - eval_bipoly(eval_expr(s.exprs[0], F), F, {par, par});
            if (s.tube) return d.is_zero() || d.val() >= *s.tube;
            return d.is_zero();
        }
        case SetAst::Kind::Union:
            for (const auto& k : s.kids)
                if (ast_contains(k, F, p)) return true;
            return false;
        case SetAst::Kind::And:
            for (const auto& k : s.kids)
                if (!ast_contains(k, F, p)) return false;
            return true;
        case SetAst::Kind::ValGe: {
            Series v = eval_bipoly(eval_expr(s.exprs[0], F), F, p);
            return v.is_zero() || v.val() >= s.bound;
        }
        case SetAst::Kind::AcEq: {
            Series v = eval_bipoly(eval_expr(s.exprs[0], F), F, p);
            return !v.is_zero() && v.ac() == const_series(s.exprs[1], F).coeff(0);
        }
        case SetAst::Kind::InBall: return const_ball(s.balls[0], F).contains({p[s.var == 'x' ? 0 : 1]});
    }
    return false;
}

// ---------------------------------------------------------------- geometry

Ball bounding_ball(const CellSet& X) {
    std::vector<std::pair<std::vector<Series>, long>> anchors;
    for (const auto& c : X.cells) {
        switch (c.kind) {
            case Cell::Kind::Singleton: anchors.push_back({c.point, VAL_INF}); break;
            case Cell::Kind::Box: {
                std::vector<Series> ctr;
                long r = VAL_INF;
                for (const auto& b : c.box) {
                    ctr.push_back(b.center[0]);
                    r = std::min(r, b.rad);
                }
                anchors.push_back({ctr, r});
                break;
            }
            case Cell::Kind::Graph:
                for (const auto& D : c.domain) {
                    Series s = D.center[0];
                    Expansion E = expand(c.f, s, D.rad);
                    long r = D.rad;
                    for (size_t j = 1; j < E.h.c.size(); ++j)
                        if (!E.h.c[j].is_zero()) r = std::min(r, E.h.c[j].val());
                    if (c.tube) r = std::min(r, *c.tube);
                    Series fs = c.f.eval(s);
                    anchors.push_back({c.swap ? std::vector<Series>{fs, s} : std::vector<Series>{s, fs}, r});
                }
                break;
        }
    }
    if (anchors.empty()) throw DomainError("bounding ball of the empty set");
    const auto& base = anchors[0].first;
    long R = VAL_INF;
    for (const auto& [p, r] : anchors) {
        R = std::min(R, r);
        for (size_t i = 0; i < p.size(); ++i) {
            Series d = p[i] - base[i];
            if (!d.is_zero()) R = std::min(R, d.val());
        }
    }
    return Ball(base, R);
}

CellSet restrict(const CellSet& X, const Ball& B) {
    CellSet out{X.F, X.n, {}};
    for (const auto& c : X.cells) {
        switch (c.kind) {
            case Cell::Kind::Singleton:
                if (B.contains(c.point)) out.cells.push_back(c);
                break;
            case Cell::Kind::Box: {
                Cell r = c;
                bool ok = true;
                for (size_t i = 0; i < c.box.size() && ok; ++i) {
                    auto m = intersect(c.box[i], Ball::one_dim(B.center[i], B.rad));
                    if (m) r.box[i] = *m;
                    else ok = false;
                }
                if (ok) out.cells.push_back(r);
                break;
            }
            case Cell::Kind::Graph: {
                int pi = c.swap ? 1 : 0;
                Ball foot = Ball::one_dim(B.center[pi], B.rad);
                const Series& cd = B.center[1 - pi];
                std::vector<Ball> dom;
                Cell r = c;
                for (const auto& D : c.domain) {
                    auto m = intersect(D, foot);
                    if (!m) continue;
                    KPoly h = c.f - KPoly::constant(cd);
                    if (c.tube && B.rad > *c.tube) {
                        auto part = val_ge_locus(h, *m, *c.tube);
                        dom.insert(dom.end(), part.begin(), part.end());
                    } else {
                        auto part = val_ge_locus(h, *m, B.rad);
                        dom.insert(dom.end(), part.begin(), part.end());
                    }
                }
                if (c.tube && B.rad > *c.tube) {
                    r.f = KPoly::constant(cd);
                    r.tube = B.rad;
                }
                r.domain = canonical_balls(X.F, dom);
                if (!r.domain.empty()) out.cells.push_back(r);
                break;
            }
        }
    }
    return out;
}

}  // namespace mv
