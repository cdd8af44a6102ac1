#include "mv/series.hpp"

#include "mv/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mv {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

long mod_pos(long a, long m) { return ((a % m) + m) % m; }

}  // namespace

// ---------------------------------------------------------------- Series

Series::Series(const Field* F, std::map<long, KElem> terms, long prec) : F_(F), prec_(prec) {
    for (auto& [e, c] : terms)
        if (e < prec && c != 0) terms_.emplace(e, c);
}

Series Series::monomial(const Field* F, long e, const KElem& c) { return Series(F, {{e, c}}); }

void Series::add_term(long e, const KElem& c) {
    if (e >= prec_ || c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second = F_->add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

long Series::val() const {
    if (!terms_.empty()) return terms_.begin()->first;
    if (exact()) return VAL_INF;
    throw PrecisionLoss("valuation undetermined below t^" + std::to_string(prec_));
}

long Series::val_lower_bound() const { return terms_.empty() ? prec_ : terms_.begin()->first; }

KElem Series::ac() const {
    if (val() == VAL_INF) return 0;
    return terms_.begin()->second;
}

KElem Series::res() const {
    for (const auto& [e, c] : terms_) {
        if (e < 0) throw DomainError("res of an element of negative valuation");
        break;
    }
    if (prec_ <= 0) throw PrecisionLoss("residue undetermined");
    return coeff(0);
}

KElem Series::coeff(long e) const {
    if (e >= prec_) throw PrecisionLoss("coefficient of t^" + std::to_string(e) + " beyond precision");
    auto it = terms_.find(e);
    return it == terms_.end() ? KElem(0) : it->second;
}

Series Series::operator+(const Series& o) const {
    Series r(F_);
    r.prec_ = std::min(prec_, o.prec_);
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& kv : r.terms_) kv.second = F_->neg(kv.second);
    return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    Series r(F_);
    if (is_zero() || o.is_zero()) return r;
    if (!exact() || !o.exact()) {
        long p1 = exact() ? EXACT : prec_ + o.val_lower_bound();
        long p2 = o.exact() ? EXACT : o.prec_ + val_lower_bound();
        r.prec_ = std::min(p1, p2);
    }
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) r.add_term(e1 + e2, F_->mul(c1, c2));
    return r;
}

Series Series::shift(long k) const {
    Series r(F_);
    r.prec_ = exact() ? EXACT : prec_ + k;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
    return r;
}

Series Series::scaled(const KElem& a) const {
    Series r(F_);
    r.prec_ = prec_;
    for (const auto& [e, c] : terms_) r.add_term(e, F_->mul(a, c));
    return r;
}

Series Series::truncated(long n) const {
    if (n > prec_) throw PrecisionLoss("truncation beyond known precision");
    Series r(F_);
    for (const auto& [e, c] : terms_)
        if (e < n) r.terms_.emplace(e, c);
    return r;
}

Series Series::with_prec(long n) const {
    Series r(F_, terms_, std::min(prec_, n));
    return r;
}

bool Series::operator==(const Series& o) const {
    return F_ == o.F_ && prec_ == o.prec_ && terms_ == o.terms_;
}

bool Series::operator<(const Series& o) const {
    if (prec_ != o.prec_) return prec_ < o.prec_;
    return terms_ < o.terms_;
}

std::string Series::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::string s = F_->str(c);
        bool neg = F_->is_Q() && c < 0;
        if (neg) s = F_->str(-c);
        if (!first) os << (neg ? " - " : " + ");
        else if (neg) os << "-";
        bool compound = s.find_first_of("+z/") != std::string::npos;
        if (e == 0) {
            os << s;
        } else {
            if (s != "1") os << (compound ? "(" + s + ")" : s) << "*";
            os << "t";
            if (e != 1) os << "^" << e;
        }
        first = false;
    }
    if (!exact()) {
        if (!first) os << " + ";
        os << "O(t^" << prec_ << ")";
    } else if (first) {
        os << "0";
    }
    return os.str();
}

// ---------------------------------------------------------------- Ball

Ball::Ball(std::vector<Series> c, long r) : rad(r) {
    for (auto& x : c) center.push_back(x.truncated(r));
}

bool Ball::contains(const std::vector<Series>& p) const {
    if (p.size() != center.size()) throw DomainError("ball and point dimensions differ");
    for (size_t i = 0; i < p.size(); ++i) {
        Series d = p[i] - center[i];
        if (d.prec() < rad && d.terms().empty()) throw PrecisionLoss("membership undetermined");
        if (d.val_lower_bound() < rad) return false;
    }
    return true;
}

bool Ball::contains(const Ball& b) const { return b.rad >= rad && contains(b.center); }

bool Ball::intersects(const Ball& b) const { return contains(b) || b.contains(*this); }

bool Ball::operator==(const Ball& b) const { return rad == b.rad && center == b.center; }

bool Ball::operator<(const Ball& b) const {
    if (rad != b.rad) return rad < b.rad;
    return center < b.center;
}

std::string Ball::str() const {
    std::ostringstream os;
    os << "B((";
    for (size_t i = 0; i < center.size(); ++i) os << (i ? ", " : "") << center[i].str();
    os << "), " << rad << ")";
    return os.str();
}

// ---------------------------------------------------------------- KPoly

KPoly::KPoly(const Field* f, std::vector<Series> coeffs) : F(f), c(std::move(coeffs)) { trim(); }

void KPoly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

KPoly KPoly::constant(const Series& a) { return KPoly(a.field(), {a}); }

KPoly KPoly::x(const Field* F) { return KPoly(F, {Series(F), Series::constant(F, 1)}); }

Series KPoly::eval(const Series& x) const {
    Series r(F);
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

KPoly KPoly::derivative() const {
    std::vector<Series> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i].scaled(F->from_int(static_cast<long>(i))));
    return KPoly(F, std::move(d));
}

KPoly KPoly::taylor_shift(const Series& a, long s) const {
    KPoly lin(F, {a, Series::monomial(F, s)});
    KPoly r(F, {});
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * lin + KPoly::constant(*it);
    return r;
}

std::string KPoly::str(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        if (c[i].is_zero()) continue;
        if (!first) os << " + ";
        std::string s = c[i].str();
        bool compound = c[i].terms().size() > 1 || !c[i].exact();
        if (i == 0) os << (compound ? "(" + s + ")" : s);
        else {
            if (s != "1") os << (compound ? "(" + s + ")" : s) << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

KPoly operator+(const KPoly& a, const KPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<Series> r(std::max(a.c.size(), b.c.size()), Series(F));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = r[i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = r[i] + b.c[i];
    return KPoly(F, std::move(r));
}

KPoly operator-(const KPoly& a, const KPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<Series> r(std::max(a.c.size(), b.c.size()), Series(F));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = r[i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = r[i] - b.c[i];
    return KPoly(F, std::move(r));
}

KPoly operator*(const KPoly& a, const KPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    if (a.is_zero() || b.is_zero()) return KPoly(F, {});
    std::vector<Series> r(a.c.size() + b.c.size() - 1, Series(F));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] = r[i + j] + a.c[i] * b.c[j];
    return KPoly(F, std::move(r));
}

NewtonPolygon newton_polygon(const KPoly& p) {
    if (p.is_zero()) throw DomainError("Newton polygon of the zero polynomial");
    NewtonPolygon np;
    std::vector<std::pair<long, long>> pts;
    for (int i = 0; i <= p.degree(); ++i)
        if (!p.c[i].is_zero()) pts.push_back({i, p.c[i].val()});
    np.zero_roots = static_cast<int>(pts.front().first);
    // Lower convex hull, left to right.
    std::vector<std::pair<long, long>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            auto [x1, y1] = hull[hull.size() - 2];
            auto [x2, y2] = hull.back();
            // drop the middle point if it lies on or above the chord
            mpz_class lhs = mpz_class(y2 - y1) * (pt.first - x1);
            mpz_class rhs = mpz_class(pt.second - y1) * (x2 - x1);
            if (lhs >= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(pt);
    }
    for (size_t k = hull.size(); k-- > 1;) {
        auto [x1, y1] = hull[k - 1];
        auto [x2, y2] = hull[k];
        mpq_class lam(y1 - y2, x2 - x1);
        lam.canonicalize();
        np.slopes.push_back({lam, static_cast<int>(x2 - x1)});
    }
    return np;
}

Expansion expand(const KPoly& g, const Series& a, long s) {
    Expansion e;
    e.h = g.taylor_shift(a, s);
    const Field* F = g.F;
    if (e.h.is_zero()) {
        e.red = KUPoly(F, {});
        return e;
    }
    for (const auto& hj : e.h.c)
        if (!hj.is_zero()) e.m = std::min(e.m, hj.val());
    std::vector<KElem> red;
    for (const auto& hj : e.h.c) red.push_back(hj.is_zero() ? KElem(0) : hj.coeff(e.m));
    e.red = KUPoly(F, std::move(red));
    e.w = e.red.degree();
    e.point_type = true;
    for (int j = 0; j < e.w; ++j)
        if (!e.h.c[j].is_zero()) e.point_type = false;
    return e;
}

// ---------------------------------------------------------------- val_locus

namespace {

constexpr long INF_HI = LONG_MAX;

struct Ctx {
    const Field* F;
    MotFun out;
    LocusOptions opt;
};

Guard range_guard(long a, long b) {
    Guard g = Guard::at_least(1, 0, a);
    if (b != INF_HI) g = g & Guard::at_most(1, 0, b);
    return g;
}

void emit(Ctx& cx, long a, long b, const CVal& coeff, const LinForm& expo, long den = 1) {
    if (a > b || coeff.is_zero()) return;
    cx.out.add(range_guard(a, b), coeff, expo, den);
}

void emit_const(Ctx& cx, long a, long b, const CVal& v) { emit(cx, a, b, v, LinForm({0}, 0)); }

// Roots of gbar in k, split into simple and multiple ones. simple_class is
// the class of the simple roots as a definable residue set; multiple roots
// are returned for refinement.
struct RootSplit {
    CVal simple_class;
    std::vector<KElem> multiple;
};

RootSplit split_roots(const KUPoly& gbar) {
    RootSplit rs;
    const Field* F = gbar.F;
    auto roots = roots_in_k(gbar);
    long nsimple = 0;
    for (const auto& [x, mult] : roots) {
        if (mult == 1) ++nsimple;
        else rs.multiple.push_back(x);
    }
    rs.simple_class = CVal(MotElem(nsimple));
    if (!F->is_Q()) return rs;
    QPoly rest(gbar.c);
    for (const auto& [x, mult] : roots)
        for (int i = 0; i < mult; ++i) rest = divmod(rest, QPoly::x_minus(x)).first;
    if (rest.degree() <= 0) return rs;
    auto [lc, parts] = squarefree_decomposition(rest);
    for (size_t k = 1; k < parts.size(); ++k)
        if (parts[k].degree() > 0)
            throw Unsupported("repeated non-rational residue root " + parts[k].str("u"));
    if (!parts.empty() && parts[0].degree() > 0)
        rs.simple_class += CVal::atom(ClassAtom::etale(KUPoly(F, parts[0].c)));
    return rs;
}

// Common roots in k of several reductions; non-rational common roots over Q
// are not handled.
std::vector<KElem> common_roots(const std::vector<const Expansion*>& act) {
    KUPoly g = act.front()->red;
    for (size_t k = 1; k < act.size(); ++k) g = gcd(g, act[k]->red);
    std::vector<KElem> out;
    auto roots = roots_in_k(g);
    int deg = 0;
    for (const auto& [x, mult] : roots) {
        out.push_back(x);
        deg += mult;
    }
    if (g.F->is_Q() && deg < g.degree())
        throw Unsupported("common non-rational residue roots of " + g.str("u"));
    return out;
}

struct PointTerm {
    long w;
    long beta;
    Threshold th;
};

// All active constraints vanish exactly at the centre: val g_k(x) =
// beta_k + w_k val(x - a). Measure is L^{-max(s, ceil((th_k - beta_k) / w_k))}.
void emit_point_type(Ctx& cx, long s, const std::vector<PointTerm>& terms, long a, long b) {
    auto need = [&](long r) {
        long v = s;
        for (const auto& pt : terms) {
            long th = pt.th.symbolic ? r : pt.th.value;
            v = std::max(v, ceil_div(th - pt.beta, pt.w));
        }
        return v;
    };
    const PointTerm* dom = nullptr;
    for (const auto& pt : terms)
        if (pt.th.symbolic && (!dom || pt.w < dom->w || (pt.w == dom->w && pt.beta < dom->beta))) dom = &pt;
    if (!dom) {
        emit_const(cx, a, b, CVal(MotElem::L(-need(a))));
        return;
    }
    long w = dom->w, beta = dom->beta;
    // From R on the dominant term attains the maximum.
    long R = std::max(a, beta + w * s);
    for (const auto& pt : terms) {
        if (&pt == dom) continue;
        if (!pt.th.symbolic) {
            R = std::max(R, beta + w * ceil_div(pt.th.value - pt.beta, pt.w));
        } else if (pt.w > w) {
            R = std::max(R, ceil_div(beta * pt.w - pt.beta * w, pt.w - w));
        }
    }
    long explicit_end = std::min(b, R - 1);
    for (long r = a; r <= explicit_end; ++r) emit_const(cx, r, r, CVal(MotElem::L(-need(r))));
    long lo = std::max(a, R);
    if (lo > b) return;
    if (w == 1) {
        emit(cx, lo, b, CVal(1), LinForm({-1}, beta));
        return;
    }
    for (long rho = 0; rho < w; ++rho) {
        long delta = (w - rho) % w;
        Piece p;
        p.guard = range_guard(lo, b) & Guard::congruent(1, 0, mod_pos(beta + rho, w), w);
        p.coeff = CVal(1);
        p.poly = MPoly::constant(1, MotElem(1));
        p.expo = LinForm({-1}, beta - delta);
        p.den = w;
        cx.out.add_piece(p);
    }
}

void locus_rec(Ctx& cx, const Series& c, long s, const std::vector<ValConstraint>& cons, long lo, long hi,
               int depth) {
    if (lo > hi) return;
    if (depth > cx.opt.max_depth)
        throw UnsupportedRamification("valuation locus refinement exceeded depth " +
                                      std::to_string(cx.opt.max_depth));
    std::vector<Expansion> exps;
    std::vector<ValConstraint> kept;
    for (const auto& k : cons) {
        Expansion e = expand(k.g, c, s);
        if (e.h.is_zero()) continue;  // g vanishes identically
        if (!k.th.symbolic) {
            if (e.m >= k.th.value) continue;
            if (e.w == 0) return;
        } else if (e.w == 0) {
            hi = std::min(hi, e.m);
            continue;
        } else if (e.m >= hi) {
            continue;
        }
        exps.push_back(std::move(e));
        kept.push_back(k);
    }
    if (lo > hi) return;
    std::vector<long> cuts;
    for (size_t k = 0; k < kept.size(); ++k)
        if (kept[k].th.symbolic && exps[k].m >= lo && exps[k].m < hi) cuts.push_back(exps[k].m);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::pair<long, long>> segs;
    long start = lo;
    for (long m : cuts) {
        segs.push_back({start, m});
        start = m + 1;
    }
    segs.push_back({start, hi});

    for (auto [a, b] : segs) {
        if (a > b) continue;
        std::vector<size_t> act;
        for (size_t k = 0; k < kept.size(); ++k)
            if (!kept[k].th.symbolic || exps[k].m < a) act.push_back(k);
        if (act.empty()) {
            emit_const(cx, a, b, CVal(MotElem::L(-s)));
            continue;
        }
        bool all_point = true;
        for (size_t k : act) all_point = all_point && exps[k].point_type;
        if (all_point) {
            std::vector<PointTerm> pts;
            for (size_t k : act) pts.push_back({exps[k].w, exps[k].m - s * exps[k].w, kept[k].th});
            emit_point_type(cx, s, pts, a, b);
            continue;
        }
        std::vector<ValConstraint> sub;
        for (size_t k : act) sub.push_back(kept[k]);
        std::vector<KElem> children;
        if (act.size() == 1) {
            const Expansion& e = exps[act[0]];
            RootSplit rs = split_roots(e.red);
            // A simple residue root carries one Hensel root: val g = (m - s) + val(x - alpha).
            if (kept[act[0]].th.symbolic) emit(cx, a, b, rs.simple_class, LinForm({-1}, e.m - s));
            else emit_const(cx, a, b, rs.simple_class.scaled(MotElem::L(-(kept[act[0]].th.value - e.m + s))));
            children = rs.multiple;
        } else {
            std::vector<const Expansion*> ptrs;
            for (size_t k : act) ptrs.push_back(&exps[k]);
            children = common_roots(ptrs);
        }
        for (const auto& u : children)
            locus_rec(cx, c + Series::monomial(cx.F, s, u), s + 1, sub, a, b, depth + 1);
    }
}

}  // namespace

MotFun val_locus(const Series& a, long s, const std::vector<ValConstraint>& cons, long lo,
                 std::optional<long> hi, const LocusOptions& opt) {
    Ctx cx{a.field(), MotFun(1, {"r"}), opt};
    for (const auto& k : cons)
        if (k.g.F && k.g.F != a.field()) throw BaseFieldMismatch("constraint over a different residue field");
    locus_rec(cx, a.truncated(s), s, cons, lo, hi ? *hi : INF_HI, 0);
    return cx.out;
}

CVal val_locus_const(const Series& a, long s, const std::vector<ValConstraint>& cons, const LocusOptions& opt) {
    for (const auto& k : cons)
        if (k.th.symbolic) throw DomainError("val_locus_const needs constant thresholds");
    return val_locus(a, s, cons, 0, 0, opt).eval1(0);
}

MotFun val_locus_measure(const KPoly& p, const Ball& D, long rlo, const LocusOptions& opt) {
    if (D.dim() != 1) throw DomainError("val_locus_measure needs a ball in K");
    return val_locus(D.center[0], D.rad, {{p, Threshold::r()}}, rlo, std::nullopt, opt);
}

}  // namespace mv
