#include "mv/presburger.hpp"

#include "mv/errors.hpp"

#include <algorithm>
#include <climits>
#include <numeric>
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

MotElem binom(long n, long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return MotElem(mpq_class(r));
}

}  // namespace

// ---------------------------------------------------------------- LinForm

LinForm LinForm::var(int nvars, int i, long coef, long b) {
    LinForm f = constant(nvars, b);
    f.a[i] = coef;
    return f;
}

long LinForm::eval(const std::vector<long>& x) const {
    long s = b;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
}

bool LinForm::is_constant() const {
    return std::all_of(a.begin(), a.end(), [](long v) { return v == 0; });
}

LinForm LinForm::operator+(const LinForm& o) const {
    LinForm r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    r.b += o.b;
    return r;
}

LinForm LinForm::operator-(const LinForm& o) const { return *this + o * -1; }

LinForm LinForm::operator*(long s) const {
    LinForm r = *this;
    for (auto& v : r.a) v *= s;
    r.b *= s;
    return r;
}

LinForm LinForm::subst(int var, const LinForm& f) const {
    LinForm rest = *this;
    long c = rest.a[var];
    rest.a[var] = 0;
    return rest + f * c;
}

LinForm LinForm::drop(int var) const {
    if (a[var] != 0) throw DomainError("dropping a variable that still occurs");
    LinForm r = *this;
    r.a.erase(r.a.begin() + var);
    return r;
}

// ------------------------------------------------------------------ Guard

bool Guard::holds(const std::vector<long>& x) const {
    for (const auto& g : ge)
        if (g.eval(x) < 0) return false;
    for (const auto& c : cong)
        if (mod_pos(c.f.eval(x), c.m) != 0) return false;
    return true;
}

Guard Guard::operator&(const Guard& o) const {
    Guard r = *this;
    r.ge.insert(r.ge.end(), o.ge.begin(), o.ge.end());
    r.cong.insert(r.cong.end(), o.cong.begin(), o.cong.end());
    return r;
}

Guard Guard::at_least(int nvars, int var, long lo) {
    Guard g;
    g.ge.push_back(LinForm::var(nvars, var, 1, -lo));
    return g;
}

Guard Guard::at_most(int nvars, int var, long hi) {
    Guard g;
    g.ge.push_back(LinForm::var(nvars, var, -1, hi));
    return g;
}

Guard Guard::congruent(int nvars, int var, long residue, long m) {
    Guard g;
    g.cong.push_back({LinForm::var(nvars, var, 1, -residue), m});
    return g;
}

// ------------------------------------------------------------------ MPoly

MPoly MPoly::constant(int nvars, const MotElem& c) {
    MPoly p(nvars);
    p.add_term(Mono(nvars, 0), c);
    return p;
}

MPoly MPoly::var(int nvars, int i) {
    MPoly p(nvars);
    Mono m(nvars, 0);
    m[i] = 1;
    p.add_term(m, MotElem(1));
    return p;
}

MPoly MPoly::from_linform(const LinForm& f) {
    int n = static_cast<int>(f.a.size());
    MPoly p = constant(n, MotElem(f.b));
    for (int i = 0; i < n; ++i)
        if (f.a[i] != 0) p = p + var(n, i).scaled(MotElem(f.a[i]));
    return p;
}

void MPoly::add_term(const Mono& m, const MotElem& c) {
    if (c.is_zero()) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
        t_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
}

bool MPoly::is_constant() const {
    for (const auto& kv : t_)
        for (int e : kv.first)
            if (e != 0) return false;
    return true;
}

MotElem MPoly::constant_term() const {
    auto it = t_.find(Mono(n_, 0));
    return it == t_.end() ? MotElem(0) : it->second;
}

int MPoly::degree_in(int var) const {
    int d = 0;
    for (const auto& kv : t_) d = std::max(d, kv.first[var]);
    return d;
}

MPoly MPoly::coeff_in(int var, int j) const {
    MPoly r(n_);
    for (const auto& [m, c] : t_) {
        if (m[var] != j) continue;
        Mono mm = m;
        mm[var] = 0;
        r.add_term(mm, c);
    }
    return r;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r = *this;
    if (r.n_ == 0) r.n_ = o.n_;
    for (const auto& [m, c] : o.t_) r.add_term(m, c);
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + o.scaled(MotElem(-1)); }

MPoly MPoly::operator*(const MPoly& o) const {
    MPoly r(std::max(n_, o.n_));
    for (const auto& [m1, c1] : t_)
        for (const auto& [m2, c2] : o.t_) {
            Mono m(m1.size());
            for (size_t i = 0; i < m.size(); ++i) m[i] = m1[i] + m2[i];
            r.add_term(m, c1 * c2);
        }
    return r;
}

MPoly MPoly::scaled(const MotElem& s) const {
    MPoly r(n_);
    for (const auto& [m, c] : t_) r.add_term(m, c * s);
    return r;
}

MPoly MPoly::pow(unsigned k) const {
    MPoly r = constant(n_, MotElem(1));
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
}

MPoly MPoly::subst(int var, const LinForm& f) const {
    MPoly r(n_);
    MPoly lf = from_linform(f);
    std::map<int, MPoly> powers;
    for (const auto& [m, c] : t_) {
        int e = m[var];
        auto it = powers.find(e);
        if (it == powers.end()) it = powers.emplace(e, lf.pow(e)).first;
        Mono mm = m;
        mm[var] = 0;
        MPoly mono(n_);
        mono.add_term(mm, c);
        r = r + mono * it->second;
    }
    return r;
}

MPoly MPoly::drop(int var) const {
    MPoly r(n_ - 1);
    for (const auto& [m, c] : t_) {
        if (m[var] != 0) throw DomainError("dropping a variable that still occurs");
        Mono mm = m;
        mm.erase(mm.begin() + var);
        r.add_term(mm, c);
    }
    return r;
}

MotElem MPoly::eval(const std::vector<long>& x) const {
    MotElem s(0);
    for (const auto& [m, c] : t_) {
        mpz_class v = 1;
        for (size_t i = 0; i < m.size(); ++i)
            for (int e = 0; e < m[i]; ++e) v *= x[i];
        s += c * MotElem(mpq_class(v));
    }
    return s;
}

std::string MPoly::str(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        if (!first) os << " + ";
        first = false;
        bool mono_one = std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
        std::string cs = c.str();
        if (mono_one) {
            os << cs;
            continue;
        }
        if (cs != "1") os << "(" << cs << ")*";
        bool f2 = true;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (!f2) os << "*";
            f2 = false;
            os << (i < names.size() ? names[i] : "x" + std::to_string(i));
            if (m[i] > 1) os << "^" << m[i];
        }
    }
    return os.str();
}

// ----------------------------------------------------------------- MotFun

MotFun::MotFun(int nvars, std::vector<std::string> names) : n_(nvars), names_(std::move(names)) {
    if (names_.empty()) {
        if (n_ == 1) names_ = {"r"};
        else
            for (int i = 0; i < n_; ++i) names_.push_back("x" + std::to_string(i));
    }
}

void MotFun::add_piece(Piece p) {
    if (p.coeff.is_zero() || p.poly.is_zero()) return;
    if (p.den <= 0) throw DomainError("exponent denominator must be positive");
    pieces_.push_back(std::move(p));
}

void MotFun::add(const Guard& g, const CVal& coeff, const LinForm& expo, long den) {
    add_piece(Piece{g, coeff, MPoly::constant(n_, MotElem(1)), expo, den});
}

CVal MotFun::eval(const std::vector<long>& x) const {
    if (static_cast<int>(x.size()) != n_) throw DomainError("wrong number of arguments");
    CVal s;
    for (const auto& p : pieces_) {
        if (!p.guard.holds(x)) continue;
        long e = p.expo.eval(x);
        if (e % p.den != 0) throw DomainError("non-integral exponent in Presburger piece");
        s += p.coeff.scaled(p.poly.eval(x) * MotElem::L(e / p.den));
    }
    return s;
}

MotFun MotFun::operator+(const MotFun& o) const {
    if (n_ != o.n_) throw DomainError("adding functions of different arity");
    MotFun r = *this;
    for (const auto& p : o.pieces_) r.pieces_.push_back(p);
    return r;
}

MotFun MotFun::operator-(const MotFun& o) const { return *this + o.scaled(CVal(-1)); }

MotFun MotFun::scaled(const CVal& c) const {
    MotFun r(n_, names_);
    for (const auto& p : pieces_) {
        Piece q = p;
        q.coeff = p.coeff * c;
        r.add_piece(std::move(q));
    }
    return r;
}

MotFun MotFun::times_L(const LinForm& e) const {
    MotFun r(n_, names_);
    for (const auto& p : pieces_) {
        Piece q = p;
        q.expo = q.expo + e * q.den;
        r.add_piece(std::move(q));
    }
    return r;
}

namespace {

std::string form_str(const LinForm& f, const std::vector<std::string>& names) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < f.a.size(); ++i) {
        if (f.a[i] == 0) continue;
        long c = f.a[i];
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        if (std::labs(c) != 1) os << std::labs(c) << "*";
        os << names[i];
        first = false;
    }
    if (f.b != 0 || first) {
        if (!first) os << (f.b < 0 ? " - " : " + ") << std::labs(f.b);
        else os << f.b;
    }
    return os.str();
}

}  // namespace

std::string MotFun::str() const {
    if (pieces_.empty()) return "0";
    std::ostringstream os;
    for (size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (k) os << "\n";
        os << "[";
        bool first = true;
        for (const auto& g : p.guard.ge) {
            if (!first) os << ", ";
            os << form_str(g, names_) << " >= 0";
            first = false;
        }
        for (const auto& c : p.guard.cong) {
            if (!first) os << ", ";
            os << form_str(c.f, names_) << " = 0 mod " << c.m;
            first = false;
        }
        os << "] (" << p.coeff.str() << ")";
        if (!(p.poly.is_constant() && p.poly.constant_term() == MotElem(1))) os << " * (" << p.poly.str(names_) << ")";
        if (!(p.expo.is_constant() && p.expo.b == 0)) {
            os << " * L^(" << form_str(p.expo, names_);
            if (p.den != 1) os << ")/" << p.den;
            else os << ")";
        }
    }
    return os.str();
}

CVal eval(const MotFun& f, const std::vector<long>& x) { return f.eval(x); }

// ---------------------------------------------------------------- sum_over

namespace {

// Q with L^alpha Q(k+1) - Q(k) = P(k) (alpha != 0) or Q(k+1) - Q(k) = P(k).
MPoly antidifference(const MPoly& P, int v, long alpha) {
    int n = P.nvars();
    int d = P.degree_in(v);
    std::vector<MPoly> p(d + 1);
    for (int j = 0; j <= d; ++j) p[j] = P.coeff_in(v, j);
    MPoly kvar = MPoly::var(n, v);
    MPoly Q(n);
    if (alpha != 0) {
        MotElem z = MotElem::L(alpha);
        MotElem inv = -MotElem::inv_one_minus_L(alpha);  // 1/(z - 1)
        std::vector<MPoly> c(d + 1, MPoly(n));
        for (int k = d; k >= 0; --k) {
            MPoly acc = p[k];
            MPoly tail(n);
            for (int j = k + 1; j <= d; ++j) tail = tail + c[j].scaled(binom(j, k));
            acc = acc - tail.scaled(z);
            c[k] = acc.scaled(inv);
        }
        for (int j = 0; j <= d; ++j) Q = Q + c[j] * kvar.pow(j);
        return Q;
    }
    std::vector<MPoly> s(d + 2, MPoly(n));
    for (int m = d; m >= 0; --m) {
        MPoly acc = p[m];
        for (int i = m + 2; i <= d + 1; ++i) acc = acc - s[i].scaled(binom(i, m));
        s[m + 1] = acc.scaled(MotElem(mpq_class(1, m + 1)));
    }
    for (int j = 1; j <= d + 1; ++j) Q = Q + s[j] * kvar.pow(j);
    return Q;
}

}  // namespace

MotFun sum_over(const MotFun& f, int v, const LinForm& lo, const std::optional<LinForm>& hi) {
    int n = f.nvars();
    if (v < 0 || v >= n) throw DomainError("summation variable out of range");
    if (lo.a[v] != 0 || (hi && hi->a[v] != 0)) throw DomainError("summation bounds mention the summed variable");
    std::vector<std::string> names = f.names();
    names.erase(names.begin() + v);
    MotFun out(n - 1, names);

    for (const auto& P : f.pieces()) {
        Guard keep;
        std::vector<LinForm> lowers{lo}, uppers;
        if (hi) uppers.push_back(*hi);
        for (const auto& g : P.guard.ge) {
            long c = g.a[v];
            if (c == 0) {
                keep.ge.push_back(g);
                continue;
            }
            LinForm rest = g;
            rest.a[v] = 0;
            if (c == 1) lowers.push_back(rest * -1);
            else if (c == -1) uppers.push_back(rest);
            else if (rest.is_constant()) {
                if (c > 0) lowers.push_back(LinForm::constant(n, ceil_div(-rest.b, c)));
                else uppers.push_back(LinForm::constant(n, floor_div(rest.b, -c)));
            } else {
                throw Unsupported("summation bound with coefficient " + std::to_string(c) + " on the summed variable");
            }
        }
        long M = 1;
        std::vector<Congruence> vcong;
        for (const auto& c : P.guard.cong) {
            if (c.f.a[v] == 0) {
                keep.cong.push_back(c);
                continue;
            }
            LinForm rest = c.f;
            rest.a[v] = 0;
            if (!rest.is_constant()) throw Unsupported("congruence linking the summed variable to other variables");
            vcong.push_back(c);
            M = std::lcm(M, c.m);
        }
        std::vector<long> residues;
        for (long rho = 0; rho < M; ++rho) {
            bool ok = true;
            for (const auto& c : vcong)
                if (mod_pos(c.f.a[v] * rho + c.f.b, c.m) != 0) ok = false;
            if (ok) residues.push_back(rho);
        }
        auto k_lower = [&](const LinForm& L, long rho) {
            if (M == 1) return L - LinForm::constant(n, rho);
            if (!L.is_constant()) throw Unsupported("non-constant bound together with a congruence on the summed variable");
            return LinForm::constant(n, ceil_div(L.b - rho, M));
        };
        auto k_upper = [&](const LinForm& U, long rho) {
            if (M == 1) return U - LinForm::constant(n, rho);
            if (!U.is_constant()) throw Unsupported("non-constant bound together with a congruence on the summed variable");
            return LinForm::constant(n, floor_div(U.b - rho, M));
        };

        for (long rho : residues) {
            LinForm sub = LinForm::var(n, v, M, rho);
            MPoly poly = P.poly.subst(v, sub);
            LinForm expo = P.expo.subst(v, sub);
            if (expo.a[v] % P.den != 0) throw Unsupported("fractional exponent rate in summation");
            long alpha = expo.a[v] / P.den;
            LinForm expo0 = expo;
            expo0.a[v] = 0;
            std::vector<LinForm> kl, ku;
            for (const auto& L : lowers) kl.push_back(k_lower(L, rho));
            for (const auto& U : uppers) ku.push_back(k_upper(U, rho));
            if (ku.empty() && alpha >= 0) throw Divergent("infinite sum with exponent rate " + std::to_string(alpha) + " >= 0");
            MPoly Q = antidifference(poly, v, alpha);

            auto emit = [&](const Guard& g, const LinForm& at, long sign) {
                Piece pc;
                pc.guard = g;
                pc.coeff = P.coeff;
                pc.poly = Q.subst(v, at).drop(v).scaled(MotElem(sign));
                pc.expo = (expo0 + at * (alpha * P.den)).drop(v);
                pc.den = P.den;
                out.add_piece(std::move(pc));
            };
            auto drop_guard = [&](const Guard& g) {
                Guard r;
                for (const auto& x : g.ge) r.ge.push_back(x.drop(v));
                for (const auto& c : g.cong) r.cong.push_back({c.f.drop(v), c.m});
                return r;
            };

            for (size_t i = 0; i < kl.size(); ++i) {
                Guard gi = keep;
                for (size_t h = 0; h < kl.size(); ++h) {
                    if (h == i) continue;
                    LinForm d = kl[i] - kl[h];
                    if (h < i) d.b -= 1;
                    gi.ge.push_back(d);
                }
                if (ku.empty()) {
                    emit(drop_guard(gi), kl[i], -1);
                    continue;
                }
                for (size_t j = 0; j < ku.size(); ++j) {
                    Guard gij = gi;
                    for (size_t h = 0; h < ku.size(); ++h) {
                        if (h == j) continue;
                        LinForm d = ku[h] - ku[j];
                        if (h < j) d.b -= 1;
                        gij.ge.push_back(d);
                    }
                    LinForm nonempty = ku[j] - kl[i];
                    nonempty.b += 1;
                    gij.ge.push_back(nonempty);
                    Guard dg = drop_guard(gij);
                    LinForm top = ku[j];
                    top.b += 1;
                    emit(dg, top, 1);
                    emit(dg, kl[i], -1);
                }
            }
        }
    }
    return out;
}

// ------------------------------------------------------ univariate analysis

namespace {

struct PieceRange {
    long lo = LONG_MIN;
    long hi = LONG_MAX;
    bool empty = false;
};

PieceRange range_of(const Piece& p) {
    PieceRange r;
    for (const auto& g : p.guard.ge) {
        long a = g.a[0], b = g.b;
        if (a > 0) r.lo = std::max(r.lo, ceil_div(-b, a));
        else if (a < 0) r.hi = std::min(r.hi, floor_div(b, -a));
        else if (b < 0) r.empty = true;
    }
    if (r.lo > r.hi) r.empty = true;
    return r;
}

void require_univariate(const MotFun& f) {
    if (f.nvars() != 1) throw DomainError("univariate function expected");
}

struct ClassTerm {
    CVal coeff;  // includes L^{e0}
    MPoly poly;  // in k
    long beta;
};

std::vector<ClassTerm> class_terms(const MotFun& f, const Periodicity& per, long rho) {
    std::vector<ClassTerm> out;
    long M = per.period;
    for (const auto& p : f.pieces()) {
        PieceRange rg = range_of(p);
        if (rg.empty || rg.hi != LONG_MAX) continue;
        bool ok = true;
        for (const auto& c : p.guard.cong)
            if (mod_pos(c.f.a[0] * rho + c.f.b, c.m) != 0) ok = false;
        if (!ok) continue;
        long a = p.expo.a[0], b = p.expo.b;
        if ((a * rho + b) % p.den != 0 || (a * M) % p.den != 0)
            throw DomainError("non-integral exponent in Presburger piece");
        ClassTerm t;
        t.coeff = p.coeff.scaled(MotElem::L((a * rho + b) / p.den));
        t.poly = p.poly.subst(0, LinForm({M}, rho));
        t.beta = a * M / p.den;
        out.push_back(std::move(t));
    }
    return out;
}

// beta -> (power of k -> CVal)
using Grouped = std::map<long, std::map<int, CVal>>;

void accumulate(Grouped& g, const std::vector<ClassTerm>& terms, long sign) {
    for (const auto& t : terms)
        for (const auto& [m, c] : t.poly.terms()) {
            CVal& slot = g[t.beta][m[0]];
            slot += t.coeff.scaled(c * MotElem(sign));
        }
}

long first_k(const Periodicity& per, long rho) {
    long k = ceil_div(per.r0 - rho, per.period);
    return std::max(0L, k);
}

}  // namespace

Periodicity periodicity(const MotFun& f) {
    require_univariate(f);
    Periodicity per;
    for (const auto& p : f.pieces()) {
        PieceRange rg = range_of(p);
        if (rg.empty) continue;
        if (rg.lo != LONG_MIN) per.r0 = std::max(per.r0, rg.lo);
        if (rg.hi != LONG_MAX) per.r0 = std::max(per.r0, rg.hi + 1);
        for (const auto& c : p.guard.cong) per.period = std::lcm(per.period, c.m);
        per.period = std::lcm(per.period, p.den);
    }
    return per;
}

std::string to_string(Tri t) {
    switch (t) {
        case Tri::True: return "true";
        case Tri::False: return "false";
        default: return "unknown";
    }
}

Limit limit(const MotFun& f) {
    Periodicity per = periodicity(f);
    Limit res;
    bool have = false;
    for (long rho = 0; rho < per.period; ++rho) {
        Grouped g;
        accumulate(g, class_terms(f, per, rho), 1);
        CVal value;
        for (const auto& [beta, poly] : g) {
            if (beta < 0) continue;
            for (const auto& [j, c] : poly) {
                if (c.is_zero()) continue;
                if (beta > 0 || j > 0) return Limit{};
                value += c;
            }
        }
        if (!have) {
            res.value = value;
            have = true;
        } else if (res.value != value) {
            return Limit{};
        }
    }
    res.exists = true;
    return res;
}

Tri is_increasing(const MotFun& f) {
    Periodicity per = periodicity(f);
    long M = per.period;
    long explicit_end = per.r0 + 2 * M + 2;
    for (long r = 0; r <= explicit_end; ++r)
        if (!(f.eval1(r + 1) - f.eval1(r)).is_nonneg()) return Tri::False;
    for (long rho = 0; rho < M; ++rho) {
        Grouped g;
        accumulate(g, class_terms(f, per, rho), -1);
        std::vector<ClassTerm> next;
        if (rho + 1 < M) {
            next = class_terms(f, per, rho + 1);
        } else {
            next = class_terms(f, per, 0);
            for (auto& t : next) {
                t.poly = t.poly.subst(0, LinForm({1}, 1));
                t.coeff = t.coeff.scaled(MotElem::L(t.beta));
            }
        }
        accumulate(g, next, 1);
        for (const auto& [beta, poly] : g)
            for (const auto& [j, c] : poly)
                if (!c.is_nonneg()) return Tri::Unknown;
    }
    return Tri::True;
}

Tri is_bounded_by(const MotFun& f, const CVal& g) {
    Periodicity per = periodicity(f);
    long explicit_end = std::max(64L, per.r0 + 2 * per.period + 2);
    for (long r = 0; r <= explicit_end; ++r)
        if (!(g - f.eval1(r)).is_nonneg()) return Tri::False;
    if (is_increasing(f) == Tri::True) {
        Limit l = limit(f);
        if (l.exists) return (g - l.value).is_nonneg() ? Tri::True : Tri::False;
        return Tri::Unknown;
    }
    if (is_increasing(f.scaled(CVal(-1))) == Tri::True) return Tri::True;
    return Tri::Unknown;
}

// ------------------------------------------------------ generating series

MotElem RationalSeries::coeff(long r) const {
    if (r < 0) return MotElem(0);
    std::vector<MotElem> u(r + 1, MotElem(0));
    for (const auto& [e, c] : num)
        if (e >= 0 && e <= r) u[e] += c;
    for (const auto& [alpha, beta] : den) {
        MotElem z = MotElem::L(alpha);
        for (long i = beta; i <= r; ++i) u[i] += z * u[i - beta];
    }
    return u[r];
}

std::string RationalSeries::str() const {
    std::ostringstream os;
    if (num.empty()) return "0";
    bool paren = num.size() > 1 || !den.empty();
    if (paren) os << "(";
    bool first = true;
    for (const auto& [e, c] : num) {
        if (!first) os << " + ";
        first = false;
        std::string cs = c.str();
        if (e == 0) {
            os << cs;
            continue;
        }
        if (cs != "1") os << "(" << cs << ")*";
        os << "T";
        if (e != 1) os << "^" << e;
    }
    if (paren) os << ")";
    if (!den.empty()) {
        os << "/(";
        for (size_t i = 0; i < den.size(); ++i) {
            if (i) os << "*";
            os << "(1 - ";
            if (den[i].first != 0) os << "L^" << den[i].first << "*";
            os << "T";
            if (den[i].second != 1) os << "^" << den[i].second;
            os << ")";
        }
        os << ")";
    }
    return os.str();
}

namespace {

using TPoly = std::map<long, MotElem>;

TPoly tmul(const TPoly& a, const TPoly& b) {
    TPoly r;
    for (const auto& [e1, c1] : a)
        for (const auto& [e2, c2] : b) {
            MotElem& s = r[e1 + e2];
            s += c1 * c2;
        }
    for (auto it = r.begin(); it != r.end();)
        it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
}

void tadd(TPoly& a, const TPoly& b) {
    for (const auto& [e, c] : b) a[e] += c;
    for (auto it = a.begin(); it != a.end();)
        it = it->second.is_zero() ? a.erase(it) : std::next(it);
}

MotElem point_only(const CVal& c) {
    if (c.has_etale()) throw Unsupported("generating series of a function with etale coefficients");
    return c.point_coeff();
}

}  // namespace

RationalSeries generating_series(const MotFun& f) {
    Periodicity per = periodicity(f);
    long M = per.period;
    TPoly prefix;
    // Values before the tail starts are listed explicitly.
    long tail_start = per.r0;
    for (long r = 0; r < tail_start; ++r) {
        MotElem v = point_only(f.eval1(r));
        if (!v.is_zero()) prefix[r] = v;
    }
    // factor (beta, M) -> numerator
    std::map<long, TPoly> parts;
    for (long rho = 0; rho < M; ++rho) {
        long k0 = first_k(per, rho);
        for (const auto& t : class_terms(f, per, rho)) {
            if (!t.poly.is_constant()) throw Unsupported("generating series of a non-geometric piece");
            MotElem c = point_only(t.coeff) * t.poly.constant_term() * MotElem::L(t.beta * k0);
            if (c.is_zero()) continue;
            parts[t.beta][rho + M * k0] += c;
        }
    }
    RationalSeries s;
    for (auto it = parts.begin(); it != parts.end();) {
        TPoly clean;
        tadd(clean, it->second);
        if (clean.empty()) it = parts.erase(it);
        else {
            it->second = clean;
            ++it;
        }
    }
    std::vector<long> betas;
    for (const auto& kv : parts) betas.push_back(kv.first);
    auto factor = [&](long beta) {
        TPoly p;
        p[0] = MotElem(1);
        p[M] = -MotElem::L(beta);
        return p;
    };
    TPoly total;
    TPoly all;
    all[0] = MotElem(1);
    for (long b : betas) all = tmul(all, factor(b));
    tadd(total, tmul(prefix, all));
    for (long b : betas) {
        TPoly term = parts[b];
        for (long o : betas)
            if (o != b) term = tmul(term, factor(o));
        tadd(total, term);
    }
    s.num = total;
    for (long b : betas) s.den.push_back({b, M});
    return s;
}

}  // namespace mv
