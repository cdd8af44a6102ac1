#include "mv/qpoly.hpp"

#include "mv/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mv {

QPoly::QPoly(std::vector<mpq_class> coeffs) : c(std::move(coeffs)) { trim(); }

QPoly QPoly::constant(const mpq_class& a) { return QPoly({a}); }

QPoly QPoly::x_minus(const mpq_class& a) { return QPoly({-a, mpq_class(1)}); }

mpq_class QPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c.size())) return 0;
    return c[i];
}

void QPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

mpq_class QPoly::eval(const mpq_class& x) const {
    mpq_class r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

QPoly QPoly::derivative() const {
    std::vector<mpq_class> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<long>(i));
    return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
    if (is_zero()) return *this;
    mpq_class l = lead();
    QPoly r = *this;
    for (auto& a : r.c) a /= l;
    return r;
}

std::string QPoly::str(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        if (c[i] == 0) continue;
        mpq_class a = c[i];
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        mpq_class m = abs(a);
        if (i == 0 || m != 1) {
            os << m.get_str();
            if (i > 0) os << "*";
        }
        if (i > 0) os << var;
        if (i > 1) os << "^" << i;
        first = false;
    }
    return os.str();
}

QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<mpq_class> r(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return QPoly(std::move(r));
}

QPoly operator-(const QPoly& a, const QPoly& b) {
    std::vector<mpq_class> r(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return QPoly(std::move(r));
}

QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<mpq_class> r(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return QPoly(std::move(r));
}

QPoly operator*(const mpq_class& s, const QPoly& a) {
    QPoly r = a;
    for (auto& x : r.c) x *= s;
    r.trim();
    return r;
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    QPoly r = a;
    int db = b.degree();
    if (r.degree() < db) return {QPoly(), r};
    std::vector<mpq_class> q(r.degree() - db + 1);
    while (!r.is_zero() && r.degree() >= db) {
        int k = r.degree() - db;
        mpq_class f = r.lead() / b.lead();
        q[k] = f;
        for (int i = 0; i <= db; ++i) r.c[i + k] -= f * b.c[i];
        r.trim();
    }
    return {QPoly(std::move(q)), r};
}

QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

std::pair<mpq_class, std::vector<QPoly>> squarefree_decomposition(const QPoly& a) {
    if (a.is_zero()) throw DomainError("squarefree decomposition of zero");
    mpq_class lc = a.lead();
    QPoly f = a.monic();
    std::vector<QPoly> out;
    if (f.degree() == 0) return {lc, out};
    QPoly fp = f.derivative();
    QPoly g = gcd(f, fp);
    QPoly b = divmod(f, g).first;
    QPoly cpol = divmod(fp, g).first;
    QPoly d = cpol - b.derivative();
    while (b.degree() > 0) {
        QPoly h = gcd(b, d);
        out.push_back(h);
        b = divmod(b, h).first;
        cpol = divmod(d, h).first;
        d = cpol - b.derivative();
    }
    while (!out.empty() && out.back().degree() == 0) out.pop_back();
    return {lc, out};
}

namespace {

int sign(const mpq_class& x) { return sgn(x); }

std::vector<QPoly> sturm_chain(const QPoly& p) {
    std::vector<QPoly> s{p, p.derivative()};
    while (!s.back().is_zero()) {
        QPoly r = divmod(s[s.size() - 2], s.back()).second;
        if (r.is_zero()) break;
        s.push_back(mpq_class(-1) * r);
    }
    return s;
}

int variations(const std::vector<int>& signs) {
    int v = 0, last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

int variations_at(const std::vector<QPoly>& chain, const mpq_class& x) {
    std::vector<int> s;
    for (const auto& q : chain) s.push_back(sign(q.eval(x)));
    return variations(s);
}

int variations_at_inf(const std::vector<QPoly>& chain) {
    std::vector<int> s;
    for (const auto& q : chain) s.push_back(q.is_zero() ? 0 : sign(q.lead()));
    return variations(s);
}

} // namespace

int sturm_roots_above(const QPoly& p, const mpq_class& lo) {
    if (p.degree() <= 0) return 0;
    auto chain = sturm_chain(p);
    return variations_at(chain, lo) - variations_at_inf(chain);
}

int sturm_roots_between(const QPoly& p, const mpq_class& lo, const mpq_class& hi) {
    if (p.degree() <= 0) return 0;
    auto chain = sturm_chain(p);
    return variations_at(chain, lo) - variations_at(chain, hi);
}

namespace {

std::vector<mpz_class> divisors(mpz_class n) {
    n = abs(n);
    std::vector<mpz_class> primes;
    std::vector<int> exps;
    mpz_class d = 2;
    long steps = 0;
    while (d * d <= n) {
        if (++steps > 2000000) throw Unsupported("rational root search: coefficient too large to factor");
        if (n % d == 0) {
            int e = 0;
            while (n % d == 0) {
                n /= d;
                ++e;
            }
            primes.push_back(d);
            exps.push_back(e);
        }
        d += (d == 2 ? 1 : 2);
    }
    if (n > 1) {
        primes.push_back(n);
        exps.push_back(1);
    }
    std::vector<mpz_class> out{1};
    for (size_t i = 0; i < primes.size(); ++i) {
        std::vector<mpz_class> next;
        for (const auto& x : out) {
            mpz_class pw = 1;
            for (int e = 0; e <= exps[i]; ++e) {
                next.push_back(x * pw);
                pw *= primes[i];
            }
        }
        out = std::move(next);
    }
    return out;
}

} // namespace

std::vector<std::pair<mpq_class, int>> rational_roots(const QPoly& p) {
    std::vector<std::pair<mpq_class, int>> out;
    if (p.degree() <= 0) return out;
    auto [lc, parts] = squarefree_decomposition(p);
    for (size_t k = 0; k < parts.size(); ++k) {
        QPoly f = parts[k];
        if (f.degree() <= 0) continue;
        int mult = static_cast<int>(k) + 1;
        // strip the root at zero
        if (f.c[0] == 0) {
            out.push_back({mpq_class(0), mult});
            f = divmod(f, QPoly::x_minus(0)).first;
        }
        if (f.degree() <= 0) continue;
        mpz_class den = 1;
        for (const auto& a : f.c) den = lcm(den, a.get_den());
        std::vector<mpz_class> ic;
        for (const auto& a : f.c) ic.push_back(mpz_class(a * den));
        auto num_div = divisors(ic.front());
        auto den_div = divisors(ic.back());
        std::vector<mpq_class> found;
        for (const auto& a : num_div) {
            for (const auto& b : den_div) {
                for (int s : {1, -1}) {
                    mpq_class cand(s * a, b);
                    cand.canonicalize();
                    if (std::find(found.begin(), found.end(), cand) != found.end()) continue;
                    if (f.eval(cand) == 0) found.push_back(cand);
                }
            }
        }
        for (const auto& r : found) out.push_back({r, mult});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

} // namespace mv
