#include "mv/field.hpp"

#include "mv/errors.hpp"
#include "mv/qpoly.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace mv {

namespace {

std::vector<int> digits(int code, int p, int k) {
    std::vector<int> d(k);
    for (int i = 0; i < k; ++i) {
        d[i] = code % p;
        code /= p;
    }
    return d;
}

int undigits(const std::vector<int>& d, int p) {
    int code = 0;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) code = code * p + d[i];
    return code;
}

// Remainder of a by monic m over F_p; both dense coefficient vectors.
std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
    int dm = static_cast<int>(m.size()) - 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
        int f = a[i] % p;
        if (f == 0) continue;
        for (int j = 0; j <= dm; ++j) a[i - dm + j] = ((a[i - dm + j] - f * m[j]) % p + p) % p;
    }
    a.resize(dm);
    return a;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

bool irreducible(const std::vector<int>& m, int p) {
    int k = static_cast<int>(m.size()) - 1;
    // Trial division by every monic polynomial of degree 1..k/2.
    for (int d = 1; 2 * d <= k; ++d) {
        int count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (int code = 0; code < count; ++code) {
            std::vector<int> f = digits(code, p, d);
            f.push_back(1);
            if (poly_mod(m, f, p) == std::vector<int>(d, 0)) return false;
        }
    }
    return true;
}

}  // namespace

const Field* Field::Q() {
    static const Field q_field;
    return &q_field;
}

const Field* Field::F(int q) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Field>> cache;
    if (q < 2 || q > 256) throw DomainError("finite residue field needs 2 <= q <= 256, got " + std::to_string(q));
    int p = 0;
    for (int d = 2; d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    int k = 0;
    int r = q;
    while (r % p == 0) {
        r /= p;
        ++k;
    }
    if (r != 1 || !is_prime(p)) throw DomainError("q = " + std::to_string(q) + " is not a prime power");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[q];
    if (!slot) {
        slot.reset(new Field());
        slot->build(p, k);
    }
    return slot.get();
}

const Field* Field::parse(const std::string& name) {
    if (name == "Q" || name == "q") return Q();
    std::string s = name;
    if (!s.empty() && (s[0] == 'F' || s[0] == 'f')) s = s.substr(1);
    if (!s.empty() && (s[0] == '_' || s[0] == '<' || s[0] == '(')) s = s.substr(1);
    if (!s.empty() && (s.back() == '>' || s.back() == ')')) s.pop_back();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 4)
        throw UsageError("unknown residue field '" + name + "'");
    return F(std::stoi(s));
}

void Field::build(int p, int k) {
    p_ = p;
    k_ = k;
    q_ = 1;
    for (int i = 0; i < k; ++i) q_ *= p;
    // Smallest monic irreducible of degree k, ordered by coefficient code.
    int count = q_;
    for (int code = 0; code < count; ++code) {
        std::vector<int> m = digits(code, p, k);
        m.push_back(1);
        if (irreducible(m, p)) {
            modulus_ = m;
            break;
        }
    }
    add_.assign(q_ * q_, 0);
    mul_.assign(q_ * q_, 0);
    neg_.assign(q_, 0);
    inv_.assign(q_, 0);
    for (int a = 0; a < q_; ++a) {
        auto da = digits(a, p, k);
        std::vector<int> na(k);
        for (int i = 0; i < k; ++i) na[i] = (p - da[i]) % p;
        neg_[a] = undigits(na, p);
        for (int b = 0; b < q_; ++b) {
            auto db = digits(b, p, k);
            std::vector<int> s(k);
            for (int i = 0; i < k; ++i) s[i] = (da[i] + db[i]) % p;
            add_[a * q_ + b] = undigits(s, p);
            std::vector<int> prod(2 * k - 1, 0);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            mul_[a * q_ + b] = undigits(k > 1 ? poly_mod(prod, modulus_, p) : prod, p);
        }
    }
    for (int a = 1; a < q_; ++a)
        for (int b = 1; b < q_; ++b)
            if (mul_[a * q_ + b] == 1) inv_[a] = b;
}

std::string Field::name() const { return is_Q() ? "Q" : "F" + std::to_string(q_); }

KElem Field::from_int(long n) const {
    if (is_Q()) return n;
    long r = ((n % p_) + p_) % p_;
    return r;  // prime subfield codes are the integers 0..p-1
}

KElem Field::from_rational(const mpq_class& a) const {
    if (is_Q()) return a;
    mpz_class num = a.get_num() % p_;
    mpz_class den = a.get_den() % p_;
    if (den == 0) throw DomainError("rational " + a.get_str() + " has no image in " + name());
    long n = ((num.get_si() % p_) + p_) % p_;
    long d = ((den.get_si() % p_) + p_) % p_;
    return mul(from_int(n), inv(from_int(d)));
}

KElem Field::add(const KElem& a, const KElem& b) const {
    if (is_Q()) return a + b;
    return add_[code(a) * q_ + code(b)];
}

KElem Field::sub(const KElem& a, const KElem& b) const {
    if (is_Q()) return a - b;
    return add_[code(a) * q_ + neg_[code(b)]];
}

KElem Field::mul(const KElem& a, const KElem& b) const {
    if (is_Q()) return a * b;
    return mul_[code(a) * q_ + code(b)];
}

KElem Field::neg(const KElem& a) const {
    if (is_Q()) return -a;
    return neg_[code(a)];
}

KElem Field::inv(const KElem& a) const {
    if (a == 0) throw DomainError("inverse of zero in " + name());
    if (is_Q()) return 1 / a;
    return inv_[code(a)];
}

KElem Field::pow(const KElem& a, unsigned e) const {
    KElem r = one();
    for (unsigned i = 0; i < e; ++i) r = mul(r, a);
    return r;
}

KElem Field::generator() const {
    if (is_Q() || k_ == 1) throw DomainError("field " + name() + " has no generator z");
    return p_;  // digits (0, 1, 0, ...)
}

std::vector<KElem> Field::elements() const {
    if (is_Q()) throw DomainError("cannot enumerate Q");
    std::vector<KElem> out;
    for (int a = 0; a < q_; ++a) out.push_back(a);
    return out;
}

std::string Field::str(const KElem& a) const {
    if (is_Q() || k_ == 1) return a.get_str();
    auto d = digits(code(a), p_, k_);
    std::ostringstream os;
    bool first = true;
    for (int i = k_ - 1; i >= 0; --i) {
        if (d[i] == 0) continue;
        if (!first) os << "+";
        if (i == 0) os << d[i];
        else {
            if (d[i] != 1) os << d[i] << "*";
            os << "z";
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return first ? "0" : os.str();
}

KUPoly::KUPoly(const Field* f, std::vector<KElem> coeffs) : F(f), c(std::move(coeffs)) { trim(); }

void KUPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

KElem KUPoly::eval(const KElem& x) const {
    KElem r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = F->add(F->mul(r, x), *it);
    return r;
}

KUPoly KUPoly::derivative() const {
    std::vector<KElem> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(F->mul(F->from_int(static_cast<long>(i)), c[i]));
    return KUPoly(F, std::move(d));
}

KUPoly KUPoly::monic() const {
    if (is_zero()) return *this;
    KElem li = F->inv(c.back());
    std::vector<KElem> d;
    for (const auto& a : c) d.push_back(F->mul(a, li));
    return KUPoly(F, std::move(d));
}

std::string KUPoly::str(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        if (c[i] == 0) continue;
        std::string s = F->str(c[i]);
        bool neg = F->is_Q() && c[i] < 0;
        if (neg) s = F->str(-c[i]);
        if (!first) os << (neg ? " - " : " + ");
        else if (neg) os << "-";
        bool compound = s.find_first_of("+z") != std::string::npos;
        if (i == 0) os << s;
        else {
            if (s != "1") os << (compound ? "(" + s + ")" : s) << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

KUPoly operator+(const KUPoly& a, const KUPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<KElem> r(std::max(a.c.size(), b.c.size()), KElem(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = F->add(r[i], a.c[i]);
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->add(r[i], b.c[i]);
    return KUPoly(F, std::move(r));
}

KUPoly operator-(const KUPoly& a, const KUPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<KElem> r(std::max(a.c.size(), b.c.size()), KElem(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = F->add(r[i], a.c[i]);
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->sub(r[i], b.c[i]);
    return KUPoly(F, std::move(r));
}

KUPoly operator*(const KUPoly& a, const KUPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    if (a.is_zero() || b.is_zero()) return KUPoly(F, {});
    std::vector<KElem> r(a.c.size() + b.c.size() - 1, KElem(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] = F->add(r[i + j], F->mul(a.c[i], b.c[j]));
    return KUPoly(F, std::move(r));
}

std::pair<KUPoly, KUPoly> divmod(const KUPoly& a, const KUPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    const Field* F = a.F ? a.F : b.F;
    KUPoly r = a;
    r.F = F;
    int db = b.degree();
    if (r.degree() < db) return {KUPoly(F, {}), r};
    std::vector<KElem> q(r.degree() - db + 1, KElem(0));
    KElem li = F->inv(b.c.back());
    while (!r.is_zero() && r.degree() >= db) {
        int k = r.degree() - db;
        KElem f = F->mul(r.c.back(), li);
        q[k] = f;
        for (int i = 0; i <= db; ++i) r.c[i + k] = F->sub(r.c[i + k], F->mul(f, b.c[i]));
        r.trim();
    }
    return {KUPoly(F, std::move(q)), r};
}

KUPoly gcd(KUPoly a, KUPoly b) {
    while (!b.is_zero()) {
        KUPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

bool is_squarefree(const KUPoly& p) {
    if (p.degree() <= 0) return !p.is_zero();
    KUPoly d = p.derivative();
    if (d.is_zero()) return false;
    return gcd(p, d).degree() == 0;
}

std::vector<std::pair<KElem, int>> roots_in_k(const KUPoly& p) {
    std::vector<std::pair<KElem, int>> out;
    if (p.degree() <= 0) return out;
    if (p.F->is_Q()) return rational_roots(QPoly(p.c));
    for (const auto& x : p.F->elements()) {
        KUPoly lin(p.F, {p.F->neg(x), KElem(1)});
        KUPoly cur = p;
        int m = 0;
        while (cur.degree() >= 1 && cur.eval(x) == 0) {
            cur = divmod(cur, lin).first;
            ++m;
        }
        if (m > 0) out.push_back({x, m});
    }
    return out;
}

}  // namespace mv
