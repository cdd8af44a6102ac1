#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace mv {

// Dense univariate polynomial over Q, c[i] is the coefficient of x^i.
struct QPoly {
    std::vector<mpq_class> c;

    QPoly() = default;
    explicit QPoly(std::vector<mpq_class> coeffs);
    static QPoly constant(const mpq_class& a);
    static QPoly x_minus(const mpq_class& a);

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    const mpq_class& lead() const { return c.back(); }
    mpq_class coeff(int i) const;
    void trim();

    mpq_class eval(const mpq_class& x) const;
    QPoly derivative() const;
    QPoly monic() const;
    std::string str(const char* var = "x") const;

    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c == b.c; }
    friend bool operator!=(const QPoly& a, const QPoly& b) { return !(a == b); }
};

QPoly operator+(const QPoly& a, const QPoly& b);
QPoly operator-(const QPoly& a, const QPoly& b);
QPoly operator*(const QPoly& a, const QPoly& b);
QPoly operator*(const mpq_class& s, const QPoly& a);

// Euclidean division a = q*b + r with deg r < deg b.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
QPoly gcd(QPoly a, QPoly b);

// Yun decomposition: returns (c, [P1, P2, ...]) with a = c * prod Pk^k,
// each Pk squarefree, monic, pairwise coprime.
std::pair<mpq_class, std::vector<QPoly>> squarefree_decomposition(const QPoly& a);

// Number of distinct real roots of a squarefree polynomial in the open
// interval (lo, +inf); lo must not be a root.
int sturm_roots_above(const QPoly& p, const mpq_class& lo);

// Number of distinct real roots in (lo, hi]; neither endpoint may be a root.
int sturm_roots_between(const QPoly& p, const mpq_class& lo, const mpq_class& hi);

// Distinct rational roots with multiplicities.
std::vector<std::pair<mpq_class, int>> rational_roots(const QPoly& p);

} // namespace mv
