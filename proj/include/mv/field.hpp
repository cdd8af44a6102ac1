#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace mv {

// Residue field elements. Over Q the value itself; over F_q an integer code
// in [0, q) whose base-p digits are the coefficients in the generator z.
using KElem = mpq_class;

class Field {
public:
    static const Field* Q();
    // q = p^k <= 256. Fields are interned, so pointer equality is field equality.
    static const Field* F(int q);
    static const Field* parse(const std::string& name);

    bool is_Q() const { return q_ == 0; }
    int q() const { return q_; }
    int p() const { return p_; }
    int k() const { return k_; }
    std::string name() const;

    KElem zero() const { return 0; }
    KElem one() const { return 1; }
    KElem from_int(long n) const;
    KElem from_rational(const mpq_class& a) const;
    KElem add(const KElem& a, const KElem& b) const;
    KElem sub(const KElem& a, const KElem& b) const;
    KElem mul(const KElem& a, const KElem& b) const;
    KElem neg(const KElem& a) const;
    KElem inv(const KElem& a) const;
    KElem div(const KElem& a, const KElem& b) const { return mul(a, inv(b)); }
    KElem pow(const KElem& a, unsigned e) const;
    bool is_zero(const KElem& a) const { return a == 0; }
    KElem generator() const;  // z, the class of x in F_p[x]/(m)
    std::vector<KElem> elements() const;
    int code(const KElem& a) const { return static_cast<int>(a.get_num().get_si()); }
    std::string str(const KElem& a) const;

    // Integer tables for fast F_q arithmetic, indexed a*q + b.
    const std::vector<int>& add_table() const { return add_; }
    const std::vector<int>& mul_table() const { return mul_; }
    const std::vector<int>& inv_table() const { return inv_; }
    const std::vector<int>& neg_table() const { return neg_; }
    const std::vector<int>& modulus() const { return modulus_; }

private:
    Field() = default;
    void build(int p, int k);
    int q_ = 0, p_ = 0, k_ = 0;
    std::vector<int> add_, mul_, inv_, neg_, modulus_;
};

// Univariate polynomial over a residue field, c[i] coefficient of x^i.
struct KUPoly {
    const Field* F = nullptr;
    std::vector<KElem> c;

    KUPoly() = default;
    KUPoly(const Field* f, std::vector<KElem> coeffs);
    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    void trim();
    KElem eval(const KElem& x) const;
    KUPoly derivative() const;
    KUPoly monic() const;
    std::string str(const char* var = "x") const;
    bool operator==(const KUPoly& o) const { return F == o.F && c == o.c; }
};

KUPoly operator+(const KUPoly& a, const KUPoly& b);
KUPoly operator-(const KUPoly& a, const KUPoly& b);
KUPoly operator*(const KUPoly& a, const KUPoly& b);
std::pair<KUPoly, KUPoly> divmod(const KUPoly& a, const KUPoly& b);
KUPoly gcd(KUPoly a, KUPoly b);
bool is_squarefree(const KUPoly& p);
// Distinct roots lying in k, with multiplicity. Over Q only rational roots.
std::vector<std::pair<KElem, int>> roots_in_k(const KUPoly& p);

}  // namespace mv
