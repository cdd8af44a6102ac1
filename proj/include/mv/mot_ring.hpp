#pragma once

#include <gmpxx.h>

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mv/qpoly.hpp"

namespace mv {

// Laurent polynomial in L. Coefficients are stored as rationals so that
// closed-form sums stay exact; elements built from integer data stay integral.
class LaurentPolyL {
public:
    LaurentPolyL() = default;
    static LaurentPolyL monomial(long exp, const mpq_class& coeff = 1);
    static LaurentPolyL constant(const mpq_class& c) { return monomial(0, c); }

    const std::map<long, mpq_class>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    long max_exp() const { return terms_.rbegin()->first; }
    long min_exp() const { return terms_.begin()->first; }
    mpq_class coeff(long e) const;
    void add_term(long e, const mpq_class& c);

    LaurentPolyL operator+(const LaurentPolyL& o) const;
    LaurentPolyL operator-(const LaurentPolyL& o) const;
    LaurentPolyL operator*(const LaurentPolyL& o) const;
    LaurentPolyL operator-() const;
    LaurentPolyL shift(long k) const;  // times L^k
    bool operator==(const LaurentPolyL& o) const { return terms_ == o.terms_; }
    bool operator!=(const LaurentPolyL& o) const { return terms_ != o.terms_; }

    mpq_class eval(const mpq_class& q) const;
    // Exact division by 1 - L^i, if it divides.
    bool divide_one_minus(long i, LaurentPolyL& out) const;
    // Polynomial part after multiplying by L^{-min_exp}, as a QPoly.
    QPoly to_qpoly() const;
    std::string str() const;

private:
    std::map<long, mpq_class> terms_;
};

// Element of A = Z[L, L^-1, 1/(1 - L^i)]: num / prod_{i in den} (1 - L^i).
class MotElem {
public:
    static constexpr long NEG_INF = std::numeric_limits<long>::min();

    MotElem() = default;
    MotElem(long c) : num_(LaurentPolyL::constant(c)) {}  // NOLINT implicit
    MotElem(const mpq_class& c) : num_(LaurentPolyL::constant(c)) {}  // NOLINT
    MotElem(LaurentPolyL num, std::vector<long> den);

    static MotElem L(long e = 1) { return MotElem(LaurentPolyL::monomial(e), {}); }
    // 1 / (1 - L^a) for a != 0.
    static MotElem inv_one_minus_L(long a);

    const LaurentPolyL& num() const { return num_; }
    const std::vector<long>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    MotElem operator+(const MotElem& o) const;
    MotElem operator-(const MotElem& o) const;
    MotElem operator*(const MotElem& o) const;
    MotElem operator-() const;
    MotElem& operator+=(const MotElem& o) { return *this = *this + o; }
    MotElem& operator-=(const MotElem& o) { return *this = *this - o; }
    MotElem& operator*=(const MotElem& o) { return *this = *this * o; }
    MotElem shift(long k) const { return MotElem(num_.shift(k), den_); }
    MotElem pow(unsigned k) const;

    // Semantic equality by cross multiplication.
    bool operator==(const MotElem& o) const;
    bool operator!=(const MotElem& o) const { return !(*this == o); }

    long degree() const;
    mpq_class eval_at(const mpq_class& q) const;
    bool is_nonneg() const;
    // Laurent polynomial value if den is empty after cancellation.
    bool is_laurent() const { return den_.empty(); }
    std::string str() const;

private:
    void cancel();
    LaurentPolyL num_;
    std::vector<long> den_;  // sorted, each i > 0
};

inline MotElem add(const MotElem& a, const MotElem& b) { return a + b; }
inline MotElem mul(const MotElem& a, const MotElem& b) { return a * b; }
inline MotElem neg(const MotElem& a) { return -a; }
inline long degree(const MotElem& a) { return a.degree(); }
inline mpq_class eval_at(const MotElem& a, const mpq_class& q) { return a.eval_at(q); }
inline bool is_nonneg(const MotElem& a) { return a.is_nonneg(); }

// Decide whether a rational polynomial is >= 0 on the open interval (1, inf).
bool nonneg_above_one(const QPoly& p);

}  // namespace mv
