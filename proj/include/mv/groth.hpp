#pragma once

#include <map>
#include <string>
#include <vector>

#include "mv/field.hpp"
#include "mv/mot_ring.hpp"

namespace mv {

// Generator of the 0-dimensional Grothendieck semiring: [k^m] or the zero
// set of a squarefree polynomial over k.
struct ClassAtom {
    enum class Kind { PowerOfL, Etale };
    Kind kind = Kind::PowerOfL;
    long m = 0;
    KUPoly poly;

    static ClassAtom power_of_L(long m);
    static ClassAtom point() { return power_of_L(0); }
    static ClassAtom etale(const KUPoly& p);
};

// Finite combination of atoms with coefficients in A. Normal form: [k^m]
// folds into L^m on the point atom; over F_q an etale atom is replaced by
// its number of rational roots; over Q rational roots are split off and the
// remaining monic factor is kept as the atom key.
class CVal {
public:
    using Key = std::vector<mpq_class>;  // monic Q-polynomial; empty = point

    CVal() = default;
    CVal(const MotElem& c);  // NOLINT implicit: c * [pt]
    CVal(long c) : CVal(MotElem(c)) {}  // NOLINT
    static CVal atom(const ClassAtom& a, const MotElem& coeff = MotElem(1));

    const std::map<Key, MotElem>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool has_etale() const;
    MotElem point_coeff() const;

    CVal operator+(const CVal& o) const;
    CVal operator-(const CVal& o) const;
    CVal operator-() const;
    CVal& operator+=(const CVal& o) { return *this = *this + o; }
    CVal& operator-=(const CVal& o) { return *this = *this - o; }
    // Signed scaling, no positivity check.
    CVal scaled(const MotElem& m) const;
    CVal operator*(const CVal& o) const;
    bool operator==(const CVal& o) const;
    bool operator!=(const CVal& o) const { return !(*this == o); }

    // Componentwise membership of every coefficient in A_+.
    bool is_nonneg() const;
    mpq_class count_points(int q) const;
    // Value at L = q for atom-free values.
    mpq_class eval_at(const mpq_class& q) const;
    std::string str() const;

    static std::string key_str(const Key& k);

private:
    void add_term(const Key& k, const MotElem& c);
    std::map<Key, MotElem> terms_;
};

CVal mu0_finite(const std::vector<ClassAtom>& atoms);
mpq_class count_points(const CVal& c, int q);
CVal cval_add(const CVal& a, const CVal& b);
// Raises NegativeCoefficient unless m is in A_+.
CVal cval_scale(const CVal& a, const MotElem& m);

}  // namespace mv
