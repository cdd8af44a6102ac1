#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mv/groth.hpp"
#include "mv/mot_ring.hpp"

namespace mv {

// Integer affine form sum a[i] x_i + b.
struct LinForm {
    std::vector<long> a;
    long b = 0;

    LinForm() = default;
    LinForm(std::vector<long> coeffs, long constant) : a(std::move(coeffs)), b(constant) {}
    static LinForm constant(int nvars, long b) { return LinForm(std::vector<long>(nvars, 0), b); }
    static LinForm var(int nvars, int i, long coef = 1, long b = 0);

    long eval(const std::vector<long>& x) const;
    bool is_constant() const;
    LinForm operator+(const LinForm& o) const;
    LinForm operator-(const LinForm& o) const;
    LinForm operator*(long s) const;
    // Replace x_var by the form f (f may itself mention x_var).
    LinForm subst(int var, const LinForm& f) const;
    LinForm drop(int var) const;
    bool operator==(const LinForm& o) const { return a == o.a && b == o.b; }
};

struct Congruence {
    LinForm f;  // f(x) = 0 mod m
    long m = 1;
};

// Conjunction of f >= 0 and congruence constraints.
struct Guard {
    std::vector<LinForm> ge;
    std::vector<Congruence> cong;

    bool holds(const std::vector<long>& x) const;
    Guard operator&(const Guard& o) const;
    static Guard at_least(int nvars, int var, long lo);
    static Guard at_most(int nvars, int var, long hi);
    static Guard equal(int nvars, int var, long v) { return at_least(nvars, var, v) & at_most(nvars, var, v); }
    static Guard congruent(int nvars, int var, long residue, long m);
};

// Polynomial in the integer variables with coefficients in A.
class MPoly {
public:
    using Mono = std::vector<int>;

    MPoly() = default;
    explicit MPoly(int nvars) : n_(nvars) {}
    static MPoly constant(int nvars, const MotElem& c);
    static MPoly var(int nvars, int i);
    static MPoly from_linform(const LinForm& f);

    int nvars() const { return n_; }
    const std::map<Mono, MotElem>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    MotElem constant_term() const;
    int degree_in(int var) const;
    MPoly coeff_in(int var, int j) const;  // coefficient of x_var^j

    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator*(const MPoly& o) const;
    MPoly scaled(const MotElem& s) const;
    MPoly pow(unsigned k) const;
    MPoly subst(int var, const LinForm& f) const;
    MPoly drop(int var) const;
    MotElem eval(const std::vector<long>& x) const;
    std::string str(const std::vector<std::string>& names) const;

private:
    void add_term(const Mono& m, const MotElem& c);
    int n_ = 0;
    std::map<Mono, MotElem> t_;
};

// One Presburger piece: [guard] * coeff * poly(x) * L^{expo(x) / den}.
struct Piece {
    Guard guard;
    CVal coeff;
    MPoly poly;
    LinForm expo;
    long den = 1;
};

class MotFun {
public:
    MotFun() = default;
    explicit MotFun(int nvars, std::vector<std::string> names = {});

    int nvars() const { return n_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    void add_piece(Piece p);
    // coeff * L^{expo/den} on guard, polynomial factor 1.
    void add(const Guard& g, const CVal& coeff, const LinForm& expo, long den = 1);

    CVal eval(const std::vector<long>& x) const;
    CVal eval1(long r) const { return eval({r}); }

    MotFun operator+(const MotFun& o) const;
    MotFun operator-(const MotFun& o) const;
    MotFun scaled(const CVal& c) const;
    // Multiply by L^{e(x)}.
    MotFun times_L(const LinForm& e) const;
    std::string str() const;

private:
    int n_ = 0;
    std::vector<std::string> names_;
    std::vector<Piece> pieces_;
};

CVal eval(const MotFun& f, const std::vector<long>& x);

// Sum over x_var in [lo, hi] (hi = none means +infinity). lo and hi are
// forms over the full variable list with zero coefficient on var. The
// result no longer has the variable var.
MotFun sum_over(const MotFun& f, int var, const LinForm& lo, const std::optional<LinForm>& hi);

struct Limit {
    bool exists = false;
    CVal value;
};

enum class Tri { False, True, Unknown };
std::string to_string(Tri t);

// Univariate analysis, the domain is r >= 0.
Limit limit(const MotFun& f);
Tri is_increasing(const MotFun& f);
Tri is_bounded_by(const MotFun& f, const CVal& g);

// sum_r num_r T^r / prod (1 - L^alpha T^beta)
struct RationalSeries {
    std::map<long, MotElem> num;
    std::vector<std::pair<long, long>> den;  // (alpha, beta)

    MotElem coeff(long r) const;
    std::string str() const;
};

RationalSeries generating_series(const MotFun& f);

// Threshold after which every guard of a univariate function is periodic,
// together with the period.
struct Periodicity {
    long r0 = 0;
    long period = 1;
};
Periodicity periodicity(const MotFun& f);

}  // namespace mv
