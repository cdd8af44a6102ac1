#pragma once

#include <climits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mv/field.hpp"
#include "mv/presburger.hpp"

namespace mv {

constexpr long VAL_INF = LONG_MAX;
constexpr long EXACT = LONG_MAX;

// Element of K = k((t)): known coefficients below prec (prec = EXACT for
// Laurent polynomials stored in full).
class Series {
public:
    Series() : F_(Field::Q()) {}
    explicit Series(const Field* F) : F_(F) {}
    Series(const Field* F, std::map<long, KElem> terms, long prec = EXACT);
    static Series constant(const Field* F, const KElem& c) { return monomial(F, 0, c); }
    static Series monomial(const Field* F, long e, const KElem& c = 1);

    const Field* field() const { return F_; }
    const std::map<long, KElem>& terms() const { return terms_; }
    long prec() const { return prec_; }
    bool exact() const { return prec_ == EXACT; }
    bool is_zero() const { return exact() && terms_.empty(); }

    long val() const;  // VAL_INF for exact zero, PrecisionLoss if undetermined
    KElem ac() const;
    KElem res() const;
    KElem coeff(long e) const;
    // Lower bound for val that never throws.
    long val_lower_bound() const;

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator*(const Series& o) const;
    Series operator-() const;
    Series shift(long k) const;  // times t^k
    Series scaled(const KElem& a) const;
    // Terms with exponent < n, as an exact element.
    Series truncated(long n) const;
    // Same digits, precision lowered to n.
    Series with_prec(long n) const;
    bool operator==(const Series& o) const;
    bool operator!=(const Series& o) const { return !(*this == o); }
    bool operator<(const Series& o) const;  // arbitrary total order on exact elements
    std::string str() const;

private:
    void add_term(long e, const KElem& c);
    const Field* F_;
    std::map<long, KElem> terms_;
    long prec_ = EXACT;
};

// Closed ball {y : val(y - center) >= rad} in K^n (max norm).
struct Ball {
    std::vector<Series> center;
    long rad = 0;

    Ball() = default;
    Ball(std::vector<Series> c, long r);
    static Ball one_dim(const Series& c, long r) { return Ball({c}, r); }
    int dim() const { return static_cast<int>(center.size()); }
    bool contains(const std::vector<Series>& p) const;
    bool contains(const Ball& b) const;
    bool intersects(const Ball& b) const;
    bool operator==(const Ball& b) const;
    bool operator<(const Ball& b) const;
    std::string str() const;
};

// Univariate polynomial over K with exact coefficients.
struct KPoly {
    const Field* F = nullptr;
    std::vector<Series> c;

    KPoly() = default;
    KPoly(const Field* f, std::vector<Series> coeffs);
    static KPoly constant(const Series& a);
    static KPoly x(const Field* F);
    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    void trim();
    Series eval(const Series& x) const;
    KPoly derivative() const;
    // g(a + t^s u) as a polynomial in u.
    KPoly taylor_shift(const Series& a, long s) const;
    std::string str(const char* var = "x") const;
    bool operator==(const KPoly& o) const { return c == o.c; }
};

KPoly operator+(const KPoly& a, const KPoly& b);
KPoly operator-(const KPoly& a, const KPoly& b);
KPoly operator*(const KPoly& a, const KPoly& b);

struct NewtonPolygon {
    // (root valuation, multiplicity), increasing valuation
    std::vector<std::pair<mpq_class, int>> slopes;
    int zero_roots = 0;  // multiplicity of the root x = 0
};
NewtonPolygon newton_polygon(const KPoly& p);

// Data of g on the ball B(a, s): Gauss valuation m of g(a + t^s u), its
// reduction gbar in k[u], the Weierstrass degree w = deg gbar.
struct Expansion {
    KPoly h;
    long m = VAL_INF;
    KUPoly red;
    int w = 0;
    bool point_type = false;  // h_j = 0 exactly for j < w
};
Expansion expand(const KPoly& g, const Series& a, long s);

// Threshold of a valuation constraint: the variable r or a constant.
struct Threshold {
    bool symbolic = false;
    long value = 0;
    static Threshold r() { return {true, 0}; }
    static Threshold constant(long c) { return {false, c}; }
};

struct ValConstraint {
    KPoly g;
    Threshold th;
};

struct LocusOptions {
    int max_depth = 32;
};

// mu_1{x in B(a, s) : val g_k(x) >= th_k for all k} as a function of r,
// valid for lo <= r <= hi.
MotFun val_locus(const Series& a, long s, const std::vector<ValConstraint>& cons, long lo,
                 std::optional<long> hi, const LocusOptions& opt = {});
// Constant thresholds only.
CVal val_locus_const(const Series& a, long s, const std::vector<ValConstraint>& cons,
                     const LocusOptions& opt = {});
// mu_1{x in D : val p(x) >= r} for r >= rlo.
MotFun val_locus_measure(const KPoly& p, const Ball& D, long rlo = 0, const LocusOptions& opt = {});

}  // namespace mv
