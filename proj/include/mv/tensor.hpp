#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mv {

// Commutative semiring on nonnegative integers: N when cap = 0, otherwise
// {0, ..., cap} with sums and products truncated at cap.
class Semiring {
public:
    static Semiring naturals() { return Semiring(0); }
    static Semiring capped(long cap);

    long zero() const { return 0; }
    long one() const { return 1; }
    long add(long a, long b) const;
    long mul(long a, long b) const;
    bool finite() const { return cap_ > 0; }
    long cap() const { return cap_; }
    // Every c with add(c, b) == a.
    std::vector<long> complements(long a, long b) const;
    // Every s with mul(s, b) == a, up to bound for N.
    std::vector<long> quotients(long a, long b, long bound) const;
    std::vector<long> elements(long bound) const;  // finite: all; N: 0..bound
    std::string name() const;
    bool operator==(const Semiring& o) const { return cap_ == o.cap_; }

private:
    explicit Semiring(long cap) : cap_(cap) {}
    long cap_;
};

std::vector<Semiring> registered_semirings();

using Vec = std::vector<long>;

// Free semimodule S^rank.
struct FreeModule {
    Semiring S = Semiring::naturals();
    int rank = 1;

    Vec zero() const { return Vec(rank, 0); }
    Vec basis(int i) const;
    Vec add(const Vec& a, const Vec& b) const;
    Vec scale(long s, const Vec& a) const;
    bool is_zero(const Vec& a) const;
};

// Element of L = S^(M1 x M2): finite combination of pairs [m1, m2].
class TensorElem {
public:
    using Key = std::pair<Vec, Vec>;

    TensorElem() = default;
    TensorElem(const FreeModule& M1, const FreeModule& M2) : M1_(M1), M2_(M2) {}
    static TensorElem pair(const FreeModule& M1, const FreeModule& M2, const Vec& a, const Vec& b, long c = 1);

    const FreeModule& M1() const { return M1_; }
    const FreeModule& M2() const { return M2_; }
    const std::map<Key, long>& terms() const { return t_; }
    long coeff(const Key& k) const;
    void add_term(const Key& k, long c);
    TensorElem operator+(const TensorElem& o) const;
    TensorElem scaled(long s) const;
    bool operator==(const TensorElem& o) const { return t_ == o.t_; }
    bool operator<(const TensorElem& o) const { return t_ < o.t_; }
    std::string str() const;

private:
    FreeModule M1_, M2_;
    std::map<Key, long> t_;  // no zero coefficients
};

// Coefficients on [e_i, f_j] after full bilinear expansion, row-major.
Vec normal_form(const TensorElem& a);
// sum_ij [c_ij e_i, f_j]: scalars placed on the first slot.
TensorElem from_normal_form(const FreeModule& M1, const FreeModule& M2, const Vec& nf);

// a = sum_j s_j b_j and b = sum_j s_j b'_j with (b_j, b'_j) in the symmetric
// generating relations, using at most max_terms non-trivial pairs.
bool one_step_related(const TensorElem& a, const TensorElem& b, int max_terms = 2);
// All elements one single-pair rewrite away from a, restricted to module
// entries <= entry_bound and coefficients <= coeff_bound.
std::vector<TensorElem> rewrites(const TensorElem& a, long entry_bound, long coeff_bound);

enum class Equiv { Yes, No, NoWithinBound };
std::string equiv_str(Equiv e);
// Complete decision through the normal form (free modules).
Equiv equiv(const TensorElem& a, const TensorElem& b);
// Bidirectional chain search of at most step_bound rewrites; never answers No.
Equiv equiv_search(const TensorElem& a, const TensorElem& b, int step_bound);

// Membership in the sub-semimodule of M generated by gens.
bool in_span(const FreeModule& M, const std::vector<Vec>& gens, const Vec& v);
// Membership of the class of a in U = <u1 (x) m2, m1 (x) u2>.
Equiv in_U(const TensorElem& a, const std::vector<Vec>& U1, const std::vector<Vec>& U2);
// Membership of a in the span of the pairs [u1, m2], [m1, u2] inside L.
bool in_U_tilde(const TensorElem& a, const std::vector<Vec>& U1, const std::vector<Vec>& U2);

struct StarReport {
    long tested = 0;
    bool holds = true;
    std::string counterexample;
};
// Samples (m, m', s != 0) with s m + m' in <gens> and checks m, m' in <gens>.
StarReport star_check(const FreeModule& M, const std::vector<Vec>& gens, long samples, uint64_t seed = 1);

struct LemmaReport {
    StarReport scalars, u1, u2, tensor;
    long closure_steps = 0;  // rewrites of elements of U~ that stayed in U~
    bool holds = true;
};
// Checks the hypotheses ((*) for {0} in S, U1 in M1, U2 in M2) by sampling,
// raising HypothesisFailed on a violation, then (*) for U in M1 (x) M2 and
// closure of U~ under rewrites.
LemmaReport lemma_check(const FreeModule& M1, const FreeModule& M2, const std::vector<Vec>& U1,
                        const std::vector<Vec>& U2, long samples, uint64_t seed = 1);

}  // namespace mv
