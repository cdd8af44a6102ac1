#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mv/measure.hpp"
#include "mv/riso.hpp"

namespace mv {

struct SampleOptions {
    int depth = 6;  // working precision of sampled matrices and offsets
    long samples = 20000;
    uint64_t seed = 42;
};

// C(n, d) mu_d(X) for X inside a d-dimensional affine subspace.
CVal v_d_linear(const CellSet& X);

// lambda^-n mu{x : B(x, lambda) meets X} with lambda = L^-r, i.e. L^(rn) mu(T_r(X)).
MotFun entropy(const CellSet& X, const LocusOptions& opt = {});

// V_i(X) where a closed form is available: i = 0 from the riso module,
// i > dim X is 0, i = dim X = n, and V_1 of unions of line segments in K^2.
std::optional<CVal> v_i_exact(const CellSet& X, int i);

// V_1 of a curve in K^2 at k = F_q: Monte Carlo over (g, y) in
// GL_2(O) x K, counting the points of X on the line {(g^-1 x)_2 = y}.
Estimate v_i_estimate(const CellSet& X, int i, int q, const SampleOptions& opt = {});
// Only slice points inside B are counted.
Estimate v_i_rel_estimate(const CellSet& X, const Ball& B, int i, int q, const SampleOptions& opt = {});

enum class Verdict { True, False, Inconclusive };
std::string verdict_str(Verdict v);

struct CheckReport {
    std::string name;
    std::string mode;  // "symbolic" or "specialized"
    std::string lhs, rhs;
    mpq_class lhs_value, rhs_value;
    double half_width = 0;
    Verdict verdict = Verdict::Inconclusive;
    double runtime = 0;  // seconds
    std::vector<std::string> details;
};

// |V_1 / (C(2,1) mu_1) - 1| <= tol, with the sampling half-width on the side
// of the verdict.
CheckReport check_crofton(const CellSet& X, int q, const SampleOptions& opt = {}, double tol = 0.05);
// M(X, q^-r) (1 - 1/q)^n <= sum_i q^(ri) V_i(X) for r in [r_lo, r_hi].
CheckReport check_entropy(const CellSet& X, int q, long r_lo, long r_hi, const SampleOptions& opt = {});
// sum_i lambda^-i V_i(X, B) >= (1 - 1/q)^n, lambda the radius of B.
CheckReport check_sum_variations(const CellSet& X, const Ball& B, int q, const SampleOptions& opt = {});
// lambda^-n int V_i(X, B(x, lambda)) dx <= V_i(X) with lambda = q^-r.
CheckReport check_vi_integral_bound(const CellSet& X, int i, int q, long r, const SampleOptions& opt = {});

}  // namespace mv
