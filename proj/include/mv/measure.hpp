#pragma once

#include <optional>

#include "mv/dsl.hpp"
#include "mv/presburger.hpp"

namespace mv {

// mu_d(X). Cells of dimension below d are null for mu_d; d > dim(X) gives 0.
CVal measure(const CellSet& X, std::optional<int> d = {});

// mu_n(T_r(X)) as a function of r >= 0.
MotFun tube_measure(const CellSet& X, const LocusOptions& opt = {});
RationalSeries poincare_series(const CellSet& X, const LocusOptions& opt = {});

// [GL_n(k)] L^{-n^2}.
MotElem gl_measure(int n);
// Measure of the g in GL_n(O) whose top-left d x d minor is a unit.
MotElem grassmann_transverse_measure(int n, int d);
// Integral over GL_n(O) of L^{-val jac} of the projection along g P_0
// restricted to K^d x 0. Symbolic for (2, 1) and d = n.
MotElem crofton_constant(int n, int d);

struct Estimate {
    mpq_class value;
    double half_width = 0;
    double confidence = 0.99;
    long samples = 0;
};
// Monte Carlo over GL_n(O / t^depth) with one Philox stream per sample.
Estimate crofton_constant_at(int n, int d, int q, int depth, long samples, uint64_t seed = 42);

}  // namespace mv
