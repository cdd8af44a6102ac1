#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "mv/errors.hpp"
#include "mv/measure.hpp"
#include "mv/preorder.hpp"
#include "mv/presburger.hpp"
#include "mv/riso.hpp"
#include "mv/specialize.hpp"
#include "mv/tensor.hpp"
#include "mv/vitushkin.hpp"

using namespace mv;

namespace {

// Pinned tolerances.
constexpr double kCroftonTol = 0.05;
constexpr double kHomogeneityTol = 0.07;

const char* kLine = "graph(y = 0, x in B(0,0))";
const char* kParabola = "graph(y = x^2, x in B(0,0))";
const char* kTwoLines = "graph(y = x, x in B(0,0)) | graph(y = 0, x in B(0,0))";
const char* kCubicUnion = "graph(y = t*(x^3 - x), x in B(0,0)) | graph(y = 0, x in B(0,0))";

struct Outcome {
    bool ok = true;
    std::string failures;
    std::ostringstream note;
    void require(bool c, const std::string& what) {
        if (c) return;
        failures += (ok ? "" : "; ") + what;
        ok = false;
    }
};

mpq_class frac(long a, long b) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

MotElem L(long e) { return MotElem::L(e); }

Series zero(const Field* F) { return Series(F); }

// ---- criterion 1

void riso_regression(Outcome& o, double& worst) {
    const Field* Q = Field::Q();
    auto timed = [&](const char* text) {
        auto t0 = std::chrono::steady_clock::now();
        RisoReport r = min_nonrisotrivial(lower(text, Q));
        worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return r;
    };
    RisoReport a = timed(kLine);
    o.require(a.items.size() == 1 && !a.items[0].singleton && a.items[0].ball == Ball({zero(Q), zero(Q)}, -1) &&
                  a.s0_class == CVal(1),
              "line");
    RisoReport b = timed(kParabola);
    o.require(b.items.size() == 1 && !b.items[0].singleton && b.items[0].ball == Ball({zero(Q), zero(Q)}, 0) &&
                  b.s0_class == CVal(1),
              "parabola");
    RisoReport c = timed(kTwoLines);
    o.require(c.items.size() == 1 && c.items[0].singleton &&
                  c.items[0].point == std::vector<Series>{zero(Q), zero(Q)} && c.s0_class == CVal(1),
              "two lines");
    RisoReport d = timed(kCubicUnion);
    o.require(d.s0_class == CVal(3), "cubic union V0 = " + d.s0_class.str());
    o.require(worst < 1.0, "runtime");
    o.note << "items and V0 as expected, slowest " << worst << " s";
}

// ---- criteria 2, 3: exhaustive 2x2 counts over prime F_q

std::pair<long, long> gl2_counts(long q) {
    long inv = 0, transverse = 0;
    for (long a = 0; a < q; ++a)
        for (long b = 0; b < q; ++b)
            for (long c = 0; c < q; ++c)
                for (long d = 0; d < q; ++d) {
                    if (((a * d - b * c) % q + q) % q == 0) continue;
                    ++inv;
                    if (a != 0) ++transverse;
                }
    return {inv, transverse};
}

// ---- criterion 10

MotElem random_elem(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nterms(1, 4), ex(-3, 3), co(-3, 3), nden(0, 2), di(1, 3);
    LaurentPolyL num;
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) num.add_term(ex(rng), co(rng));
    std::vector<long> den;
    int d = nden(rng);
    for (int i = 0; i < d; ++i) den.push_back(di(rng));
    return MotElem(num, den);
}

bool sampled_nonneg(const MotElem& a) {
    for (int i = 1; i <= 2000; ++i)
        if (a.eval_at(1 + mpq_class(9 * i, 2000)) < 0) return false;
    return true;
}

// ---- criterion 11

Guard r_ge(long lo) { return Guard::at_least(1, 0, lo); }

CVal random_nonneg_coeff(std::mt19937_64& rng) {
    switch (rng() % 4) {
        case 0: return CVal(1);
        case 1: return CVal(2);
        case 2: return CVal(MotElem(1) - L(-1));
        default: return CVal(L(-1));
    }
}

MotFun random_geometric(std::mt19937_64& rng) {
    MotFun f(1);
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
        long a = -static_cast<long>(rng() % 3);
        if (rng() % 5 == 0) a = 1;
        Guard g = r_ge(static_cast<long>(rng() % 4));
        if (rng() % 3 == 0) g = g & Guard::congruent(1, 0, static_cast<long>(rng() % 2), 2);
        f.add(g, random_nonneg_coeff(rng), LinForm({a}, static_cast<long>(rng() % 3) - 1));
    }
    return f;
}

// ---- criterion 13

TensorElem random_tensor(std::mt19937& rng, const FreeModule& A, const FreeModule& B) {
    auto vec = [&](const FreeModule& M) {
        Vec v(M.rank);
        for (auto& x : v) x = static_cast<long>(rng() % 3);
        return v;
    };
    TensorElem e(A, B);
    int n = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) e.add_term({vec(A), vec(B)}, 1 + static_cast<long>(rng() % 2));
    return e;
}

std::vector<Vec> random_gens(std::mt19937& rng, const FreeModule& M) {
    std::vector<Vec> g;
    int n = static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
        Vec v(M.rank, 0);
        // coordinate generators give saturated submodules, other vectors are often rejected
        if (rng() % 2) v[rng() % M.rank] = 1;
        else
            for (auto& x : v) x = static_cast<long>(rng() % 3);
        g.push_back(v);
    }
    return g;
}

SampleOptions opts(long samples, uint64_t seed, int depth = 6) {
    SampleOptions o;
    o.samples = samples;
    o.seed = seed;
    o.depth = depth;
    return o;
}

using Check = std::function<void(Outcome&)>;

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    struct Criterion {
        int id;
        double budget;  // seconds
        Check run;
    };
    std::vector<Criterion> criteria;

    criteria.push_back({1, 4.0, [](Outcome& o) {
                            double worst = 0;
                            riso_regression(o, worst);
                        }});

    criteria.push_back({2, 1.0, [](Outcome& o) {
                            MotElem g = grassmann_transverse_measure(2, 1);
                            o.require(g == (MotElem(1) - L(-1)) * (MotElem(1) - L(-1)), "symbolic form " + g.str());
                            for (long q : {2, 3, 5}) {
                                auto [inv, tr] = gl2_counts(q);
                                o.require(g.eval_at(q) == frac(tr, q * q * q * q),
                                          "q=" + std::to_string(q));
                            }
                            o.note << "(1-L^-1)^2, q=2: " << g.eval_at(2).get_str() << " = "
                                   << gl2_counts(2).second << "/16";
                        }});

    criteria.push_back({3, 1.0, [](Outcome& o) {
                            for (long q : {2, 3}) {
                                auto [inv, tr] = gl2_counts(q);
                                o.require(gl_measure(2).eval_at(q) == frac(inv, q * q * q * q),
                                          "q=" + std::to_string(q));
                            }
                            o.note << "q=2: " << gl_measure(2).eval_at(2).get_str() << " = "
                                   << gl2_counts(2).first << "/16";
                        }});

    criteria.push_back({4, 1.0, [](Outcome& o) {
                            const Field* F2 = Field::F(2);
                            CellSet M = lower("box(B(0,1))", F2);
                            o.require(measure(M) == CVal(L(-1)), "symbolic " + measure(M).str());
                            for (long m : {2, 3, 4}) {
                                try {
                                    mpq_class c = count_measure(M, m);
                                    o.require(c == mpq_class(1, 2), "m=" + std::to_string(m) + ": " + c.get_str());
                                } catch (const DepthTooSmall& e) {
                                    o.require(false, "m=" + std::to_string(m) + ": " + e.what());
                                }
                            }
                            o.note << "count 1/2 at m = 2, 3, 4";
                        }});

    criteria.push_back({5, 5.0, [](Outcome& o) {
                            const Field* F2 = Field::F(2);
                            RationalSeries s = poincare_series(lower(kLine, Field::Q()));
                            o.require(s.den == std::vector<std::pair<long, long>>{{-1, 1}} && s.num.size() == 1 &&
                                          s.num.at(0) == MotElem(1),
                                      "series " + s.str());
                            CellSet X = lower(kLine, F2);
                            for (long r = 0; r <= 5; ++r) {
                                long m = r + 2;
                                mpq_class c = count_tube(X, r, m);
                                o.require(c == s.coeff(r).eval_at(2), "r=" + std::to_string(r));
                            }
                            o.note << s.str() << ", r <= 5 matches counts at q=2";
                        }});

    criteria.push_back({6, 300.0, [](Outcome& o) {
                            CellSet X = lower(kParabola, Field::F(3));
                            CheckReport r = check_crofton(X, 3, opts(200000, 42), kCroftonTol);
                            o.require(r.verdict == Verdict::True, "verdict " + verdict_str(r.verdict));
                            MotElem c = crofton_constant(2, 1);
                            Estimate e = crofton_constant_at(2, 1, 3, 6, 200000, 42);
                            double gap = std::abs(mpq_class(e.value - c.eval_at(3)).get_d());
                            o.require(gap <= e.half_width, "crofton_constant_at off by " + std::to_string(gap));
                            o.note << "V1 = " << mpq_class(r.lhs_value).get_d() << ", target "
                                   << mpq_class(r.rhs_value).get_d() << ", C(2,1)(3) = " << c.eval_at(3).get_str()
                                   << ", sampled " << e.value.get_d() << " +- " << e.half_width;
                        }});

    criteria.push_back({7, 120.0, [](Outcome& o) {
                            int n = 0;
                            for (int q : {2, 3})
                                for (const char* s : {kLine, kTwoLines}) {
                                    CheckReport r = check_entropy(lower(s, Field::F(q)), q, 0, 5);
                                    o.require(r.verdict == Verdict::True,
                                              std::string(s) + " q=" + std::to_string(q) + ": " +
                                                  verdict_str(r.verdict));
                                    ++n;
                                }
                            o.note << n << " sets x fields, r in 0..5";
                        }});

    criteria.push_back({8, 1.0, [](Outcome& o) {
                            const Field* F3 = Field::F(3);
                            Ball B({zero(F3), zero(F3)}, 0);
                            CheckReport r = check_sum_variations(lower(kTwoLines, F3), B, 3);
                            o.require(r.verdict == Verdict::True, "verdict " + verdict_str(r.verdict));
                            o.require(r.lhs_value == 1 && r.rhs_value == mpq_class(4, 9), "values");
                            o.note << r.lhs_value.get_str() << " >= " << r.rhs_value.get_str();
                        }});

    criteria.push_back({9, 5.0, [](Outcome& o) {
                            CheckReport r = check_vi_integral_bound(lower(kLine, Field::F(2)), 0, 2, 1);
                            o.require(r.verdict == Verdict::True, "verdict " + verdict_str(r.verdict));
                            o.require(r.rhs_value == 1, "V0 = " + r.rhs_value.get_str());
                            o.note << r.lhs_value.get_str() << " <= " << r.rhs_value.get_str();
                        }});

    criteria.push_back({10, 10.0, [](Outcome& o) {
                            MotElem u = MotElem(1) - L(-1), l2 = L(1) - MotElem(2);
                            for (unsigned n = 0; n <= 5; ++n) o.require(u.pow(n).is_nonneg(), "(1-L^-1)^n");
                            o.require((l2 * l2).is_nonneg(), "(L-2)^2");
                            o.require(!l2.is_nonneg() && !(-l2).is_nonneg(), "L-2 / 2-L");
                            std::mt19937_64 rng(7);
                            int agree = 0;
                            for (int it = 0; it < 200; ++it) {
                                MotElem a = random_elem(rng);
                                if (it % 3 == 0) a = a * a;
                                bool sym = a.is_nonneg(), num = sampled_nonneg(a);
                                if (sym == num || (!sym && num)) ++agree;
                                o.require(!(sym && !num), "fuzz " + a.str());
                            }
                            o.note << agree << "/200 fuzzed elements consistent";
                        }});

    criteria.push_back({11, 30.0, [](Outcome& o) {
                            std::mt19937_64 rng(3);
                            int squeeze = 0;
                            for (int it = 0; it < 200; ++it) {
                                MotFun f = random_geometric(rng), g = random_geometric(rng);
                                Limit lfg = limit(f + g);
                                if (lfg.exists && lfg.value.is_zero()) {
                                    ++squeeze;
                                    Limit lf = limit(f), lg = limit(g);
                                    o.require(lf.exists && lg.exists && lf.value.is_zero() && lg.value.is_zero(),
                                              "squeeze " + f.str());
                                }
                            }
                            std::mt19937_64 rng2(5);
                            int mono = 0;
                            for (int it = 0; it < 200; ++it) {
                                MotFun f(1);
                                CVal bound;
                                int n = 1 + static_cast<int>(rng2() % 3);
                                for (int i = 0; i < n; ++i) {
                                    CVal c = random_nonneg_coeff(rng2);
                                    long a = 1 + static_cast<long>(rng2() % 2);
                                    f.add(r_ge(0), c, LinForm({0}, 0));
                                    f.add(r_ge(0), -c, LinForm({-a}, 0));
                                    bound += c;
                                }
                                if (rng2() % 4 == 0) f = f + random_geometric(rng2);
                                if (is_increasing(f) == Tri::True && is_bounded_by(f, bound + CVal(2)) == Tri::True) {
                                    ++mono;
                                    o.require(limit(f).exists, "monotone " + f.str());
                                }
                            }
                            o.require(squeeze > 10 && mono > 100, "too few applicable instances");
                            o.note << squeeze << " squeeze and " << mono << " monotone-bounded instances";
                        }});

    criteria.push_back({12, 1.0, [](Outcome& o) {
                            const Field* Q = Field::Q();
                            auto etale = [](const Field* k) {
                                return CVal::atom(ClassAtom::etale(
                                    KUPoly(k, {k->from_int(-2), k->zero(), k->one()})));
                            };
                            CVal F = etale(Q) - CVal(1);
                            Witness w = quadratic_cover_witness(Q);
                            o.require(check_witness(F, w), "witness");
                            Witness drop = w;
                            drop.Z.clear();
                            drop.f.clear();
                            bool rejected = false;
                            try {
                                check_witness(F, drop);
                            } catch (const NotSurjective&) {
                                rejected = true;
                            }
                            o.require(rejected, "tampered witness accepted");
                            o.require(!check_witness(-F, w), "negated class accepted");
                            const Field* F7 = Field::F(7);
                            SpecializedCheck s = specialize_witness(etale(F7) - CVal(1), quadratic_cover_witness(F7), 7);
                            o.require(s.verified && s.value == 1 && s.nonneg, "F7 value");
                            bool mismatch = false;
                            try {
                                specialize_witness(F, w, 3);
                            } catch (const BaseFieldMismatch&) {
                                mismatch = true;
                            }
                            o.require(mismatch, "Q specialization");
                            o.note << "F7 value " << s.value.get_str() << ", Q -> BaseFieldMismatch";
                        }});

    criteria.push_back({13, 60.0, [](Outcome& o) {
                            std::mt19937 rng(3);
                            int agree = 0;
                            for (int it = 0; it < 500; ++it) {
                                const Semiring S = Semiring::naturals();
                                FreeModule A{S, 1 + static_cast<int>(rng() % 2)}, B{S, 1 + static_cast<int>(rng() % 2)};
                                TensorElem a = random_tensor(rng, A, B), b;
                                if (rng() % 2) {
                                    b = a;
                                    int steps = 1 + static_cast<int>(rng() % 2);
                                    for (int s = 0; s < steps; ++s) {
                                        auto next = rewrites(b, 3, 6);
                                        if (!next.empty()) b = next[rng() % next.size()];
                                    }
                                } else {
                                    b = random_tensor(rng, A, B);
                                }
                                if ((equiv(a, b) == Equiv::Yes) == (equiv_search(a, b, 4) == Equiv::Yes)) ++agree;
                            }
                            o.require(agree == 500, std::to_string(500 - agree) + " disagreements");
                            std::mt19937 rng2(17);
                            int verified = 0, rejected = 0, attempts = 0;
                            std::vector<Semiring> rings = registered_semirings();
                            while (verified < 100 && attempts < 5000) {
                                ++attempts;
                                const Semiring& S = rings[rng2() % rings.size()];
                                FreeModule A{S, 1 + static_cast<int>(rng2() % 2)}, B{S, 1 + static_cast<int>(rng2() % 2)};
                                std::vector<Vec> U1 = random_gens(rng2, A), U2 = random_gens(rng2, B);
                                try {
                                    LemmaReport r = lemma_check(A, B, U1, U2, 60, rng2());
                                    ++verified;
                                    o.require(r.holds, "counterexample " + r.tensor.counterexample);
                                } catch (const HypothesisFailed&) {
                                    ++rejected;
                                }
                            }
                            o.require(verified == 100, "only " + std::to_string(verified) + " verified instances");
                            bool even = false;
                            FreeModule N1{Semiring::naturals(), 1};
                            try {
                                lemma_check(N1, N1, {{2}}, {}, 200);
                            } catch (const HypothesisFailed&) {
                                even = true;
                            }
                            o.require(even, "even naturals accepted");
                            o.note << agree << "/500 agree, " << verified << " lemma instances (" << rejected
                                   << " rejected by hypotheses)";
                        }});

    criteria.push_back({14, 300.0, [](Outcome& o) {
                            const Field* Q = Field::Q();
                            std::pair<const char*, const char*> pairs[] = {
                                {"graph(y = x, x in B(0,0))", "graph(y = x, x in B(0,1))"},
                                {kLine, "graph(y = 0, x in B(0,1))"},
                                {"graph(y = t*x + 1, x in B(0,0))", "graph(y = t*x + t, x in B(0,1))"}};
                            for (auto [x, tx] : pairs) {
                                auto a = v_i_exact(lower(x, Q), 1), b = v_i_exact(lower(tx, Q), 1);
                                o.require(a && b && *b == a->scaled(L(-1)), std::string("linear ") + x);
                            }
                            const Field* F3 = Field::F(3);
                            Estimate a = v_i_estimate(lower(kParabola, F3), 1, 3, opts(40000, 42));
                            Estimate b = v_i_estimate(lower("graph(y = x^2/t, x in B(0,1))", F3), 1, 3, opts(40000, 42));
                            double ratio = mpq_class(b.value / a.value).get_d();
                            o.require(std::abs(ratio * 3 - 1) <= kHomogeneityTol, "ratio " + std::to_string(ratio));
                            o.note << "linear exact, parabola ratio " << ratio << " vs 1/3";
                        }});

    int failed = 0;
    for (auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs <= c.budget, "over time budget " + std::to_string(c.budget) + " s");
        if (!o.ok) ++failed;
        std::string msg = o.note.str();
        if (!o.ok) msg = "failed: " + o.failures + " | " + msg;
        std::printf("criterion %2d %s  %.2fs  %s\n", c.id, o.ok ? "PASS" : "FAIL", secs, msg.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
