#include "mv/vitushkin.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mv/errors.hpp"
#include "mv/specialize.hpp"

namespace mv {

namespace {

constexpr double kDelta = 0.01;  // 1 - confidence
constexpr int kRootDepth = 48;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

mpq_class q_pow(int q, long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? mpq_class(1, p) : mpq_class(p);
}

std::string qstr(const mpq_class& a) {
    mpq_class b = a;
    b.canonicalize();
    return b.get_str();
}

std::string est_str(const Estimate& e) {
    std::ostringstream os;
    os.precision(6);
    os << e.value.get_d() << " +- " << e.half_width;
    return os.str();
}

// Number of distinct roots of h in K lying in B(c, s).
long count_roots(const KPoly& h, const Series& c, long s, int depth) {
    if (h.is_zero()) return 0;
    Expansion E = expand(h, c, s);
    if (E.w == 0) return 0;
    if (E.point_type || E.w == 1 || depth == 0) return 1;
    long n = 0;
    for (const auto& [z, mult] : roots_in_k(E.red)) {
        if (mult == 1) {
            ++n;
            continue;
        }
        n += count_roots(h, c + Series::monomial(h.F, s, z), s + 1, depth - 1);
    }
    return n;
}

struct Branch {
    KPoly f;
    bool swap = false;
    std::vector<Ball> domain;
};

// Graph cells of a curve in K^2, merged by (f, swap). Points are null for
// the line measure and are dropped.
std::vector<Branch> curve_branches(const CellSet& X) {
    if (X.n != 2) throw Unsupported("V_1 sampling is implemented in K^2");
    std::map<std::pair<std::string, bool>, Branch> by;
    for (const auto& c : X.cells) {
        if (c.kind == Cell::Kind::Singleton) continue;
        if (c.kind == Cell::Kind::Box || c.tube) throw Unsupported("V_1 sampling needs a curve");
        Branch& b = by[{c.f.str(), c.swap}];
        b.f = c.f;
        b.swap = c.swap;
        b.domain.insert(b.domain.end(), c.domain.begin(), c.domain.end());
    }
    std::vector<Branch> out;
    for (auto& [k, b] : by) {
        b.domain = canonical_balls(X.F, b.domain);
        out.push_back(std::move(b));
    }
    return out;
}

// Parameter balls of the branch points lying in B.
std::vector<Ball> branch_in_ball(const Branch& b, const Ball& B) {
    const Ball P = Ball::one_dim(B.center[b.swap ? 1 : 0], B.rad);
    const Series dep = B.center[b.swap ? 0 : 1];
    std::vector<Ball> out;
    for (const auto& D : b.domain) {
        auto I = intersect(D, P);
        if (!I) continue;
        KPoly g = b.f - KPoly::constant(dep);
        auto part = val_ge_locus(g, *I, B.rad);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

long coordinate_floor(const CellSet& X) {
    Ball bb = bounding_ball(X);
    long v = bb.rad == VAL_INF ? 0 : bb.rad;
    for (const auto& c : bb.center)
        if (!c.is_zero()) v = std::min(v, c.val());
    return v;
}

struct LineSample {
    Series g11, g21, det, y;
};

LineSample draw_line(const TruncatedRing& R, long v0, Philox& rng) {
    TMatrix g = sample_gl(R, 2, rng);
    LineSample s;
    s.g11 = R.to_series(g[0][0]);
    s.g21 = R.to_series(g[1][0]);
    s.det = R.to_series(det(R, g));
    s.y = sample_translation(R, 1, v0, rng)[0];
    return s;
}

// Points of the branch on the line -g21 x1 + g11 x2 = y det, as roots in the
// branch parameter.
KPoly line_equation(const Branch& b, const LineSample& s) {
    const Field* F = b.f.F;
    KPoly x = KPoly::x(F);
    KPoly rhs = KPoly::constant(s.y * s.det);
    if (b.swap) return KPoly::constant(s.g11) * x - KPoly::constant(s.g21) * b.f - rhs;
    return KPoly::constant(s.g11) * b.f - KPoly::constant(s.g21) * x - rhs;
}

long slice_bound(const std::vector<Branch>& br) {
    long R = 0;
    for (const auto& b : br) R += std::max(1, b.f.degree());
    return R;
}

// Mean of count(rng) over one Philox stream per sample, times weight.
template <class Fn>
Estimate sample_mean(long N, uint64_t seed, const mpq_class& weight, long bound, Fn count) {
    if (N <= 0) throw DomainError("samples must be positive");
    int chunks = thread_count();
    std::vector<long> sums(chunks, 0);
    long per = (N + chunks - 1) / chunks;
    parallel_chunks(chunks, [&](long lo, long hi) {
        for (long c = lo; c < hi; ++c)
            for (long i = c * per; i < std::min(N, (c + 1) * per); ++i) {
                Philox rng(seed, static_cast<uint64_t>(i));
                sums[c] += count(rng);
            }
    });
    long total = 0;
    for (long s : sums) total += s;
    Estimate e;
    e.samples = N;
    e.value = weight * mpq_class(total) / mpq_class(N);
    e.value.canonicalize();
    e.half_width = weight.get_d() * static_cast<double>(bound) * std::sqrt(std::log(2 / kDelta) / (2.0 * N));
    e.confidence = 1 - kDelta;
    return e;
}

const Field* sampling_field(const CellSet& X, int q) {
    if (X.F->is_Q()) throw BaseFieldMismatch("sampling needs a finite residue field");
    if (X.F->q() != q) throw BaseFieldMismatch("set is over " + X.F->name());
    return X.F;
}

void check_index(const CellSet& X, int i) {
    if (i < 0 || i > X.n) throw DomainError("index out of range");
}

bool on_line(const Cell& c, const KPoly& f, bool swap) {
    if (c.kind == Cell::Kind::Singleton) {
        const auto& p = c.point;
        return swap ? f.eval(p[1]) == p[0] : f.eval(p[0]) == p[1];
    }
    return c.kind == Cell::Kind::Graph && !c.tube && c.swap == swap && c.f == f;
}

bool union_of_segments(const CellSet& X) {
    if (X.n != 2) return false;
    bool any = false;
    for (const auto& c : X.cells) {
        if (c.kind == Cell::Kind::Singleton) continue;
        if (c.kind != Cell::Kind::Graph || c.tube || c.f.degree() > 1) return false;
        any = true;
    }
    return any;
}

struct Value {
    mpq_class v;
    double hw = 0;
    bool exact = true;
    std::string str() const {
        if (exact) return qstr(v);
        Estimate e;
        e.value = v;
        e.half_width = hw;
        return est_str(e);
    }
};

Value vi_value(const CellSet& X, int i, int q, const SampleOptions& opt) {
    if (auto c = v_i_exact(X, i)) return {c->count_points(q), 0, true};
    Estimate e = v_i_estimate(X, i, q, opt);
    return {e.value, e.half_width, false};
}

Verdict le_verdict(const mpq_class& lhs, const mpq_class& rhs, double hw) {
    double gap = mpq_class(rhs - lhs).get_d();
    if (hw == 0) return lhs <= rhs ? Verdict::True : Verdict::False;
    if (gap >= hw) return Verdict::True;
    if (gap < -hw) return Verdict::False;
    return Verdict::Inconclusive;
}

Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::False || b == Verdict::False) return Verdict::False;
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
    return Verdict::True;
}

mpq_class unit_share(int q, int n) {
    mpq_class c = 1;
    for (int j = 0; j < n; ++j) c *= mpq_class(q - 1, q);
    c.canonicalize();
    return c;
}

}  // namespace

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        default: return "inconclusive";
    }
}

CVal v_d_linear(const CellSet& X) {
    int d = X.dim();
    if (d < 0) return CVal(0);
    if (d == 0) {
        if (measure(X, 0) != CVal(1)) throw NotAffine("several points span more than a point");
        return CVal(1);
    }
    if (d == X.n) return measure(X, d).scaled(crofton_constant(X.n, d));
    if (X.n != 2 || d != 1) throw Unsupported("linear Crofton formula in K^2 only");
    const Cell* line = nullptr;
    for (const auto& c : X.cells)
        if (c.kind == Cell::Kind::Graph) {
            line = &c;
            break;
        }
    if (!line || line->tube || line->f.degree() > 1) throw NotAffine("not contained in a line");
    for (const auto& c : X.cells)
        if (!on_line(c, line->f, line->swap)) throw NotAffine("not contained in a line");
    return measure(X, 1).scaled(crofton_constant(2, 1));
}

MotFun entropy(const CellSet& X, const LocusOptions& opt) {
    return tube_measure(X, opt).times_L(LinForm({X.n}, 0));
}

std::optional<CVal> v_i_exact(const CellSet& X, int i) {
    check_index(X, i);
    int d = X.dim();
    if (i == 0) return v0(X);
    if (i > d) return CVal(0);
    if (i == d && d == X.n) return measure(X, d).scaled(crofton_constant(X.n, d));
    // Additivity: a generic line meets the segments in distinct points.
    if (i == 1 && d == 1 && union_of_segments(X)) return measure(X, 1).scaled(crofton_constant(2, 1));
    return std::nullopt;
}

Estimate v_i_estimate(const CellSet& X, int i, int q, const SampleOptions& opt) {
    check_index(X, i);
    const Field* F = sampling_field(X, q);
    if (i != 1 || X.n != 2) {
        auto c = v_i_exact(X, i);
        if (!c) throw Unsupported("sampling is implemented for V_1 in K^2");
        Estimate e;
        e.value = c->count_points(q);
        return e;
    }
    if (X.dim() < 1) return Estimate{0, 0, 1 - kDelta, 0};
    auto br = curve_branches(X);
    long v0 = coordinate_floor(X);
    TruncatedRing R(F, opt.depth);
    mpq_class weight = gl_measure(2).eval_at(q) * q_pow(q, -v0);
    return sample_mean(opt.samples, opt.seed, weight, slice_bound(br), [&](Philox& rng) {
        LineSample s = draw_line(R, v0, rng);
        long n = 0;
        for (const auto& b : br) {
            KPoly h = line_equation(b, s);
            for (const auto& D : b.domain) n += count_roots(h, D.center[0], D.rad, kRootDepth);
        }
        return n;
    });
}

Estimate v_i_rel_estimate(const CellSet& X, const Ball& B, int i, int q, const SampleOptions& opt) {
    check_index(X, i);
    const Field* F = sampling_field(X, q);
    if (i != 1 || X.n != 2) {
        if (i != 0) throw Unsupported("relative sampling is implemented for V_1 in K^2");
        Estimate e;
        e.value = v0_rel(X, B).count_points(q);
        return e;
    }
    if (X.dim() < 1) return Estimate{0, 0, 1 - kDelta, 0};
    auto br = curve_branches(X);
    std::vector<std::vector<Ball>> parts;
    for (const auto& b : br) parts.push_back(branch_in_ball(b, B));
    long v0 = coordinate_floor(X);
    TruncatedRing R(F, opt.depth);
    mpq_class weight = gl_measure(2).eval_at(q) * q_pow(q, -v0);
    return sample_mean(opt.samples, opt.seed, weight, slice_bound(br), [&](Philox& rng) {
        LineSample s = draw_line(R, v0, rng);
        long n = 0;
        for (size_t j = 0; j < br.size(); ++j) {
            KPoly h = line_equation(br[j], s);
            for (const auto& D : parts[j]) n += count_roots(h, D.center[0], D.rad, kRootDepth);
        }
        return n;
    });
}

CheckReport check_crofton(const CellSet& X, int q, const SampleOptions& opt, double tol) {
    auto t0 = Clock::now();
    CheckReport rep;
    rep.name = "crofton";
    rep.mode = "specialized";
    int d = X.dim();
    if (X.n != 2 || d != 1) throw Unsupported("Crofton check for curves in K^2");
    Estimate e = v_i_estimate(X, 1, q, opt);
    mpq_class target = crofton_constant(2, 1).eval_at(q) * measure(X, 1).count_points(q);
    target.canonicalize();
    rep.lhs_value = e.value;
    rep.rhs_value = target;
    rep.half_width = e.half_width;
    rep.lhs = est_str(e);
    rep.rhs = "C(2,1) mu_1 = " + qstr(target);
    double err = std::abs(e.value.get_d() / target.get_d() - 1);
    double rel = e.half_width / target.get_d();
    std::ostringstream os;
    os << "relative error " << err << ", relative half-width " << rel << ", tol " << tol;
    rep.details.push_back(os.str());
    if (err + rel <= tol)
        rep.verdict = Verdict::True;
    else if (err - rel > tol)
        rep.verdict = Verdict::False;
    else
        rep.verdict = Verdict::Inconclusive;
    rep.runtime = seconds_since(t0);
    return rep;
}

CheckReport check_entropy(const CellSet& X, int q, long r_lo, long r_hi, const SampleOptions& opt) {
    auto t0 = Clock::now();
    if (r_lo < 0 || r_hi < r_lo) throw DomainError("bad r range");
    CheckReport rep;
    rep.name = "entropy";
    MotFun M = entropy(X);
    std::vector<Value> V;
    bool exact = true;
    for (int i = 0; i <= X.n; ++i) {
        V.push_back(vi_value(X, i, q, opt));
        exact = exact && V.back().exact;
    }
    rep.mode = exact ? "symbolic" : "specialized";
    mpq_class share = unit_share(q, X.n);
    rep.verdict = Verdict::True;
    for (long r = r_lo; r <= r_hi; ++r) {
        mpq_class lhs = M.eval1(r).count_points(q) * share;
        mpq_class rhs = 0;
        double hw = 0;
        for (int i = 0; i <= X.n; ++i) {
            mpq_class w = q_pow(q, r * i);
            rhs += w * V[i].v;
            hw += w.get_d() * V[i].hw;
        }
        lhs.canonicalize();
        rhs.canonicalize();
        Verdict v = le_verdict(lhs, rhs, hw);
        rep.verdict = combine(rep.verdict, v);
        std::ostringstream os;
        os << "r=" << r << ": " << qstr(lhs) << " <= " << qstr(rhs);
        if (hw > 0) os << " +- " << hw;
        os << " " << verdict_str(v);
        rep.details.push_back(os.str());
        rep.lhs_value = lhs;
        rep.rhs_value = rhs;
        rep.half_width = hw;
    }
    rep.lhs = "M(X, q^-r) (1 - 1/q)^" + std::to_string(X.n);
    rep.rhs = "sum_i q^(ri) V_i:";
    for (int i = 0; i <= X.n; ++i) rep.rhs += " V_" + std::to_string(i) + "=" + V[i].str();
    rep.runtime = seconds_since(t0);
    return rep;
}

CheckReport check_sum_variations(const CellSet& X, const Ball& B, int q, const SampleOptions& opt) {
    auto t0 = Clock::now();
    if (B.dim() != X.n) throw DomainError("ball dimension mismatch");
    CheckReport rep;
    rep.name = "sum-variations";
    mpq_class target = unit_share(q, X.n);
    mpq_class lhs = v0_rel(X, B).count_points(q);
    rep.details.push_back("V_0(X,B) = " + qstr(lhs));
    double hw = 0;
    rep.mode = "symbolic";
    if (lhs < target) {
        // lambda^-i = q^(i rad)
        for (int i = 1; i <= X.n && i <= std::max(X.dim(), 0); ++i) {
            if (i == X.n) {
                mpq_class v = measure(restrict(X, B), i).count_points(q) * crofton_constant(X.n, i).eval_at(q);
                lhs += q_pow(q, B.rad * i) * v;
                rep.details.push_back("V_" + std::to_string(i) + "(X,B) = " + qstr(v));
                continue;
            }
            Estimate e = v_i_rel_estimate(X, B, i, q, opt);
            lhs += q_pow(q, B.rad * i) * e.value;
            hw += q_pow(q, B.rad * i).get_d() * e.half_width;
            rep.mode = "specialized";
            rep.details.push_back("V_" + std::to_string(i) + "(X,B) = " + est_str(e));
        }
    }
    lhs.canonicalize();
    rep.lhs_value = lhs;
    rep.rhs_value = target;
    rep.half_width = hw;
    rep.lhs = qstr(lhs);
    rep.rhs = "(1 - 1/q)^" + std::to_string(X.n) + " = " + qstr(target);
    rep.verdict = le_verdict(target, lhs, hw);
    rep.runtime = seconds_since(t0);
    return rep;
}

CheckReport check_vi_integral_bound(const CellSet& X, int i, int q, long r, const SampleOptions& opt) {
    auto t0 = Clock::now();
    check_index(X, i);
    CheckReport rep;
    rep.name = "integral-bound";
    Value rhs = vi_value(X, i, q, opt);
    mpq_class lhs;
    double hw = 0;
    if (i == 0) {
        // V_0(X, B) only sees items inside B, so only the balls of radius r
        // around items of radius >= r contribute, each with mass q^-rn.
        RisoReport report = min_nonrisotrivial(X);
        std::set<Ball> balls;
        for (const auto& it : report.items) {
            if (it.singleton) {
                std::vector<Series> c;
                for (const auto& s : it.point) c.push_back(s.truncated(r));
                balls.insert(Ball(c, r));
            } else if (it.ball.rad >= r) {
                std::vector<Series> c;
                for (const auto& s : it.ball.center) c.push_back(s.truncated(r));
                balls.insert(Ball(c, r));
            }
        }
        lhs = 0;
        for (const auto& b : balls) lhs += v0_rel(report, b).count_points(q);
        rep.mode = "symbolic";
        rep.details.push_back(std::to_string(balls.size()) + " balls of radius " + std::to_string(r) + " carry items");
    } else {
        if (i != 1 || X.n != 2) throw Unsupported("integral bound sampled for V_1 in K^2 only");
        const Field* F = sampling_field(X, q);
        if (X.dim() < 1) {
            lhs = 0;
        } else {
            auto br = curve_branches(X);
            long v0 = coordinate_floor(X);
            long vx = std::min(v0, r);
            TruncatedRing R(F, opt.depth);
            // x uniform in t^vx O^2: every ball B(x, q^-r) meeting X is centred there.
            mpq_class weight = gl_measure(2).eval_at(q) * q_pow(q, -v0) * q_pow(q, 2 * (r - vx));
            Estimate e = sample_mean(opt.samples, opt.seed, weight, slice_bound(br), [&](Philox& rng) {
                LineSample s = draw_line(R, v0, rng);
                TruncatedRing Rx(F, static_cast<int>(std::max<long>(1, r - vx)));
                Ball Bx(sample_translation(Rx, 2, vx, rng), r);
                long n = 0;
                for (const auto& b : br) {
                    KPoly h = line_equation(b, s);
                    for (const auto& D : branch_in_ball(b, Bx)) n += count_roots(h, D.center[0], D.rad, kRootDepth);
                }
                return n;
            });
            lhs = e.value;
            hw = e.half_width;
            rep.details.push_back("integral " + est_str(e));
        }
        rep.mode = "specialized";
    }
    lhs.canonicalize();
    rep.lhs_value = lhs;
    rep.rhs_value = rhs.v;
    rep.half_width = hw + rhs.hw;
    rep.lhs = qstr(lhs);
    rep.rhs = "V_" + std::to_string(i) + "(X) = " + rhs.str();
    if (!rhs.exact) rep.mode = "specialized";
    rep.verdict = le_verdict(lhs, rhs.v, rep.half_width);
    rep.runtime = seconds_since(t0);
    return rep;
}

}  // namespace mv
