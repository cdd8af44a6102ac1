#include "mv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "mv/errors.hpp"
#include "mv/specialize.hpp"

namespace mv {

namespace {

// {(x, y) : x in D0, extras hold, val(y - phi(x)) >= b}; in K there is no y.
struct GT {
    Ball D0;
    std::vector<ValConstraint> extra;
    std::optional<KPoly> phi;
    Threshold b;
};

CellSet swapped(const CellSet& X) {
    CellSet Y = X;
    for (auto& c : Y.cells) {
        if (c.kind == Cell::Kind::Singleton) std::swap(c.point[0], c.point[1]);
        if (c.kind == Cell::Kind::Box) std::swap(c.box[0], c.box[1]);
        if (c.kind == Cell::Kind::Graph) c.swap = !c.swap;
    }
    return Y;
}

// Graph cells all parametrized by x.
CellSet oriented(const CellSet& X) {
    bool sw = false, plain = false;
    for (const auto& c : X.cells)
        if (c.kind == Cell::Kind::Graph) (c.swap ? sw : plain) = true;
    if (sw && plain) throw Unsupported("graph cells over both coordinate axes");
    return sw ? swapped(X) : X;
}

long max_radius(const CellSet& X) {
    long R = 0;
    for (const auto& c : X.cells) {
        for (const auto& b : c.box) R = std::max(R, b.rad);
        for (const auto& D : c.domain) R = std::max(R, D.rad);
        if (c.tube) R = std::max(R, *c.tube);
    }
    return R;
}

Ball ball1(const Series& c, long r) { return Ball::one_dim(c, r); }

// Generalized tubes covering T_r(X): at a fixed r, or symbolic in r for r > R0.
std::vector<GT> tube_gts(const CellSet& X, std::optional<long> r, long R0) {
    const Field* F = X.F;
    std::vector<GT> out;
    bool two = X.n == 2;
    for (const auto& c : X.cells) {
        switch (c.kind) {
            case Cell::Kind::Singleton: {
                GT g;
                const Series& px = c.point[0];
                if (r) {
                    g.D0 = ball1(px, *r);
                    g.b = Threshold::constant(*r);
                } else {
                    g.D0 = ball1(px, R0 + 1);
                    g.extra.push_back({KPoly::x(F) - KPoly::constant(px), Threshold::r()});
                    g.b = Threshold::r();
                }
                if (two) g.phi = KPoly::constant(c.point[1]);
                out.push_back(g);
                break;
            }
            case Cell::Kind::Box: {
                GT g;
                const Ball& b0 = c.box[0];
                g.D0 = r ? ball1(b0.center[0], std::min(b0.rad, *r)) : b0;
                if (two) {
                    const Ball& b1 = c.box[1];
                    g.phi = KPoly::constant(b1.center[0]);
                    g.b = Threshold::constant(r ? std::min(b1.rad, *r) : b1.rad);
                }
                out.push_back(g);
                break;
            }
            case Cell::Kind::Graph:
                for (const auto& D : c.domain) {
                    GT g;
                    if (r && *r < D.rad) {
                        g.D0 = ball1(D.center[0], *r);
                        g.phi = KPoly::constant(c.f.eval(D.center[0]));
                    } else {
                        g.D0 = D;
                        g.phi = c.f;
                    }
                    if (r) g.b = Threshold::constant(c.tube ? std::min(*c.tube, *r) : *r);
                    else g.b = c.tube ? Threshold::constant(*c.tube) : Threshold::r();
                    out.push_back(g);
                }
                break;
        }
    }
    return out;
}

Threshold tmin(const Threshold& a, const Threshold& b) {
    if (a.symbolic && b.symbolic) return a;
    if (a.symbolic) return b;
    if (b.symbolic) return a;
    return Threshold::constant(std::min(a.value, b.value));
}

// Inclusion-exclusion over subsets of gts whose base balls meet. Each term
// is handed to the callback with its sign.
struct Term {
    Ball D0;
    std::vector<ValConstraint> cons;
    std::optional<long> hi;  // from constant constraints against symbolic r
    bool sym_b = false;
    long const_b = LONG_MIN;
};

void subsets(const std::vector<GT>& gts, size_t next, const Term& cur, const std::vector<size_t>& members,
             const std::function<void(const Term&, int)>& emit) {
    for (size_t j = next; j < gts.size(); ++j) {
        const GT& g = gts[j];
        Term t = cur;
        if (members.empty()) {
            t.D0 = g.D0;
        } else {
            auto I = intersect(cur.D0, g.D0);
            if (!I) continue;
            t.D0 = *I;
        }
        bool dead = false;
        for (const auto& e : g.extra) t.cons.push_back(e);
        if (g.phi) {
            if (g.b.symbolic) t.sym_b = true;
            else t.const_b = std::max(t.const_b, g.b.value);
            for (size_t i : members) {
                KPoly h = *gts[i].phi - *g.phi;
                if (h.is_zero()) continue;
                Threshold th = tmin(gts[i].b, g.b);
                if (h.degree() == 0) {
                    long v = h.c[0].val();
                    if (th.symbolic) t.hi = t.hi ? std::min(*t.hi, v) : v;
                    else if (v < th.value) dead = true;
                    continue;
                }
                t.cons.push_back({h, th});
            }
        }
        if (dead) continue;  // every superset is empty too
        std::vector<size_t> m2 = members;
        m2.push_back(j);
        emit(t, m2.size() % 2 ? 1 : -1);
        subsets(gts, j + 1, t, m2, emit);
    }
}

void check_size(const std::vector<GT>& gts) {
    if (gts.size() > 24) throw Unsupported("too many cells for inclusion-exclusion");
}

CVal concrete_union(const std::vector<GT>& gts, bool two, const LocusOptions& opt) {
    check_size(gts);
    CVal total;
    subsets(gts, 0, Term{}, {}, [&](const Term& t, int sign) {
        CVal v = val_locus_const(t.D0.center[0], t.D0.rad, t.cons, opt);
        if (two) v = v.scaled(MotElem::L(-t.const_b));
        total += sign > 0 ? v : -v;
    });
    return total;
}

MotFun symbolic_union(const std::vector<GT>& gts, bool two, long lo, const LocusOptions& opt) {
    check_size(gts);
    MotFun total(1, {"r"});
    subsets(gts, 0, Term{}, {}, [&](const Term& t, int sign) {
        if (t.hi && *t.hi < lo) return;
        MotFun v = val_locus(t.D0.center[0], t.D0.rad, t.cons, lo, t.hi, opt);
        if (two) {
            if (t.sym_b) v = v.times_L(LinForm({-1}, 0));
            else v = v.scaled(CVal(MotElem::L(-t.const_b)));
        }
        total = sign > 0 ? total + v : total - v;
    });
    return total;
}

mpq_class q_pow(int q, long e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(std::labs(e)));
    mpq_class r = e >= 0 ? mpq_class(z) : mpq_class(1) / mpq_class(z);
    r.canonicalize();
    return r;
}

MotElem one_minus_Linv(long i) { return MotElem(1) - MotElem::L(-i); }

}  // namespace

CVal measure(const CellSet& X0, std::optional<int> dopt) {
    int dimX = X0.dim();
    int d = dopt ? *dopt : dimX;
    if (dimX < 0 || d > dimX) return CVal();
    if (d < dimX) throw Unsupported("mu_" + std::to_string(d) + " of a set of dimension " + std::to_string(dimX));
    if (d == 0) {
        std::set<std::vector<Series>> pts;
        for (const auto& c : X0.cells) pts.insert(c.point);
        return CVal(static_cast<long>(pts.size()));
    }
    std::vector<const Cell*> top;
    for (const auto& c : X0.cells)
        if (c.dim(X0.n) == d) top.push_back(&c);
    bool all_boxes = std::all_of(top.begin(), top.end(), [](const Cell* c) { return c->kind == Cell::Kind::Box; });
    if (all_boxes) {
        // Boxes of full dimension: intersections are boxes again.
        if (d != X0.n) throw Unsupported("lower-dimensional boxes");
        if (top.size() > 24) throw Unsupported("too many cells for inclusion-exclusion");
        CVal total;
        std::function<void(size_t, std::vector<Ball>, int)> rec = [&](size_t next, std::vector<Ball> cur, int size) {
            for (size_t j = next; j < top.size(); ++j) {
                std::vector<Ball> nb;
                bool ok = true;
                for (int i = 0; i < X0.n && ok; ++i) {
                    if (size == 0) {
                        nb.push_back(top[j]->box[i]);
                        continue;
                    }
                    auto I = intersect(cur[i], top[j]->box[i]);
                    if (!I) ok = false;
                    else nb.push_back(*I);
                }
                if (!ok) continue;
                long e = 0;
                for (const auto& b : nb) e += b.rad;
                CVal v(MotElem::L(-e));
                total += (size + 1) % 2 ? v : -v;
                rec(j + 1, nb, size + 1);
            }
        };
        rec(0, {}, 0);
        return total;
    }
    if (X0.n != 2) throw Unsupported("measure beyond the plane");
    if (d == 1) {
        // Distinct polynomial graphs meet in finitely many points.
        std::map<std::pair<std::string, bool>, std::vector<Ball>> groups;
        for (const Cell* c : top) {
            if (c->kind != Cell::Kind::Graph) throw Unsupported("one-dimensional box in the plane");
            auto& v = groups[{c->f.str(), c->swap}];
            v.insert(v.end(), c->domain.begin(), c->domain.end());
        }
        CVal total;
        for (auto& [k, balls] : groups) {
            // canonical_balls drops nested balls; the rest are disjoint
            for (const auto& b : canonical_balls(X0.F, balls)) total += CVal(MotElem::L(-b.rad));
        }
        return total;
    }
    CellSet X = X0;
    X.cells.clear();
    for (const Cell* c : top) X.cells.push_back(*c);
    X = oriented(X);
    std::vector<GT> gts;
    for (const auto& c : X.cells) {
        if (c.kind == Cell::Kind::Box) {
            GT g;
            g.D0 = c.box[0];
            g.phi = KPoly::constant(c.box[1].center[0]);
            g.b = Threshold::constant(c.box[1].rad);
            gts.push_back(g);
            continue;
        }
        for (const auto& D : c.domain) {
            GT g;
            g.D0 = D;
            g.phi = c.f;
            g.b = Threshold::constant(*c.tube);
            gts.push_back(g);
        }
    }
    return concrete_union(gts, true, LocusOptions{});
}

MotFun tube_measure(const CellSet& X0, const LocusOptions& opt) {
    if (X0.n < 1 || X0.n > 2) throw Unsupported("tube volumes are implemented in K and K^2");
    MotFun out(1, {"r"});
    if (X0.cells.empty()) return out;
    CellSet X = X0.n == 2 ? oriented(X0) : X0;
    bool two = X.n == 2;
    long R0 = max_radius(X);
    std::vector<CVal> concrete;
    for (long r = 0; r <= R0; ++r) concrete.push_back(concrete_union(tube_gts(X, r, R0), two, opt));
    auto sym = tube_gts(X, std::nullopt, R0);
    for (long k = 0; k <= R0 + 1; ++k) {
        MotFun f = symbolic_union(sym, two, k, opt);
        bool match = true;
        for (long r = k; r <= R0 && match; ++r) match = f.eval1(r) == concrete[r];
        if (!match) continue;
        for (long r = 0; r < k; ++r) out.add(Guard::equal(1, 0, r), concrete[r], LinForm({0}, 0));
        return out + f;
    }
    throw Unsupported("tube volume did not stabilize");  // unreachable: k = R0 + 1 always matches
}

RationalSeries poincare_series(const CellSet& X, const LocusOptions& opt) {
    return generating_series(tube_measure(X, opt));
}

MotElem gl_measure(int n) {
    if (n < 0) throw DomainError("negative size");
    MotElem m(1);
    for (int i = 0; i < n; ++i) m *= MotElem::L(n) - MotElem::L(i);
    return m * MotElem::L(-static_cast<long>(n) * n);
}

MotElem grassmann_transverse_measure(int n, int d) {
    if (d < 0 || d > n) throw DomainError("need 0 <= d <= n");
    MotElem m(1);
    for (int i = 1; i <= d; ++i) m *= one_minus_Linv(i);
    for (int i = 1; i <= n - d; ++i) m *= one_minus_Linv(i);
    return m;
}

MotElem crofton_constant(int n, int d) {
    if (d == n && n >= 1) return gl_measure(n);
    if (n != 2 || d != 1) throw Unsupported("symbolic Crofton constant only for (2,1) and d = n");
    // Stratify GL_2(O) by v = val g21. For v >= 1 the diagonal entries are
    // units: mass (1 - L^-1)^3 L^-v, weight L^-v. The v = 0 stratum has the
    // remaining mass and weight 1.
    MotFun stratum(1, {"v"});
    CVal c3(one_minus_Linv(1).pow(3));
    stratum.add(Guard::at_least(1, 0, 1), c3, LinForm({-1}, 0));
    MotFun weighted = stratum.times_L(LinForm({-1}, 0));
    auto total = [](const MotFun& f) {
        MotFun s = sum_over(f, 0, LinForm({0}, 1), std::nullopt);
        return s.eval({}).point_coeff();
    };
    MotElem mass0 = gl_measure(2) - total(stratum);
    return mass0 + total(weighted);
}

Estimate crofton_constant_at(int n, int d, int q, int depth, long samples, uint64_t seed) {
    if (d < 1 || d > n) throw DomainError("need 1 <= d <= n");
    if (samples <= 0) throw DomainError("samples must be positive");
    const Field* F = Field::F(q);
    TruncatedRing R(F, depth);
    // histogram of the capped valuation of the minor
    int chunks = thread_count();
    std::vector<std::vector<long>> hist(chunks, std::vector<long>(depth + 1, 0));
    long per = (samples + chunks - 1) / chunks;
    parallel_chunks(chunks, [&](long lo, long hi) {
        for (long c = lo; c < hi; ++c)
            for (long i = c * per; i < std::min(samples, (c + 1) * per); ++i) {
                Philox rng(seed, static_cast<uint64_t>(i));
                TMatrix g = sample_gl(R, n, rng);
                TMatrix h = inverse(R, g);
                TMatrix block;
                for (int a = n - d; a < n; ++a) {
                    std::vector<TruncatedRing::Elem> row;
                    for (int b = 0; b < d; ++b) row.push_back(h[a][b]);
                    block.push_back(row);
                }
                ++hist[c][R.val(det(R, block))];
            }
    });
    mpq_class sum = 0;
    for (const auto& hc : hist)
        for (int v = 0; v <= depth; ++v) sum += mpq_class(hc[v]) * q_pow(q, -v);
    mpq_class mu = gl_measure(n).eval_at(q);
    Estimate e;
    e.samples = samples;
    e.value = mu * sum / mpq_class(samples);
    e.value.canonicalize();
    e.half_width = mu.get_d() * std::sqrt(std::log(2 / (1 - e.confidence)) / (2.0 * samples));
    return e;
}

}  // namespace mv
