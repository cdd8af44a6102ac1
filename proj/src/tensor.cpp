#include "mv/tensor.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <sstream>

#include "mv/errors.hpp"

namespace mv {

Semiring Semiring::capped(long cap) {
    if (cap < 1) throw DomainError("cap must be positive");
    return Semiring(cap);
}

long Semiring::add(long a, long b) const { return cap_ ? std::min(a + b, cap_) : a + b; }
long Semiring::mul(long a, long b) const { return cap_ ? std::min(a * b, cap_) : a * b; }

std::vector<long> Semiring::complements(long a, long b) const {
    std::vector<long> out;
    if (!cap_) {
        if (a >= b) out.push_back(a - b);
        return out;
    }
    for (long c = 0; c <= cap_; ++c)
        if (add(c, b) == a) out.push_back(c);
    return out;
}

std::vector<long> Semiring::quotients(long a, long b, long bound) const {
    std::vector<long> out;
    if (!cap_ && b != 0) {
        if (a % b == 0) out.push_back(a / b);
        return out;
    }
    long hi = cap_ ? cap_ : bound;
    for (long s = 0; s <= hi; ++s)
        if (mul(s, b) == a) out.push_back(s);
    return out;
}

std::vector<long> Semiring::elements(long bound) const {
    std::vector<long> out;
    for (long s = 0; s <= (cap_ ? cap_ : bound); ++s) out.push_back(s);
    return out;
}

std::string Semiring::name() const { return cap_ ? "N<=" + std::to_string(cap_) : "N"; }

std::vector<Semiring> registered_semirings() {
    return {Semiring::naturals(), Semiring::capped(1), Semiring::capped(3), Semiring::capped(5)};
}

Vec FreeModule::basis(int i) const {
    Vec v = zero();
    v.at(i) = 1;
    return v;
}

Vec FreeModule::add(const Vec& a, const Vec& b) const {
    Vec r(rank);
    for (int i = 0; i < rank; ++i) r[i] = S.add(a[i], b[i]);
    return r;
}

Vec FreeModule::scale(long s, const Vec& a) const {
    Vec r(rank);
    for (int i = 0; i < rank; ++i) r[i] = S.mul(s, a[i]);
    return r;
}

bool FreeModule::is_zero(const Vec& a) const {
    return std::all_of(a.begin(), a.end(), [](long x) { return x == 0; });
}

TensorElem TensorElem::pair(const FreeModule& M1, const FreeModule& M2, const Vec& a, const Vec& b, long c) {
    TensorElem e(M1, M2);
    e.add_term({a, b}, c);
    return e;
}

long TensorElem::coeff(const Key& k) const {
    auto it = t_.find(k);
    return it == t_.end() ? 0 : it->second;
}

void TensorElem::add_term(const Key& k, long c) {
    long v = M1_.S.add(coeff(k), c);
    if (v == 0)
        t_.erase(k);
    else
        t_[k] = v;
}

TensorElem TensorElem::operator+(const TensorElem& o) const {
    TensorElem r = *this;
    for (const auto& [k, c] : o.t_) r.add_term(k, c);
    return r;
}

TensorElem TensorElem::scaled(long s) const {
    TensorElem r(M1_, M2_);
    for (const auto& [k, c] : t_) r.add_term(k, M1_.S.mul(s, c));
    return r;
}

std::string TensorElem::str() const {
    if (t_.empty()) return "0";
    auto vs = [](const Vec& v) {
        std::string s = "(";
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + ")";
    };
    std::string out;
    for (const auto& [k, c] : t_) {
        if (!out.empty()) out += " + ";
        if (c != 1) out += std::to_string(c);
        out += "[" + vs(k.first) + ", " + vs(k.second) + "]";
    }
    return out;
}

Vec normal_form(const TensorElem& a) {
    const FreeModule &M1 = a.M1(), &M2 = a.M2();
    const Semiring& S = M1.S;
    Vec nf(static_cast<size_t>(M1.rank) * M2.rank, 0);
    for (const auto& [k, c] : a.terms())
        for (int i = 0; i < M1.rank; ++i)
            for (int j = 0; j < M2.rank; ++j)
                nf[i * M2.rank + j] = S.add(nf[i * M2.rank + j], S.mul(c, S.mul(k.first[i], k.second[j])));
    return nf;
}

TensorElem from_normal_form(const FreeModule& M1, const FreeModule& M2, const Vec& nf) {
    TensorElem e(M1, M2);
    for (int i = 0; i < M1.rank; ++i)
        for (int j = 0; j < M2.rank; ++j) {
            long c = nf.at(i * M2.rank + j);
            if (c) e.add_term({M1.scale(c, M1.basis(i)), M2.basis(j)}, 1);
        }
    return e;
}

namespace {

using Key = TensorElem::Key;

struct Pair {
    TensorElem lhs, rhs;
};

// Every e' with e' + piece == e.
std::vector<TensorElem> extract(const TensorElem& e, const TensorElem& piece) {
    const Semiring& S = e.M1().S;
    std::vector<TensorElem> out{TensorElem(e.M1(), e.M2())};
    for (const auto& [k, c] : e.terms())
        if (!piece.terms().count(k)) out[0].add_term(k, c);
    for (const auto& [k, c] : piece.terms()) {
        auto cs = S.complements(e.coeff(k), c);
        std::vector<TensorElem> next;
        for (const auto& base : out)
            for (long x : cs) {
                TensorElem n = base;
                n.add_term(k, x);
                next.push_back(std::move(n));
            }
        out = std::move(next);
        if (out.empty()) break;
    }
    return out;
}

// p + c == b for some c.
bool below(const TensorElem& p, const TensorElem& b) {
    for (const auto& [k, c] : p.terms())
        if (b.M1().S.complements(b.coeff(k), c).empty()) return false;
    return true;
}

TensorElem single(const TensorElem& ctx, const Key& k, long c = 1) {
    TensorElem e(ctx.M1(), ctx.M2());
    if (c) e.add_term(k, c);
    return e;
}

// Same slot-wise shape with the slots exchanged, so the slot-2 cases reuse
// the slot-1 code.
Key flip(const Key& k) { return {k.second, k.first}; }

long max_coeff(const TensorElem& a) {
    long m = 1;
    for (const auto& [k, c] : a.terms()) m = std::max(m, c);
    return m;
}

long max_entry(const TensorElem& a) {
    long m = 1;
    for (const auto& [k, c] : a.terms()) {
        for (long x : k.first) m = std::max(m, x);
        for (long x : k.second) m = std::max(m, x);
    }
    return m;
}

// Generating pairs (both directions) whose left side uses keys of from and
// whose right side uses keys of to.
std::vector<Pair> candidate_pairs(const TensorElem& from, const TensorElem& to) {
    const Semiring& S = from.M1().S;
    const long bound = std::max(max_entry(from), max_entry(to));
    std::vector<Pair> out;
    for (int slot = 0; slot < 2; ++slot) {
        const FreeModule& M = slot == 0 ? from.M1() : from.M2();
        auto key = [&](const Key& k) { return slot == 0 ? k : flip(k); };  // moving slot first
        for (const auto& [xk, xc] : from.terms()) {
            Key x = key(xk);
            // s = 0: [0, m] ~ 0
            if (M.is_zero(x.first)) out.push_back({single(from, xk), TensorElem(from.M1(), from.M2())});
            for (const auto& [yk, yc] : to.terms()) {
                Key y = key(yk);
                if (x.second != y.second) continue;
                for (long s : S.elements(bound)) {
                    if (s < 2) continue;
                    if (M.scale(s, x.first) == y.first) out.push_back({single(from, xk, s), single(from, yk)});
                    if (M.scale(s, y.first) == x.first) out.push_back({single(from, xk), single(from, yk, s)});
                }
                // split [m + m', n] -> [m, n] + [m', n]
                for (const auto& [zk, zc] : to.terms()) {
                    Key z = key(zk);
                    if (z.second != x.second || zk < yk) continue;
                    if (M.add(y.first, z.first) == x.first)
                        out.push_back({single(from, xk), single(from, yk) + single(from, zk)});
                }
            }
            // merge [m, n] + [m', n] -> [m + m', n]
            for (const auto& [wk, wc] : from.terms()) {
                Key w = key(wk);
                if (w.second != x.second || wk < xk) continue;
                Key merged = key({M.add(x.first, w.first), x.second});
                if (to.terms().count(merged))
                    out.push_back({single(from, xk) + single(from, wk), single(from, merged)});
            }
        }
        for (const auto& [yk, yc] : to.terms())
            if (M.is_zero(key(yk).first)) out.push_back({TensorElem(from.M1(), from.M2()), single(from, yk)});
    }
    return out;
}

bool step_dfs(const TensorElem& rem, const TensorElem& prod, const TensorElem& b, int left) {
    if (rem + prod == b) return true;
    if (left == 0) return false;
    const Semiring& S = b.M1().S;
    long tmax = std::max(max_coeff(rem), max_coeff(b));
    for (const auto& p : candidate_pairs(rem, b))
        for (long t : S.elements(tmax)) {
            if (t == 0) continue;
            TensorElem np = prod + p.rhs.scaled(t);
            if (!below(np, b)) continue;
            for (const auto& r : extract(rem, p.lhs.scaled(t)))
                if (step_dfs(r, np, b, left - 1)) return true;
        }
    return false;
}

// All v in M with entries <= bound and scale(s, v) == target.
std::vector<Vec> vec_quotients(const FreeModule& M, long s, const Vec& target, long bound) {
    std::vector<Vec> out{Vec{}};
    for (int i = 0; i < M.rank; ++i) {
        std::vector<Vec> next;
        for (long x : M.S.quotients(target[i], s, bound))
            for (const auto& v : out) {
                Vec w = v;
                w.push_back(x);
                next.push_back(std::move(w));
            }
        out = std::move(next);
    }
    return out;
}

// All (v, w) with v + w == target, entries <= bound.
std::vector<std::pair<Vec, Vec>> vec_splits(const FreeModule& M, const Vec& target, long bound) {
    std::vector<std::pair<Vec, Vec>> out{{Vec{}, Vec{}}};
    for (int i = 0; i < M.rank; ++i) {
        std::vector<std::pair<Vec, Vec>> next;
        for (long x : M.S.elements(bound))
            for (long y : M.S.complements(target[i], x))
                for (const auto& [v, w] : out) {
                    Vec v2 = v, w2 = w;
                    v2.push_back(x);
                    w2.push_back(y);
                    next.push_back({std::move(v2), std::move(w2)});
                }
        out = std::move(next);
    }
    return out;
}

bool within(const TensorElem& e, long entry_bound, long coeff_bound, size_t max_terms) {
    if (e.terms().size() > max_terms) return false;
    if (e.M1().S.finite()) return true;
    return max_coeff(e) <= coeff_bound && max_entry(e) <= entry_bound;
}

using Pools = std::array<std::set<Vec>, 2>;  // partner vectors for [0, n] and [m, 0]

void add_to_pools(Pools& p, const TensorElem& a) {
    for (const auto& [k, c] : a.terms()) {
        p[0].insert(k.second);
        p[1].insert(k.first);
    }
}

std::vector<TensorElem> rewrites_bounded(const TensorElem& a, long eb, long cb, size_t max_terms,
                                         const Pools& pools) {
    const Semiring& S = a.M1().S;
    std::set<TensorElem> out;
    auto apply = [&](const TensorElem& lhs, const TensorElem& rhs) {
        long tmax = std::max<long>(1, max_coeff(a));
        for (long t : S.elements(tmax)) {
            if (t == 0) continue;
            for (const auto& r : extract(a, lhs.scaled(t))) {
                TensorElem n = r + rhs.scaled(t);
                if (!(n == a) && within(n, eb, cb, max_terms)) out.insert(n);
            }
        }
    };
    Pools seen = pools;
    add_to_pools(seen, a);
    for (int slot = 0; slot < 2; ++slot) {
        const FreeModule& M = slot == 0 ? a.M1() : a.M2();
        auto key = [&](const Key& k) { return slot == 0 ? k : flip(k); };
        for (const auto& [xk, xc] : a.terms()) {
            Key x = key(xk);
            TensorElem lx = single(a, xk);
            if (M.is_zero(x.first)) apply(lx, TensorElem(a.M1(), a.M2()));
            for (long s : S.elements(eb)) {
                if (s < 2) continue;
                // s [m, n] -> [s m, n]
                apply(single(a, xk, s), single(a, key({M.scale(s, x.first), x.second})));
                // [s m, n] -> s [m, n]
                for (const auto& m : vec_quotients(M, s, x.first, eb)) apply(lx, single(a, key({m, x.second}), s));
            }
            for (const auto& [v, w] : vec_splits(M, x.first, eb))
                if (v <= w) apply(lx, single(a, key({v, x.second})) + single(a, key({w, x.second})));
            for (const auto& [wk, wc] : a.terms()) {
                Key w = key(wk);
                if (w.second != x.second || wk < xk) continue;
                apply(lx + single(a, wk), single(a, key({M.add(x.first, w.first), x.second})));
            }
        }
        // 0 -> [0, n]
        for (const auto& n : seen[slot]) apply(TensorElem(a.M1(), a.M2()), single(a, key({M.zero(), n})));
    }
    return {out.begin(), out.end()};
}

}  // namespace

bool one_step_related(const TensorElem& a, const TensorElem& b, int max_terms) {
    if (!(a.M1().S == b.M1().S)) throw DomainError("elements over different semirings");
    return step_dfs(a, TensorElem(a.M1(), a.M2()), b, max_terms);
}

std::vector<TensorElem> rewrites(const TensorElem& a, long entry_bound, long coeff_bound) {
    return rewrites_bounded(a, entry_bound, coeff_bound, a.terms().size() + 2, Pools{});
}

std::string equiv_str(Equiv e) {
    switch (e) {
        case Equiv::Yes: return "yes";
        case Equiv::No: return "no";
        default: return "no-within-bound";
    }
}

Equiv equiv(const TensorElem& a, const TensorElem& b) {
    return normal_form(a) == normal_form(b) ? Equiv::Yes : Equiv::No;
}

Equiv equiv_search(const TensorElem& a, const TensorElem& b, int step_bound) {
    if (a == b) return Equiv::Yes;
    long eb = std::max(max_entry(a), max_entry(b));
    long cb = std::max(max_coeff(a), max_coeff(b));
    for (long x : normal_form(a)) cb = std::max(cb, x);
    for (long x : normal_form(b)) cb = std::max(cb, x);
    size_t mt = std::max(a.terms().size(), b.terms().size()) + 2;
    Pools pools;
    add_to_pools(pools, a);
    add_to_pools(pools, b);
    std::set<TensorElem> seen[2] = {{a}, {b}};
    std::vector<TensorElem> front[2] = {{a}, {b}};
    for (int step = 0; step < step_bound; ++step) {
        int side = front[0].size() <= front[1].size() ? 0 : 1;
        std::vector<TensorElem> next;
        for (const auto& e : front[side])
            for (auto& n : rewrites_bounded(e, eb, cb, mt, pools)) {
                if (seen[1 - side].count(n)) return Equiv::Yes;
                if (seen[side].insert(n).second) next.push_back(std::move(n));
            }
        front[side] = std::move(next);
        if (front[side].empty()) break;
    }
    return Equiv::NoWithinBound;
}

bool in_span(const FreeModule& M, const std::vector<Vec>& gens, const Vec& v) {
    const Semiring& S = M.S;
    auto fits = [&](const Vec& r) {
        if (S.finite()) return true;
        for (int i = 0; i < M.rank; ++i)
            if (r[i] > v[i]) return false;
        return true;
    };
    long bound = 0;
    for (long x : v) bound = std::max(bound, x);
    std::set<Vec> reach{M.zero()};
    for (const auto& g : gens) {
        std::set<Vec> next = reach;
        for (const auto& r : reach)
            for (long c : S.elements(bound)) {
                if (c == 0) continue;
                Vec n = M.add(r, M.scale(c, g));
                if (!fits(n)) break;
                next.insert(n);
            }
        reach = std::move(next);
    }
    return reach.count(v) > 0;
}

namespace {

std::vector<Vec> tensor_gens(const FreeModule& M1, const FreeModule& M2, const std::vector<Vec>& U1,
                             const std::vector<Vec>& U2) {
    std::vector<Vec> gens;
    for (const auto& u : U1)
        for (int j = 0; j < M2.rank; ++j) gens.push_back(normal_form(TensorElem::pair(M1, M2, u, M2.basis(j))));
    for (const auto& u : U2)
        for (int i = 0; i < M1.rank; ++i) gens.push_back(normal_form(TensorElem::pair(M1, M2, M1.basis(i), u)));
    return gens;
}

std::string vstr(const Vec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

}  // namespace

Equiv in_U(const TensorElem& a, const std::vector<Vec>& U1, const std::vector<Vec>& U2) {
    FreeModule T{a.M1().S, a.M1().rank * a.M2().rank};
    return in_span(T, tensor_gens(a.M1(), a.M2(), U1, U2), normal_form(a)) ? Equiv::Yes : Equiv::No;
}

bool in_U_tilde(const TensorElem& a, const std::vector<Vec>& U1, const std::vector<Vec>& U2) {
    for (const auto& [k, c] : a.terms())
        if (!in_span(a.M1(), U1, k.first) && !in_span(a.M2(), U2, k.second)) return false;
    return true;
}

StarReport star_check(const FreeModule& M, const std::vector<Vec>& gens, long samples, uint64_t seed) {
    const Semiring& S = M.S;
    std::mt19937_64 rng(seed);
    auto pick = [&](long hi) { return static_cast<long>(rng() % static_cast<uint64_t>(hi + 1)); };
    long small = S.finite() ? S.cap() : 3;
    StarReport rep;
    for (long it = 0; it < samples; ++it) {
        Vec u = M.zero();
        for (const auto& g : gens) u = M.add(u, M.scale(pick(small), g));
        long s = 1 + pick(small - 1);
        Vec m(M.rank), mp(M.rank);
        bool ok = true;
        for (int i = 0; i < M.rank && ok; ++i) {
            if (S.finite()) {
                m[i] = pick(S.cap());
                auto cs = S.complements(u[i], S.mul(s, m[i]));
                if (cs.empty()) {
                    ok = false;
                    break;
                }
                mp[i] = cs[rng() % cs.size()];
            } else {
                m[i] = pick(u[i] / s);
                mp[i] = u[i] - s * m[i];
            }
        }
        if (!ok) continue;
        ++rep.tested;
        if (!in_span(M, gens, m) || !in_span(M, gens, mp)) {
            rep.holds = false;
            rep.counterexample = "s=" + std::to_string(s) + " m=" + vstr(m) + " m'=" + vstr(mp) + " sum=" + vstr(u);
            return rep;
        }
    }
    return rep;
}

LemmaReport lemma_check(const FreeModule& M1, const FreeModule& M2, const std::vector<Vec>& U1,
                        const std::vector<Vec>& U2, long samples, uint64_t seed) {
    if (!(M1.S == M2.S)) throw DomainError("modules over different semirings");
    LemmaReport rep;
    rep.scalars = star_check(FreeModule{M1.S, 1}, {}, samples, seed);
    if (!rep.scalars.holds) throw HypothesisFailed("{0} in S violates (*): " + rep.scalars.counterexample);
    rep.u1 = star_check(M1, U1, samples, seed + 1);
    if (!rep.u1.holds) throw HypothesisFailed("U1 violates (*): " + rep.u1.counterexample);
    rep.u2 = star_check(M2, U2, samples, seed + 2);
    if (!rep.u2.holds) throw HypothesisFailed("U2 violates (*): " + rep.u2.counterexample);
    rep.tensor = star_check(FreeModule{M1.S, M1.rank * M2.rank}, tensor_gens(M1, M2, U1, U2), samples, seed + 3);
    // U~ is closed under single rewrites, in both directions.
    std::mt19937_64 rng(seed + 4);
    auto rvec = [&](const FreeModule& M) {
        Vec v(M.rank);
        long hi = M.S.finite() ? std::min<long>(M.S.cap(), 2) : 2;
        for (auto& x : v) x = static_cast<long>(rng() % static_cast<uint64_t>(hi + 1));
        return v;
    };
    for (long it = 0; it < samples && rep.holds; ++it) {
        TensorElem a(M1, M2);
        int n = 1 + static_cast<int>(rng() % 2);
        for (int j = 0; j < n; ++j) {
            Vec x = rvec(M1), y = rvec(M2);
            if (rng() % 2 && !U1.empty()) x = M1.scale(1 + static_cast<long>(rng() % 2), U1[rng() % U1.size()]);
            a.add_term({x, y}, 1 + static_cast<long>(rng() % 2));
        }
        bool inside = in_U_tilde(a, U1, U2);
        auto next = rewrites(a, 4, 6);
        for (size_t j = 0; j < next.size() && j < 8; ++j) {
            const TensorElem& b = next[rng() % next.size()];
            ++rep.closure_steps;
            if (in_U_tilde(b, U1, U2) != inside) {
                rep.holds = false;
                rep.tensor.counterexample = "rewrite " + a.str() + " -> " + b.str() + " leaves U~";
                break;
            }
        }
    }
    rep.holds = rep.holds && rep.tensor.holds;
    return rep;
}

}  // namespace mv
