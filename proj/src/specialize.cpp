#include "mv/specialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include "mv/errors.hpp"

namespace mv {

namespace {

constexpr uint32_t PH_M0 = 0xD2511F53u, PH_M1 = 0xCD9E8D57u;
constexpr uint32_t PH_W0 = 0x9E3779B9u, PH_W1 = 0xBB67AE85u;

void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

const Field* require_finite(const Field* F) {
    if (F == nullptr || F->is_Q()) throw BaseFieldMismatch("point counts need a finite residue field");
    return F;
}

}  // namespace

Philox::Philox(uint64_t seed, uint64_t stream)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)}, stream_(stream) {}

Philox::Block Philox::block(const Block& ctr, std::array<uint32_t, 2> key) {
    Block c = ctr;
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(PH_M0, c[0], hi0, lo0);
        mulhilo(PH_M1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ key[0], lo1, hi0 ^ c[3] ^ key[1], lo0};
        key[0] += PH_W0;
        key[1] += PH_W1;
    }
    return c;
}

uint32_t Philox::next_u32() {
    if (used_ == 4) {
        Block ctr{static_cast<uint32_t>(ctr_), static_cast<uint32_t>(ctr_ >> 32),
                  static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
        buf_ = block(ctr, key_);
        ++ctr_;
        used_ = 0;
    }
    return buf_[used_++];
}

uint64_t Philox::next_u64() {
    uint64_t lo = next_u32();
    uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

uint32_t Philox::uniform(uint32_t n) {
    if (n == 0) throw DomainError("uniform(0)");
    uint64_t range = uint64_t{1} << 32;
    uint64_t limit = range - range % n;
    for (;;) {
        uint32_t x = next_u32();
        if (x < limit) return x % n;
    }
}

double Philox::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

TruncatedRing::TruncatedRing(const Field* F, int m) : F_(require_finite(F)), m_(m) {
    if (m < 1) throw DomainError("truncation depth must be positive");
}

TruncatedRing::Elem TruncatedRing::one() const {
    Elem e = zero();
    e[0] = 1;
    return e;
}

TruncatedRing::Elem TruncatedRing::add(const Elem& a, const Elem& b) const {
    const auto& T = F_->add_table();
    int q = F_->q();
    Elem r(m_);
    for (int i = 0; i < m_; ++i) r[i] = T[a[i] * q + b[i]];
    return r;
}

TruncatedRing::Elem TruncatedRing::neg(const Elem& a) const {
    const auto& N = F_->neg_table();
    Elem r(m_);
    for (int i = 0; i < m_; ++i) r[i] = N[a[i]];
    return r;
}

TruncatedRing::Elem TruncatedRing::sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }

TruncatedRing::Elem TruncatedRing::mul(const Elem& a, const Elem& b) const {
    const auto& A = F_->add_table();
    const auto& M = F_->mul_table();
    int q = F_->q();
    Elem r(m_, 0);
    for (int i = 0; i < m_; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; i + j < m_; ++j) r[i + j] = A[r[i + j] * q + M[a[i] * q + b[j]]];
    }
    return r;
}

TruncatedRing::Elem TruncatedRing::inv(const Elem& a) const {
    if (!is_unit(a)) throw DomainError("not a unit in O/t^m");
    const auto& A = F_->add_table();
    const auto& M = F_->mul_table();
    const auto& N = F_->neg_table();
    int q = F_->q();
    int a0i = F_->inv_table()[a[0]];
    Elem b(m_, 0);
    b[0] = a0i;
    for (int k = 1; k < m_; ++k) {
        int s = 0;
        for (int i = 1; i <= k; ++i) s = A[s * q + M[a[i] * q + b[k - i]]];
        b[k] = M[N[s] * q + a0i];
    }
    return b;
}

int TruncatedRing::val(const Elem& a) const {
    for (int i = 0; i < m_; ++i)
        if (a[i] != 0) return i;
    return m_;
}

TruncatedRing::Elem TruncatedRing::random(Philox& rng) const {
    Elem e(m_);
    for (auto& d : e) d = static_cast<int>(rng.uniform(static_cast<uint32_t>(F_->q())));
    return e;
}

TruncatedRing::Elem TruncatedRing::from_series(const Series& s) const {
    Elem e(m_);
    for (int i = 0; i < m_; ++i) e[i] = F_->code(s.coeff(i));
    return e;
}

Series TruncatedRing::to_series(const Elem& a, long shift) const {
    std::map<long, KElem> t;
    for (int i = 0; i < m_; ++i)
        if (a[i] != 0) t[i + shift] = KElem(a[i]);
    return Series(F_, t);
}

TruncatedRing::Elem det(const TruncatedRing& R, TMatrix a) {
    size_t n = a.size();
    if (n == 0) return R.one();
    if (n == 1) return a[0][0];
    TruncatedRing::Elem total = R.zero();
    for (size_t j = 0; j < n; ++j) {
        TMatrix minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<TruncatedRing::Elem> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(row);
        }
        auto term = R.mul(a[0][j], det(R, minor));
        total = j % 2 ? R.sub(total, term) : R.add(total, term);
    }
    return total;
}

TMatrix inverse(const TruncatedRing& R, TMatrix a) {
    size_t n = a.size();
    TMatrix b(n, std::vector<TruncatedRing::Elem>(n, R.zero()));
    for (size_t i = 0; i < n; ++i) b[i][i] = R.one();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && !R.is_unit(a[piv][col])) ++piv;
        if (piv == n) throw DomainError("matrix is not invertible over O");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        auto u = R.inv(a[col][col]);
        for (size_t k = 0; k < n; ++k) {
            a[col][k] = R.mul(a[col][k], u);
            b[col][k] = R.mul(b[col][k], u);
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            auto f = a[i][col];
            for (size_t k = 0; k < n; ++k) {
                a[i][k] = R.sub(a[i][k], R.mul(f, a[col][k]));
                b[i][k] = R.sub(b[i][k], R.mul(f, b[col][k]));
            }
        }
    }
    return b;
}

TMatrix sample_gl(const TruncatedRing& R, int n, Philox& rng) {
    for (;;) {
        TMatrix g(n, std::vector<TruncatedRing::Elem>(n));
        for (auto& row : g)
            for (auto& e : row) e = R.random(rng);
        if (det(R, g)[0] != 0) return g;
    }
}

std::vector<Series> sample_translation(const TruncatedRing& R, int n, long v0, Philox& rng) {
    std::vector<Series> out;
    for (int i = 0; i < n; ++i) out.push_back(R.to_series(R.random(rng), v0));
    return out;
}

namespace {

// Representatives of B(c, rad) modulo t^depth.
std::vector<Series> ball_reps(const Field* F, const Series& c, long rad, long depth) {
    if (rad >= depth) return {c.truncated(depth)};
    std::vector<Series> reps{c.truncated(rad)};
    for (long i = rad; i < depth; ++i) {
        std::vector<Series> next;
        for (const auto& s : reps)
            for (int d = 0; d < F->q(); ++d) next.push_back(d == 0 ? s : s + Series::monomial(F, i, KElem(d)));
        reps.swap(next);
    }
    return reps;
}

long pow_count(long q, long e, long cap) {
    long r = 1;
    for (long i = 0; i < e; ++i) {
        if (r > cap / q) return cap + 1;
        r *= q;
    }
    return r;
}

long reps_count(int q, long rad, long depth, long cap) { return rad >= depth ? 1 : pow_count(q, depth - rad, cap); }

struct Encoder {
    const Field* F;
    long v, depth;
    std::string key(const std::vector<Series>& p) const {
        std::string k;
        for (const auto& x : p) {
            Series y = x.truncated(depth);
            if (!y.is_zero() && y.val() < v) throw DomainError("coordinate below the lattice");
            for (long i = v; i < depth; ++i) k.push_back(static_cast<char>(F->code(y.coeff(i))));
        }
        return k;
    }
};

long lattice_floor(const CellSet& X) {
    long v = 0;
    auto see = [&](const Series& s) {
        if (!s.is_zero()) v = std::min(v, s.val_lower_bound());
    };
    for (const auto& c : X.cells) {
        for (const auto& p : c.point) see(p);
        for (const auto& b : c.box) {
            see(b.center[0]);
            v = std::min(v, b.rad);
        }
        for (const auto& D : c.domain) {
            see(D.center[0]);
            v = std::min(v, D.rad);
            // f(D) lies in the ball of radius rad around f(center)
            if (!c.f.is_zero()) see(c.f.eval(D.center[0]));
        }
        if (c.tube) v = std::min(v, *c.tube);
    }
    return v;
}

std::unordered_set<std::string> image_keys(const CellSet& X, long depth, int min_dim, long cap, long& v) {
    const Field* F = require_finite(X.F);
    v = std::min(lattice_floor(X), depth);
    Encoder enc{F, v, depth};
    std::unordered_set<std::string> keys;
    int q = F->q();
    for (const auto& c : X.cells) {
        if (c.dim(X.n) < min_dim) continue;
        switch (c.kind) {
            case Cell::Kind::Singleton:
                keys.insert(enc.key(c.point));
                break;
            case Cell::Kind::Box: {
                long total = 1;
                std::vector<std::vector<Series>> fac;
                for (const auto& b : c.box) {
                    long k = reps_count(q, b.rad, depth, cap);
                    if (k > cap || total > cap / k) throw Unsupported("residue enumeration too large");
                    total *= k;
                    fac.push_back(ball_reps(F, b.center[0], b.rad, depth));
                }
                std::vector<size_t> idx(fac.size(), 0);
                for (;;) {
                    std::vector<Series> p;
                    for (size_t i = 0; i < fac.size(); ++i) p.push_back(fac[i][idx[i]]);
                    keys.insert(enc.key(p));
                    size_t i = 0;
                    while (i < idx.size() && ++idx[i] == fac[i].size()) idx[i++] = 0;
                    if (i == idx.size()) break;
                }
                break;
            }
            case Cell::Kind::Graph:
                for (const auto& D : c.domain) {
                    long k = reps_count(q, D.rad, depth, cap);
                    long kt = c.tube ? reps_count(q, *c.tube, depth, cap) : 1;
                    if (k > cap || kt > cap / k) throw Unsupported("residue enumeration too large");
                    for (const auto& s : ball_reps(F, D.center[0], D.rad, depth)) {
                        Series fs = c.f.eval(s);
                        std::vector<Series> deps =
                            c.tube ? ball_reps(F, fs, *c.tube, depth) : std::vector<Series>{fs.truncated(depth)};
                        for (const auto& y : deps) {
                            std::vector<Series> p = c.swap ? std::vector<Series>{y, s} : std::vector<Series>{s, y};
                            keys.insert(enc.key(p));
                        }
                    }
                }
                break;
        }
        if (static_cast<long>(keys.size()) > cap) throw Unsupported("residue enumeration too large");
    }
    return keys;
}

mpq_class q_pow(int q, long e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(std::labs(e)));
    mpq_class r = e >= 0 ? mpq_class(z) : mpq_class(1, 1) / mpq_class(z);
    r.canonicalize();
    return r;
}

}  // namespace

Image image_mod(const CellSet& X, long depth, int min_dim, long max_points) {
    Image img;
    auto keys = image_keys(X, depth, min_dim, max_points, img.v);
    const Field* F = X.F;
    long width = depth - img.v;
    for (const auto& k : keys) {
        std::vector<Series> p;
        for (int i = 0; i < X.n; ++i) {
            std::map<long, KElem> t;
            for (long j = 0; j < width; ++j) {
                int code = static_cast<unsigned char>(k[i * width + j]);
                if (code) t[img.v + j] = KElem(code);
            }
            p.push_back(Series(F, t));
        }
        img.points.push_back(p);
    }
    std::sort(img.points.begin(), img.points.end());
    return img;
}

long stabilization_depth(const CellSet& X) {
    long m = 0;
    std::vector<const Cell*> pts;
    for (const auto& c : X.cells) {
        for (const auto& b : c.box) m = std::max(m, b.rad);
        for (const auto& D : c.domain) m = std::max(m, D.rad);
        if (c.tube) m = std::max(m, *c.tube);
        if (c.kind == Cell::Kind::Singleton) pts.push_back(&c);
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            long sep = VAL_INF;
            for (int k = 0; k < X.n; ++k) {
                Series d = pts[i]->point[k] - pts[j]->point[k];
                if (!d.is_zero()) sep = std::min(sep, d.val());
            }
            if (sep != VAL_INF) m = std::max(m, sep);
        }
    return m + 1;
}

mpq_class count_measure(const CellSet& X, long m) {
    require_finite(X.F);
    int d = X.dim();
    if (d < 0) return 0;
    long need = stabilization_depth(X);
    if (m < need) throw DepthTooSmall("depth " + std::to_string(m) + " below stabilization depth " + std::to_string(need));
    long v;
    auto keys = image_keys(X, m, d, 4000000, v);
    return mpq_class(static_cast<long>(keys.size())) * q_pow(X.F->q(), -m * d);
}

mpq_class count_tube(const CellSet& X, long r, long m) {
    require_finite(X.F);
    if (m < r) throw DepthTooSmall("tube count needs m >= r");
    if (X.cells.empty()) return 0;
    long v;
    auto keys = image_keys(X, r, 0, 4000000, v);
    return mpq_class(static_cast<long>(keys.size())) * q_pow(X.F->q(), -r * X.n);
}

mpq_class count_tube_enumerate(const CellSet& X, long r, long m) {
    require_finite(X.F);
    if (m < r) throw DepthTooSmall("tube count needs m >= r");
    if (X.cells.empty()) return 0;
    int q = X.F->q();
    Image img = image_mod(X, m, 0);
    long v = std::min(img.v, r);
    long width = m - v;
    long cells = pow_count(q, width * X.n, 1 << 22);
    if (cells > (1 << 22)) throw Unsupported("grid too large for enumeration");
    // digit rows of the image, aligned to v
    std::vector<std::vector<int>> rows;
    for (const auto& p : img.points) {
        std::vector<int> row;
        for (const auto& x : p)
            for (long i = v; i < m; ++i) row.push_back(X.F->code(x.coeff(i)));
        rows.push_back(row);
    }
    long hits = 0;
    std::vector<int> g(width * X.n, 0);
    for (long code = 0; code < cells; ++code) {
        long c = code;
        for (auto& d : g) {
            d = static_cast<int>(c % q);
            c /= q;
        }
        bool in = false;
        for (const auto& row : rows) {
            bool close = true;
            for (int k = 0; k < X.n && close; ++k)
                for (long i = 0; i < r - v && close; ++i)
                    if (row[k * width + i] != g[k * width + i]) close = false;
            if (close) {
                in = true;
                break;
            }
        }
        hits += in;
    }
    return mpq_class(hits) * q_pow(q, -m * X.n);
}

int thread_count() {
    if (const char* env = std::getenv("MV_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

void parallel_chunks(long n, const std::function<void(long, long)>& body) {
    int k = static_cast<int>(std::min<long>(thread_count(), std::max<long>(n, 1)));
    if (k <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < k; ++i) pool.emplace_back(body, n * i / k, n * (i + 1) / k);
    for (auto& t : pool) t.join();
}

}  // namespace mv
