#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mv/dsl.hpp"

namespace mv {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream); the counter advances by one per block of four words.
class Philox {
public:
    using Block = std::array<uint32_t, 4>;
    Philox(uint64_t seed, uint64_t stream);
    static Block block(const Block& ctr, std::array<uint32_t, 2> key);

    uint32_t next_u32();
    uint64_t next_u64();
    // Uniform in [0, n), unbiased.
    uint32_t uniform(uint32_t n);
    double uniform01();
    uint64_t counter() const { return ctr_; }

private:
    std::array<uint32_t, 2> key_;
    uint64_t stream_;
    uint64_t ctr_ = 0;
    Block buf_{};
    int used_ = 4;
};

// O / t^m over F_q, elements as digit vectors of length m (field codes).
class TruncatedRing {
public:
    using Elem = std::vector<int>;
    TruncatedRing(const Field* F, int m);

    const Field* field() const { return F_; }
    int depth() const { return m_; }
    Elem zero() const { return Elem(m_, 0); }
    Elem one() const;
    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem mul(const Elem& a, const Elem& b) const;
    bool is_unit(const Elem& a) const { return a[0] != 0; }
    Elem inv(const Elem& a) const;  // DomainError for non-units
    int val(const Elem& a) const;   // m for zero
    Elem random(Philox& rng) const;
    Elem from_series(const Series& s) const;  // digits 0..m-1
    Series to_series(const Elem& a, long shift = 0) const;

private:
    const Field* F_;
    int m_;
};

using TMatrix = std::vector<std::vector<TruncatedRing::Elem>>;

// Uniform element of GL_n(O/t^m) by rejection on the residue determinant.
TMatrix sample_gl(const TruncatedRing& R, int n, Philox& rng);
// Uniform element of (t^v0 O / t^(v0+m))^n.
std::vector<Series> sample_translation(const TruncatedRing& R, int n, long v0, Philox& rng);
TruncatedRing::Elem det(const TruncatedRing& R, TMatrix a);
TMatrix inverse(const TruncatedRing& R, TMatrix a);

// Digits of the image of every point of X in (t^v O / t^depth)^n for the cells
// of dimension >= min_dim; v is chosen below every coordinate of X.
struct Image {
    long v = 0;
    std::vector<std::vector<Series>> points;
};
Image image_mod(const CellSet& X, long depth, int min_dim = 0, long max_points = 4000000);
long stabilization_depth(const CellSet& X);

// #(image of the top-dimensional cells mod t^m) / q^(m d).
mpq_class count_measure(const CellSet& X, long m);
// #(T_r(X) mod t^m) / q^(m n).
mpq_class count_tube(const CellSet& X, long r, long m);
// The same count by scanning every residue class mod t^m; small cases only.
mpq_class count_tube_enumerate(const CellSet& X, long r, long m);

// Worker count: MV_THREADS if set, else the hardware concurrency.
int thread_count();
// Split [0, n) into contiguous chunks run on worker threads; body(lo, hi).
void parallel_chunks(long n, const std::function<void(long, long)>& body);

}  // namespace mv
