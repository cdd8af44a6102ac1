#pragma once

#include <map>
#include <string>
#include <vector>

#include "mv/groth.hpp"

namespace mv {

// A labelled finite definable set over k, one piece per label.
struct WitnessAtom {
    std::string label;
    ClassAtom atom;
};

// F >= 0 over a point: F = sum_z phi(f z) - sum_y phi(y) for a surjection
// f : Z -> Y with finite fibres and phi >= 0 on Y.
struct Witness {
    const Field* k = nullptr;
    std::vector<WitnessAtom> Y, Z;
    std::map<std::string, std::string> f;  // Z label -> Y label
    std::map<std::string, CVal> phi;       // Y label -> value
};

// sum_z [z] phi(f z) - sum_y [y] phi(y).
CVal witness_value(const Witness& w);
// NotSurjective / NegativePhi on malformed witnesses, DomainError when f or
// phi is not total.
bool check_witness(const CVal& F, const Witness& w);

// Y = {0}, Z = {0, 1}, phi(0) = F: 2F - F = F.
Witness embed_nonneg(const CVal& F, const Field* k = Field::Q());
// Disjoint union; labels are prefixed with "a." and "b.".
Witness combine(const Witness& a, const Witness& b);
// Witness of [x^2 - 2] - 1 >= 0 over k.
Witness quadratic_cover_witness(const Field* k);

struct SpecializedCheck {
    bool verified = false;
    mpq_class value;  // count_points(F, q)
    bool nonneg = false;
};
// Counting shadow at k = F_q; BaseFieldMismatch when the witness lives over Q
// or another field, NotSurjective when f misses F_q-points.
SpecializedCheck specialize_witness(const CVal& F, const Witness& w, int q);

}  // namespace mv
