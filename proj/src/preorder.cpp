#include "mv/preorder.hpp"

#include <set>

#include "mv/errors.hpp"

namespace mv {

namespace {

void validate(const Witness& w) {
    std::set<std::string> ys, zs;
    for (const auto& y : w.Y)
        if (!ys.insert(y.label).second) throw DomainError("duplicate Y label " + y.label);
    for (const auto& z : w.Z)
        if (!zs.insert(z.label).second) throw DomainError("duplicate Z label " + z.label);
    std::set<std::string> hit;
    for (const auto& z : w.Z) {
        auto it = w.f.find(z.label);
        if (it == w.f.end()) throw DomainError("f is not defined on " + z.label);
        if (!ys.count(it->second)) throw DomainError("f sends " + z.label + " outside Y");
        hit.insert(it->second);
    }
    for (const auto& [z, y] : w.f)
        if (!zs.count(z)) throw DomainError("f mentions unknown element " + z);
    for (const auto& y : w.Y)
        if (!hit.count(y.label)) throw NotSurjective("no element of Z maps to " + y.label);
    for (const auto& y : w.Y) {
        auto it = w.phi.find(y.label);
        if (it == w.phi.end()) throw DomainError("phi is not defined on " + y.label);
        if (!it->second.is_nonneg()) throw NegativePhi("phi(" + y.label + ") = " + it->second.str());
    }
}

WitnessAtom point(const std::string& label) { return {label, ClassAtom::point()}; }

}  // namespace

CVal witness_value(const Witness& w) {
    validate(w);
    CVal s;
    for (const auto& z : w.Z) s += CVal::atom(z.atom) * w.phi.at(w.f.at(z.label));
    for (const auto& y : w.Y) s -= CVal::atom(y.atom) * w.phi.at(y.label);
    return s;
}

bool check_witness(const CVal& F, const Witness& w) { return witness_value(w) == F; }

Witness embed_nonneg(const CVal& F, const Field* k) {
    if (!F.is_nonneg()) throw NegativePhi("embedded value " + F.str() + " is not nonnegative");
    Witness w;
    w.k = k;
    w.Y = {point("0")};
    w.Z = {point("0"), point("1")};
    w.f = {{"0", "0"}, {"1", "0"}};
    w.phi = {{"0", F}};
    return w;
}

Witness combine(const Witness& a, const Witness& b) {
    if (a.k != b.k) throw BaseFieldMismatch("witnesses over different residue fields");
    Witness w;
    w.k = a.k;
    for (const auto& [src, tag] : {std::pair{&a, "a."}, std::pair{&b, "b."}}) {
        std::string p = tag;
        for (const auto& y : src->Y) w.Y.push_back({p + y.label, y.atom});
        for (const auto& z : src->Z) w.Z.push_back({p + z.label, z.atom});
        for (const auto& [z, y] : src->f) w.f[p + z] = p + y;
        for (const auto& [y, v] : src->phi) w.phi[p + y] = v;
    }
    return w;
}

Witness quadratic_cover_witness(const Field* k) {
    Witness w;
    w.k = k;
    w.Y = {point("pt")};
    KUPoly p(k, {k->from_int(-2), k->zero(), k->one()});
    w.Z = {{"roots", ClassAtom::etale(p)}};
    w.f = {{"roots", "pt"}};
    w.phi = {{"pt", CVal(1)}};
    return w;
}

SpecializedCheck specialize_witness(const CVal& F, const Witness& w, int q) {
    if (!w.k || w.k->is_Q()) throw BaseFieldMismatch("witness over Q has no counting specialization");
    if (w.k->q() != q) throw BaseFieldMismatch("witness is over " + w.k->name());
    SpecializedCheck r;
    r.verified = check_witness(F, w);
    // Surjectivity on F_q-points: every fibre has at least as many points as
    // its base piece, and is nonempty over a nonempty piece.
    for (const auto& y : w.Y) {
        mpq_class base = CVal::atom(y.atom).count_points(q), fibre = 0;
        for (const auto& z : w.Z)
            if (w.f.at(z.label) == y.label) fibre += CVal::atom(z.atom).count_points(q);
        if (fibre < base || (base > 0 && fibre == 0))
            throw NotSurjective("over F_" + std::to_string(q) + " the fibre over " + y.label + " has " +
                                fibre.get_str() + " points");
    }
    r.value = F.count_points(q);
    r.nonneg = r.value >= 0;
    return r;
}

}  // namespace mv
