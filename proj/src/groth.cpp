#include "mv/groth.hpp"

#include "mv/errors.hpp"

#include <sstream>

namespace mv {

ClassAtom ClassAtom::power_of_L(long m) {
    if (m < 0) throw DomainError("[k^m] needs m >= 0");
    ClassAtom a;
    a.kind = Kind::PowerOfL;
    a.m = m;
    return a;
}

ClassAtom ClassAtom::etale(const KUPoly& p) {
    if (p.is_zero() || !is_squarefree(p))
        throw NonSquarefree("etale atom polynomial " + p.str() + " is not squarefree");
    ClassAtom a;
    a.kind = Kind::Etale;
    a.poly = p.monic();
    return a;
}

CVal::CVal(const MotElem& c) { add_term({}, c); }

CVal CVal::atom(const ClassAtom& a, const MotElem& coeff) {
    CVal r;
    if (a.kind == ClassAtom::Kind::PowerOfL) {
        r.add_term({}, coeff * MotElem::L(a.m));
        return r;
    }
    const KUPoly& p = a.poly;
    auto roots = roots_in_k(p);
    r.add_term({}, coeff * MotElem(static_cast<long>(roots.size())));
    if (p.F->is_Q()) {
        QPoly rest(p.c);
        for (const auto& [x, mult] : roots) rest = divmod(rest, QPoly::x_minus(x)).first;
        if (rest.degree() > 0) r.add_term(rest.monic().c, coeff);
    }
    return r;
}

void CVal::add_term(const Key& k, const MotElem& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

bool CVal::has_etale() const {
    for (const auto& kv : terms_)
        if (!kv.first.empty()) return true;
    return false;
}

MotElem CVal::point_coeff() const {
    auto it = terms_.find({});
    return it == terms_.end() ? MotElem(0) : it->second;
}

CVal CVal::operator+(const CVal& o) const {
    CVal r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

CVal CVal::operator-() const {
    CVal r;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

CVal CVal::operator-(const CVal& o) const { return *this + (-o); }

CVal CVal::scaled(const MotElem& m) const {
    CVal r;
    for (const auto& [k, c] : terms_) r.add_term(k, c * m);
    return r;
}

CVal CVal::operator*(const CVal& o) const {
    if (!has_etale()) return o.scaled(point_coeff());
    if (!o.has_etale()) return scaled(o.point_coeff());
    throw Unsupported("product of two etale classes over Q");
}

bool CVal::operator==(const CVal& o) const { return (*this - o).is_zero(); }

bool CVal::is_nonneg() const {
    for (const auto& kv : terms_)
        if (!kv.second.is_nonneg()) return false;
    return true;
}

mpq_class CVal::count_points(int q) const {
    mpq_class s = 0;
    for (const auto& [k, c] : terms_) {
        if (!k.empty())
            throw BaseFieldMismatch("class [" + key_str(k) + "] is defined over Q, cannot count over F" +
                                    std::to_string(q));
        s += c.eval_at(q);
    }
    return s;
}

mpq_class CVal::eval_at(const mpq_class& q) const {
    mpq_class s = 0;
    for (const auto& [k, c] : terms_) {
        if (!k.empty()) throw BaseFieldMismatch("value involves the etale class [" + key_str(k) + "]");
        s += c.eval_at(q);
    }
    return s;
}

std::string CVal::key_str(const Key& k) { return QPoly(k).str(); }

std::string CVal::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (k.empty()) {
            os << c.str();
        } else {
            std::string cs = c.str();
            if (cs != "1") os << "(" << cs << ")*";
            os << "[" << key_str(k) << "]";
        }
    }
    return os.str();
}

CVal mu0_finite(const std::vector<ClassAtom>& atoms) {
    CVal r;
    for (const auto& a : atoms) r += CVal::atom(a);
    return r;
}

mpq_class count_points(const CVal& c, int q) { return c.count_points(q); }

CVal cval_add(const CVal& a, const CVal& b) { return a + b; }

CVal cval_scale(const CVal& a, const MotElem& m) {
    if (!m.is_nonneg()) throw NegativeCoefficient("scaling factor " + m.str() + " is not in A_+");
    return a.scaled(m);
}

}  // namespace mv
