#include "mv/mot_ring.hpp"

#include "mv/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mv {

LaurentPolyL LaurentPolyL::monomial(long exp, const mpq_class& coeff) {
    LaurentPolyL p;
    p.add_term(exp, coeff);
    return p;
}

mpq_class LaurentPolyL::coeff(long e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void LaurentPolyL::add_term(long e, const mpq_class& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

LaurentPolyL LaurentPolyL::operator+(const LaurentPolyL& o) const {
    LaurentPolyL r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

LaurentPolyL LaurentPolyL::operator-(const LaurentPolyL& o) const {
    LaurentPolyL r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

LaurentPolyL LaurentPolyL::operator*(const LaurentPolyL& o) const {
    LaurentPolyL r;
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) r.add_term(e1 + e2, c1 * c2);
    return r;
}

LaurentPolyL LaurentPolyL::operator-() const {
    LaurentPolyL r = *this;
    for (auto& kv : r.terms_) kv.second = -kv.second;
    return r;
}

LaurentPolyL LaurentPolyL::shift(long k) const {
    LaurentPolyL r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
    return r;
}

mpq_class LaurentPolyL::eval(const mpq_class& q) const {
    mpq_class s = 0;
    for (const auto& [e, c] : terms_) {
        mpq_class p = 1;
        mpq_class base = e >= 0 ? q : mpq_class(1) / q;
        for (long i = 0; i < (e >= 0 ? e : -e); ++i) p *= base;
        s += mpq_class(c) * p;
    }
    return s;
}

bool LaurentPolyL::divide_one_minus(long i, LaurentPolyL& out) const {
    if (is_zero()) {
        out = *this;
        return true;
    }
    long lo = min_exp();
    long d = max_exp() - lo;
    if (d < i) return false;
    std::vector<mpq_class> P(d + 1), Q(d - i + 1);
    for (const auto& [e, c] : terms_) P[e - lo] = c;
    for (long k = 0; k <= d - i; ++k) Q[k] = P[k] + (k >= i ? Q[k - i] : mpq_class(0));
    for (long k = d - i + 1; k <= d; ++k) {
        mpq_class expect = (k - i >= 0 && k - i <= d - i) ? mpq_class(-Q[k - i]) : mpq_class(0);
        if (P[k] != expect) return false;
    }
    LaurentPolyL r;
    for (long k = 0; k <= d - i; ++k) r.add_term(k + lo, Q[k]);
    out = std::move(r);
    return true;
}

QPoly LaurentPolyL::to_qpoly() const {
    if (is_zero()) return QPoly();
    long lo = min_exp();
    std::vector<mpq_class> c(max_exp() - lo + 1);
    for (const auto& [e, v] : terms_) c[e - lo] = v;
    return QPoly(std::move(c));
}

std::string LaurentPolyL::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        long e = it->first;
        mpq_class c = it->second;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        mpq_class a = abs(c);
        if (e == 0) {
            os << a.get_str();
        } else {
            if (a != 1) os << a.get_str() << "*";
            os << "L";
            if (e != 1) os << "^" << e;
        }
        first = false;
    }
    return os.str();
}

MotElem::MotElem(LaurentPolyL num, std::vector<long> den) : num_(std::move(num)) {
    for (long i : den) {
        if (i == 0) throw DomainError("factor 1 - L^0 vanishes");
        if (i > 0) {
            den_.push_back(i);
        } else {
            // 1/(1 - L^-b) = -L^b / (1 - L^b)
            num_ = -num_.shift(-i);
            den_.push_back(-i);
        }
    }
    std::sort(den_.begin(), den_.end());
    cancel();
}

MotElem MotElem::inv_one_minus_L(long a) { return MotElem(LaurentPolyL::constant(1), {a}); }

void MotElem::cancel() {
    if (num_.is_zero()) {
        den_.clear();
        return;
    }
    std::vector<long> keep;
    for (long i : den_) {
        LaurentPolyL q;
        if (num_.divide_one_minus(i, q)) num_ = std::move(q);
        else keep.push_back(i);
    }
    den_ = std::move(keep);
}

namespace {

LaurentPolyL times_factors(LaurentPolyL p, const std::vector<long>& fs) {
    for (long i : fs) p = p - p.shift(i);
    return p;
}

// Multiset difference a \ b for sorted vectors.
std::vector<long> missing(const std::vector<long>& uni, const std::vector<long>& part) {
    std::vector<long> out;
    std::set_difference(uni.begin(), uni.end(), part.begin(), part.end(), std::back_inserter(out));
    return out;
}

}  // namespace

MotElem MotElem::operator+(const MotElem& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    std::vector<long> uni;
    std::set_union(den_.begin(), den_.end(), o.den_.begin(), o.den_.end(), std::back_inserter(uni));
    LaurentPolyL n = times_factors(num_, missing(uni, den_)) + times_factors(o.num_, missing(uni, o.den_));
    MotElem r;
    r.num_ = std::move(n);
    r.den_ = std::move(uni);
    r.cancel();
    return r;
}

MotElem MotElem::operator-() const {
    MotElem r = *this;
    r.num_ = -r.num_;
    return r;
}

MotElem MotElem::operator-(const MotElem& o) const { return *this + (-o); }

MotElem MotElem::operator*(const MotElem& o) const {
    MotElem r;
    r.num_ = num_ * o.num_;
    if (r.num_.is_zero()) return r;
    r.den_ = den_;
    r.den_.insert(r.den_.end(), o.den_.begin(), o.den_.end());
    std::sort(r.den_.begin(), r.den_.end());
    r.cancel();
    return r;
}

MotElem MotElem::pow(unsigned k) const {
    MotElem r(1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
}

bool MotElem::operator==(const MotElem& o) const {
    return times_factors(num_, o.den_) == times_factors(o.num_, den_);
}

long MotElem::degree() const {
    if (is_zero()) return NEG_INF;
    long d = num_.max_exp();
    for (long i : den_) d -= i;
    return d;
}

mpq_class MotElem::eval_at(const mpq_class& q) const {
    if (q <= 1) throw DomainError("evaluation requires q > 1, got " + q.get_str());
    mpq_class v = num_.eval(q);
    for (long i : den_) {
        mpq_class p = 1;
        for (long j = 0; j < i; ++j) p *= q;
        v /= (1 - p);
    }
    return v;
}

bool nonneg_above_one(const QPoly& p) {
    if (p.is_zero()) return true;
    if (p.lead() < 0) return false;
    auto [lc, parts] = squarefree_decomposition(p);
    QPoly odd = QPoly::constant(1);
    for (size_t k = 0; k < parts.size(); k += 2) odd = odd * parts[k];
    if (odd.degree() <= 0) return true;
    if (odd.eval(1) == 0) odd = divmod(odd, QPoly::x_minus(1)).first;
    return sturm_roots_above(odd, 1) == 0;
}

bool MotElem::is_nonneg() const {
    QPoly P = num_.to_qpoly();
    if (den_.size() % 2 == 1) P = mpq_class(-1) * P;
    return nonneg_above_one(P);
}

std::string MotElem::str() const {
    if (den_.empty()) return num_.str();
    std::ostringstream os;
    bool single = num_.terms().size() == 1;
    if (!single) os << "(";
    os << num_.str();
    if (!single) os << ")";
    os << "/(";
    for (size_t k = 0; k < den_.size(); ++k) {
        if (k) os << "*";
        os << "(1 - L";
        if (den_[k] != 1) os << "^" << den_[k];
        os << ")";
    }
    os << ")";
    return os.str();
}

}  // namespace mv
