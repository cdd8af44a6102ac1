#pragma once

#include <string>

#include "json.hpp"
#include "mv/errors.hpp"
#include "mv/measure.hpp"
#include "mv/preorder.hpp"
#include "mv/riso.hpp"
#include "mv/vitushkin.hpp"

namespace mv {

using json = nlohmann::json;

// Integers stay integers; other rationals become "a/b" strings.
json rational_json(const mpq_class& a);
mpq_class rational_from_json(const json& j);

// {"num": [[exp, coeff], ...], "den": [i, ...]}
json to_json(const MotElem& a);
MotElem motelem_from_json(const json& j);

// {"L_pow": m} or {"etale": "<polynomial in x>"}
json to_json(const ClassAtom& a);
ClassAtom atom_from_json(const json& j, const Field* k);
// Univariate polynomial over k written in x, e.g. "x^2 - 2" or "3*x^3 + x/2".
KUPoly parse_upoly(const std::string& s, const Field* k);

// [[atom, MotElem], ...]; bare numbers and MotElem objects are accepted on input.
json to_json(const CVal& v);
CVal cval_from_json(const json& j, const Field* k);

// {"num": [[T-exp, MotElem], ...], "den": [[alpha, beta], ...]}
json to_json(const RationalSeries& s);
json to_json(const Estimate& e);
json to_json(const RisoReport& r);
json to_json(const CheckReport& r, bool with_runtime);

// {"field": "F7", "Y": [[label, atom]], "Z": [...], "f": [[z, y]], "phi": [[y, CVal]]}
json to_json(const Witness& w);
Witness witness_from_json(const json& j, const Field* dflt = nullptr);

json error_json(const std::string& code, const std::string& message);

}  // namespace mv
