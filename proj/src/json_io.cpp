#include "mv/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace mv {

json rational_json(const mpq_class& a) {
    if (a.get_den() == 1 && a.get_num().fits_slong_p()) return a.get_num().get_si();
    return a.get_str();
}

mpq_class rational_from_json(const json& j) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_string()) {
        mpq_class a;
        if (a.set_str(j.get<std::string>(), 10) != 0) throw UsageError("bad rational '" + j.get<std::string>() + "'");
        a.canonicalize();
        return a;
    }
    throw UsageError("expected an integer or an \"a/b\" string, got " + j.dump());
}

json to_json(const MotElem& a) {
    json num = json::array();
    for (const auto& [e, c] : a.num().terms()) num.push_back({e, rational_json(c)});
    return {{"num", num}, {"den", a.den()}};
}

MotElem motelem_from_json(const json& j) {
    if (j.is_number_integer() || j.is_string()) return MotElem(rational_from_json(j));
    if (!j.is_object() || !j.contains("num")) throw UsageError("expected a MotElem object, got " + j.dump());
    LaurentPolyL num;
    for (const auto& t : j.at("num")) {
        if (!t.is_array() || t.size() != 2) throw UsageError("MotElem term must be [exp, coeff]");
        num.add_term(t[0].get<long>(), rational_from_json(t[1]));
    }
    std::vector<long> den;
    if (j.contains("den"))
        for (const auto& i : j.at("den")) {
            long v = i.get<long>();
            if (v <= 0) throw UsageError("denominator exponents must be positive");
            den.push_back(v);
        }
    return MotElem(num, den);
}

json to_json(const ClassAtom& a) {
    if (a.kind == ClassAtom::Kind::PowerOfL) return {{"L_pow", a.m}};
    return {{"etale", a.poly.str()}};
}

ClassAtom atom_from_json(const json& j, const Field* k) {
    if (j.is_object() && j.contains("L_pow")) return ClassAtom::power_of_L(j.at("L_pow").get<long>());
    if (j.is_object() && j.contains("etale")) return ClassAtom::etale(parse_upoly(j.at("etale").get<std::string>(), k));
    if (j.is_string() && j.get<std::string>() == "pt") return ClassAtom::point();
    throw UsageError("expected an atom {\"L_pow\": m} or {\"etale\": poly}, got " + j.dump());
}

KUPoly parse_upoly(const std::string& text, const Field* k) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw UsageError("empty polynomial");
    std::map<long, mpq_class> coeffs;
    size_t i = 0;
    auto fail = [&] { throw UsageError("cannot parse polynomial '" + text + "'"); };
    auto number = [&]() {
        size_t st = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
        mpq_class a;
        if (a.set_str(s.substr(st, i - st), 10) != 0) fail();
        a.canonicalize();
        return a;
    };
    while (i < s.size()) {
        mpq_class sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            if (s[i] == '-') sign = -1;
            ++i;
        } else if (!coeffs.empty() || i != 0) {
            fail();
        }
        mpq_class c = 1;
        bool have_num = false;
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            c = number();
            have_num = true;
            if (i < s.size() && s[i] == '*') ++i;
        }
        long e = 0;
        if (i < s.size() && s[i] == 'x') {
            ++i;
            e = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                size_t st = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (st == i) fail();
                e = std::stol(s.substr(st, i - st));
            }
            if (i < s.size() && s[i] == '/') {
                ++i;
                c /= number();
            }
        } else if (!have_num) {
            fail();
        }
        coeffs[e] += sign * c;
    }
    std::vector<KElem> v(static_cast<size_t>(coeffs.rbegin()->first) + 1, k->zero());
    for (const auto& [e, c] : coeffs) v[static_cast<size_t>(e)] = k->from_rational(c);
    return KUPoly(k, v);
}

json to_json(const CVal& v) {
    json out = json::array();
    for (const auto& [key, c] : v.terms()) {
        json atom = key.empty() ? json{{"L_pow", 0}} : json{{"etale", CVal::key_str(key)}};
        out.push_back({atom, to_json(c)});
    }
    return out;
}

CVal cval_from_json(const json& j, const Field* k) {
    if (!j.is_array()) return CVal(motelem_from_json(j));
    CVal v;
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 2) throw UsageError("class term must be [atom, MotElem]");
        v += CVal::atom(atom_from_json(t[0], k), motelem_from_json(t[1]));
    }
    return v;
}

json to_json(const RationalSeries& s) {
    json num = json::array(), den = json::array();
    for (const auto& [r, c] : s.num) num.push_back({r, to_json(c)});
    for (const auto& [a, b] : s.den) den.push_back({a, b});
    return {{"num", num}, {"den", den}};
}

json to_json(const Estimate& e) {
    return {{"value", rational_json(e.value)},
            {"value_float", mpq_class(e.value).get_d()},
            {"half_width", e.half_width},
            {"confidence", e.confidence},
            {"samples", e.samples}};
}

json to_json(const RisoReport& r) {
    std::vector<std::pair<std::string, json>> items;
    for (const RisoItem& it : r.items) {
        json j;
        if (it.singleton) {
            json pt = json::array();
            for (const Series& s : it.point) pt.push_back(s.str());
            j = {{"kind", "point"}, {"point", pt}};
        } else {
            json c = json::array();
            for (const Series& s : it.ball.center) c.push_back(s.str());
            j = {{"kind", "ball"}, {"center", c}, {"radius", it.ball.rad}};
        }
        j["class"] = to_json(it.cls);
        j["str"] = it.str();
        items.emplace_back(it.str(), j);
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    json arr = json::array();
    for (auto& [s, j] : items) arr.push_back(std::move(j));
    return {{"items", arr}, {"s0_class", to_json(r.s0_class)}, {"v0", r.s0_class.str()}};
}

json to_json(const CheckReport& r, bool with_runtime) {
    json j = {{"name", r.name},
              {"mode", r.mode},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"lhs_value", rational_json(r.lhs_value)},
              {"rhs_value", rational_json(r.rhs_value)},
              {"lhs_float", mpq_class(r.lhs_value).get_d()},
              {"rhs_float", mpq_class(r.rhs_value).get_d()},
              {"half_width", r.half_width},
              {"verdict", verdict_str(r.verdict)},
              {"details", r.details}};
    if (with_runtime) j["runtime_s"] = r.runtime;
    return j;
}

json to_json(const Witness& w) {
    json Y = json::array(), Z = json::array(), f = json::array(), phi = json::array();
    for (const auto& a : w.Y) Y.push_back({a.label, to_json(a.atom)});
    for (const auto& a : w.Z) Z.push_back({a.label, to_json(a.atom)});
    for (const auto& [z, y] : w.f) f.push_back({z, y});
    for (const auto& [y, v] : w.phi) phi.push_back({y, to_json(v)});
    return {{"field", w.k ? w.k->name() : "Q"}, {"Y", Y}, {"Z", Z}, {"f", f}, {"phi", phi}};
}

namespace {

std::vector<WitnessAtom> atoms_from_json(const json& j, const Field* k) {
    std::vector<WitnessAtom> out;
    if (!j.is_array()) throw UsageError("witness Y and Z must be arrays");
    for (size_t i = 0; i < j.size(); ++i) {
        const json& a = j[i];
        if (a.is_array() && a.size() == 2 && a[0].is_string())
            out.push_back({a[0].get<std::string>(), atom_from_json(a[1], k)});
        else
            out.push_back({std::to_string(i), atom_from_json(a, k)});
    }
    return out;
}

}  // namespace

Witness witness_from_json(const json& j, const Field* dflt) {
    if (!j.is_object()) throw UsageError("witness must be a JSON object");
    for (const char* key : {"Y", "Z", "f", "phi"})
        if (!j.contains(key)) throw UsageError(std::string("witness is missing \"") + key + "\"");
    Witness w;
    w.k = j.contains("field") ? Field::parse(j.at("field").get<std::string>()) : (dflt ? dflt : Field::Q());
    if (dflt && dflt != w.k) throw BaseFieldMismatch("witness field " + w.k->name() + " differs from " + dflt->name());
    w.Y = atoms_from_json(j.at("Y"), w.k);
    w.Z = atoms_from_json(j.at("Z"), w.k);
    for (const auto& p : j.at("f")) {
        if (!p.is_array() || p.size() != 2) throw UsageError("f entries must be [z, y]");
        w.f[p[0].get<std::string>()] = p[1].get<std::string>();
    }
    for (const auto& p : j.at("phi")) {
        if (!p.is_array() || p.size() != 2) throw UsageError("phi entries must be [y, class]");
        w.phi[p[0].get<std::string>()] = cval_from_json(p[1], w.k);
    }
    return w;
}

json error_json(const std::string& code, const std::string& message) {
    return {{"schema", 1}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace mv
