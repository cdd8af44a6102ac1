#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mv/json_io.hpp"
#include "mv/specialize.hpp"
#include "mv/tensor.hpp"

using namespace mv;

namespace {

struct RunConfig {
    std::string field;
    int q = 0;
    long depth = 6;
    long samples = 20000;
    uint64_t seed = 42;
    double tol = 0.05;
    std::string r_range = "0..5";
    std::string format = "json";
    bool timing = false;
    std::string input;
    std::string ball;
    std::optional<int> dim;
    std::optional<int> index;
    std::optional<long> radius;
};

std::string read_input(const std::string& s) {
    std::ifstream in(s);
    if (!in) return s;
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

// --field must agree with a header line; --q only fills in a missing header.
Program load_program(const RunConfig& c) {
    std::string text = read_input(c.input);
    if (!c.field.empty()) return parse(text, Field::parse(c.field));
    try {
        return parse(text, nullptr);
    } catch (const SyntaxError&) {
        return parse(text, c.q > 0 ? Field::F(c.q) : Field::Q());
    }
}

int residue_q(const RunConfig& c, const CellSet& X) {
    if (c.q > 0) return c.q;
    if (X.F->is_Q()) throw UsageError("this verb needs a finite residue field: pass --field F<q> or --q");
    return X.F->q();
}

std::pair<long, long> parse_range(const std::string& s) {
    auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            long r = std::stol(s);
            return {r, r};
        }
        return {std::stol(s.substr(0, dots)), std::stol(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw UsageError("bad --r-range '" + s + "', expected lo..hi");
    }
}

Ball parse_ball(const std::string& text, const Field* F) {
    CellSet b = lower(text, F);
    if (b.cells.size() != 1 || b.cells[0].kind != Cell::Kind::Box)
        throw UsageError("--ball must be a single box(B(c, r), ...) with equal radii");
    std::vector<Series> center;
    long rad = b.cells[0].box.at(0).rad;
    for (const Ball& f : b.cells[0].box) {
        if (f.rad != rad) throw UsageError("--ball factors must share one radius");
        center.push_back(f.center.at(0));
    }
    return Ball(center, rad);
}

SampleOptions sample_options(const RunConfig& c) {
    SampleOptions o;
    o.depth = static_cast<int>(c.depth);
    o.samples = c.samples;
    o.seed = c.seed;
    return o;
}

json base(const std::string& verb, const Program& p) {
    return {{"schema", 1}, {"verb", verb}, {"field", p.F->name()}, {"input", print(p.set)}};
}

int verdict_exit(Verdict v) { return v == Verdict::True ? 0 : 1; }

int run_measure(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    out = base("measure", p);
    CVal m = measure(X, c.dim);
    out["dim"] = c.dim ? *c.dim : X.dim();
    out["measure"] = to_json(m);
    out["str"] = m.str();
    if (!X.F->is_Q()) out["count_at_q"] = rational_json(m.count_points(X.F->q()));
    return 0;
}

int run_tube_series(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    out = base("tube-series", p);
    RationalSeries s = poincare_series(X);
    out["tube_measure"] = tube_measure(X).str();
    out["series"] = to_json(s);
    out["str"] = s.str();
    auto [lo, hi] = parse_range(c.r_range);
    json coeffs = json::array();
    for (long r = lo; r <= hi; ++r) coeffs.push_back({r, s.coeff(r).str()});
    out["coefficients"] = coeffs;
    return 0;
}

int run_riso(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    out = base("riso", p);
    out.update(to_json(min_nonrisotrivial(X)));
    return 0;
}

int run_v0(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    out = base("v0", p);
    CVal v = c.ball.empty() ? v0(X) : v0_rel(X, parse_ball(c.ball, X.F));
    if (!c.ball.empty()) out["ball"] = parse_ball(c.ball, X.F).str();
    out["v0"] = to_json(v);
    out["str"] = v.str();
    return 0;
}

int run_vitushkin(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    out = base("vitushkin", p);
    std::optional<Ball> B;
    if (!c.ball.empty()) B = parse_ball(c.ball, X.F);
    json vs = json::array();
    int lo = c.index ? *c.index : 0, hi = c.index ? *c.index : X.n;
    for (int i = lo; i <= hi; ++i) {
        json v = {{"i", i}};
        std::optional<CVal> exact;
        if (B) {
            if (i == 0) exact = v0_rel(X, *B);
        } else {
            exact = v_i_exact(X, i);
        }
        if (exact) {
            v["mode"] = "symbolic";
            v["value"] = to_json(*exact);
            v["str"] = exact->str();
        } else if (!X.F->is_Q()) {
            int q = residue_q(c, X);
            Estimate e = B ? v_i_rel_estimate(X, *B, i, q, sample_options(c)) : v_i_estimate(X, i, q, sample_options(c));
            v["mode"] = "specialized";
            v["estimate"] = to_json(e);
        } else {
            v["mode"] = "unavailable";
            v["reason"] = "no closed form; pass --field F<q> for a sampled estimate";
        }
        vs.push_back(v);
    }
    out["variations"] = vs;
    return 0;
}

int report(const std::string& verb, const Program& p, const CheckReport& r, const RunConfig& c, json& out) {
    out = base(verb, p);
    out["report"] = to_json(r, c.timing);
    return verdict_exit(r.verdict);
}

int run_crofton(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    return report("crofton-check", p, check_crofton(X, residue_q(c, X), sample_options(c), c.tol), c, out);
}

int run_entropy(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    auto [lo, hi] = parse_range(c.r_range);
    return report("entropy-check", p, check_entropy(X, residue_q(c, X), lo, hi, sample_options(c)), c, out);
}

int run_sumvar(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    if (c.ball.empty()) throw UsageError("sumvar-check needs --ball");
    Ball B = parse_ball(c.ball, X.F);
    return report("sumvar-check", p, check_sum_variations(X, B, residue_q(c, X), sample_options(c)), c, out);
}

int run_integral_bound(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    if (!c.radius) throw UsageError("integral-check needs --radius");
    int i = c.index ? *c.index : 0;
    return report("integral-check", p,
                  check_vi_integral_bound(X, i, residue_q(c, X), *c.radius, sample_options(c)), c, out);
}

int run_preorder(const RunConfig& c, json& out) {
    json doc = json::parse(read_input(c.input));
    if (!doc.contains("F") || !doc.contains("witness"))
        throw UsageError("preorder-check input must be {\"F\": class, \"witness\": {...}}");
    const Field* dflt = c.field.empty() ? nullptr : Field::parse(c.field);
    Witness w = witness_from_json(doc.at("witness"), dflt);
    CVal F = cval_from_json(doc.at("F"), w.k);
    out = {{"schema", 1}, {"verb", "preorder-check"}, {"field", w.k->name()}, {"F", F.str()}};
    out["witness_value"] = witness_value(w).str();
    bool ok = check_witness(F, w);
    out["verified"] = ok;
    if (ok && c.q > 0) {
        SpecializedCheck s = specialize_witness(F, w, c.q);
        out["specialized"] = {{"q", c.q}, {"value", rational_json(s.value)}, {"nonneg", s.nonneg}};
    }
    return ok ? 0 : 1;
}

Semiring semiring_from(const json& j) {
    std::string s = j.is_string() ? j.get<std::string>() : "N";
    if (s == "N") return Semiring::naturals();
    if (s.rfind("N<=", 0) == 0) return Semiring::capped(std::stol(s.substr(3)));
    throw UsageError("unknown semiring '" + s + "', expected N or N<=c");
}

TensorElem tensor_from(const json& j, const FreeModule& A, const FreeModule& B) {
    TensorElem e(A, B);
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 3) throw UsageError("tensor terms must be [coeff, m1, m2]");
        Vec a = t[1].get<Vec>(), b = t[2].get<Vec>();
        if (static_cast<int>(a.size()) != A.rank || static_cast<int>(b.size()) != B.rank)
            throw UsageError("tensor term " + t.dump() + " does not match the module ranks");
        e = e + TensorElem::pair(A, B, a, b, t[0].get<long>());
    }
    return e;
}

int run_tensor(const RunConfig& c, json& out) {
    json doc = json::parse(read_input(c.input));
    Semiring S = semiring_from(doc.value("semiring", json("N")));
    FreeModule A{S, doc.value("M1", 1)}, B{S, doc.value("M2", 1)};
    std::vector<Vec> U1 = doc.value("U1", std::vector<Vec>{}), U2 = doc.value("U2", std::vector<Vec>{});
    out = {{"schema", 1}, {"verb", "tensor-check"}, {"semiring", S.name()}, {"M1", A.rank}, {"M2", B.rank}};
    int code = 0;
    if (doc.contains("a")) {
        TensorElem a = tensor_from(doc.at("a"), A, B);
        out["a"] = a.str();
        out["normal_form"] = normal_form(a);
        if (doc.contains("b")) {
            TensorElem b = tensor_from(doc.at("b"), A, B);
            Equiv e = equiv(a, b);
            out["b"] = b.str();
            out["equiv"] = equiv_str(e);
            out["equiv_search"] = equiv_str(equiv_search(a, b, static_cast<int>(doc.value("step_bound", 3L))));
            code = e == Equiv::Yes ? 0 : 1;
        } else if (doc.contains("U1") || doc.contains("U2")) {
            Equiv e = in_U(a, U1, U2);
            out["in_U"] = equiv_str(e);
            code = e == Equiv::Yes ? 0 : 1;
        }
    }
    if (doc.value("lemma", false)) {
        LemmaReport r = lemma_check(A, B, U1, U2, c.samples, c.seed);
        out["lemma"] = {{"holds", r.holds},
                        {"tested", r.tensor.tested},
                        {"closure_steps", r.closure_steps},
                        {"counterexample", r.tensor.counterexample}};
        if (!r.holds) code = 1;
    }
    return code;
}

int run_specialize(const RunConfig& c, json& out) {
    Program p = load_program(c);
    CellSet X = lower(p);
    if (X.F->is_Q()) throw BaseFieldMismatch("counting needs a finite residue field");
    out = base("specialize", p);
    out["m"] = c.depth;
    if (c.radius) {
        out["r"] = *c.radius;
        out["count"] = rational_json(count_tube(X, *c.radius, c.depth));
    } else {
        out["count"] = rational_json(count_measure(X, c.depth));
    }
    return 0;
}

int run_group_measure(const RunConfig& c, json& out) {
    int n = c.dim ? *c.dim : 2;
    int d = c.index ? *c.index : 1;
    out = {{"schema", 1}, {"verb", "group-measure"}, {"n", n}, {"d", d}};
    MotElem gl = gl_measure(n), tr = grassmann_transverse_measure(n, d), cr = crofton_constant(n, d);
    out["gl_measure"] = {{"value", to_json(gl)}, {"str", gl.str()}};
    out["grassmann_transverse_measure"] = {{"value", to_json(tr)}, {"str", tr.str()}};
    out["crofton_constant"] = {{"value", to_json(cr)}, {"str", cr.str()}};
    if (c.q > 0) {
        out["at_q"] = {{"q", c.q},
                       {"gl_measure", rational_json(gl.eval_at(c.q))},
                       {"grassmann_transverse_measure", rational_json(tr.eval_at(c.q))},
                       {"crofton_constant", rational_json(cr.eval_at(c.q))}};
    }
    return 0;
}

int run_nonneg(const RunConfig& c, json& out) {
    MotElem a = motelem_from_json(json::parse(read_input(c.input)));
    bool nn = a.is_nonneg();
    out = {{"schema", 1}, {"verb", "nonneg"}, {"element", a.str()}, {"nonneg", nn}};
    return nn ? 0 : 1;
}

int exit_code_for(const std::string& code) {
    static const std::set<std::string> usage = {"UsageError", "SyntaxError", "BaseFieldMismatch", "DomainError",
                                                "NonSquarefree", "NegativeCoefficient"};
    static const std::set<std::string> rejected = {"NotSurjective", "NegativePhi", "HypothesisFailed"};
    if (usage.count(code)) return 2;
    if (rejected.count(code)) return 1;
    return 3;
}

void render_text(const json& j, const std::string& indent, std::ostream& os) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& v = it.value();
        bool nested = (v.is_object() && !v.empty()) || (v.is_array() && !v.empty() && (v[0].is_object()));
        if (nested) {
            os << indent << it.key() << ":\n";
            if (v.is_object()) {
                render_text(v, indent + "  ", os);
            } else {
                for (size_t i = 0; i < v.size(); ++i) {
                    os << indent << "  [" << i << "]\n";
                    render_text(v[i], indent + "    ", os);
                }
            }
        } else {
            os << indent << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motivic measures, riso-triviality and Vitushkin variations over k((t))"};
    app.require_subcommand(1);
    RunConfig cfg;

    using Runner = int (*)(const RunConfig&, json&);
    std::vector<std::pair<CLI::App*, Runner>> verbs;
    auto verb = [&](const char* name, const char* help, Runner fn, bool set_input = true, bool needs_input = true) {
        CLI::App* s = app.add_subcommand(name, help);
        auto* in = s->add_option("input", cfg.input,
                                 set_input ? "set description (DSL text or file)" : "JSON document or file");
        if (needs_input) in->required();
        s->add_option("--field", cfg.field, "residue field: Q, F3, F7, ...");
        s->add_option("--q", cfg.q, "residue field size for specialized checks");
        s->add_option("--depth,-m", cfg.depth, "truncation depth")->check(CLI::PositiveNumber);
        s->add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
        s->add_option("--seed", cfg.seed, "RNG seed");
        s->add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);
        s->add_option("--r-range", cfg.r_range, "radius range lo..hi");
        s->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        s->add_flag("--timing", cfg.timing, "include wall-clock runtimes");
        s->add_option("--ball", cfg.ball, "ball as box(B(c1, r), B(c2, r))");
        s->add_option("--dim", cfg.dim, "measure dimension");
        s->add_option("--index,-i", cfg.index, "variation index");
        s->add_option("--radius,-r", cfg.radius, "tube or ball radius exponent");
        verbs.emplace_back(s, fn);
    };
    verb("measure", "motivic measure of a set", run_measure);
    verb("tube-series", "Poincare series of the tubular neighbourhoods", run_tube_series);
    verb("riso", "minimal non-riso-trivial balls and points", run_riso);
    verb("v0", "zeroth Vitushkin variation", run_v0);
    verb("vitushkin", "Vitushkin variations V_0 .. V_n", run_vitushkin);
    verb("crofton-check", "sampled Cauchy-Crofton equality", run_crofton);
    verb("entropy-check", "entropy bound over a radius range", run_entropy);
    verb("sumvar-check", "sum of variations over a ball", run_sumvar);
    verb("integral-check", "integral bound for V_i over small balls", run_integral_bound);
    verb("preorder-check", "verify a preorder witness", run_preorder, false);
    verb("tensor-check", "tensor product equivalence and membership", run_tensor, false);
    verb("group-measure", "GL_n, transverse Grassmann and Crofton measures (--dim n, --index d)", run_group_measure,
         false, false);
    verb("nonneg", "positivity of an element of A given as MotElem JSON", run_nonneg, false);
    verb("specialize", "point count of a set or tube over F_q[[t]]/t^m", run_specialize);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cout << error_json("UsageError", e.what()).dump(2) << "\n";
        return 2;
    }

    json out;
    int code = 0;
    auto start = std::chrono::steady_clock::now();
    try {
        for (auto& [s, fn] : verbs)
            if (s->parsed()) code = fn(cfg, out);
        if (cfg.timing)
            out["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const Error& e) {
        out = error_json(e.code(), e.what());
        code = exit_code_for(e.code());
    } catch (const json::exception& e) {
        out = error_json("UsageError", std::string("bad JSON input: ") + e.what());
        code = 2;
    }
    if (cfg.format == "text")
        render_text(out, "", std::cout);
    else
        std::cout << out.dump(2) << "\n";
    return code;
}
