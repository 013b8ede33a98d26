#include "absde/config.hpp"

#include "absde/error.hpp"
#include "absde/expression.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

namespace absde {
namespace {

using json = nlohmann::ordered_json;

std::string kind_name(const json& v) {
    switch (v.type()) {
    case json::value_t::object: return "object";
    case json::value_t::array: return "array";
    case json::value_t::string: return "string";
    case json::value_t::boolean: return "boolean";
    case json::value_t::null: return "null";
    default: return "number";
    }
}

/// One JSON object being read; remembers its path and rejects unknown keys.
class Section {
public:
    Section(const json& value, std::string path, std::set<std::string> allowed)
        : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) throw SchemaError(path_, "expected an object, got " + kind_name(value_));
        for (const auto& [key, _] : value_.items())
            if (!allowed.count(key)) throw SchemaError(child(key), "unknown key");
    }

    std::string child(const std::string& key) const { return path_ + "." + key; }
    bool has(const std::string& key) const { return value_.contains(key); }
    const json& at(const std::string& key) const { return value_.at(key); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return as_number(at(key), child(key));
    }
    std::optional<double> optional_number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return as_number(at(key), child(key));
    }
    std::uint64_t integer(const std::string& key, std::uint64_t fallback, std::uint64_t min = 0) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw SchemaError(child(key), "expected a nonnegative integer, got " + v.dump());
        const auto out = v.get<std::uint64_t>();
        if (out < min) throw SchemaError(child(key), "must be at least " + std::to_string(min));
        return out;
    }
    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        if (!at(key).is_string()) throw SchemaError(child(key), "expected a string, got " + kind_name(at(key)));
        return at(key).get<std::string>();
    }
    std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (v.is_string()) return {v.get<std::string>()};
        if (!v.is_array()) throw SchemaError(child(key), "expected a string or an array of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) throw SchemaError(child(key) + "[" + std::to_string(i) + "]", "expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }
    std::map<std::string, double> number_map(const std::string& key) const {
        std::map<std::string, double> out;
        if (!has(key)) return out;
        const json& v = at(key);
        if (!v.is_object()) throw SchemaError(child(key), "expected an object of numbers");
        for (const auto& [k, x] : v.items()) out[k] = as_number(x, child(key) + "." + k);
        return out;
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw SchemaError(path, "expected a number, got " + kind_name(v));
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
        return x;
    }

private:
    const json& value_;
    std::string path_;
};

void positive(double v, const std::string& path) {
    if (!(v > 0.0)) throw SchemaError(path, "must be positive");
}

DelayConfig read_delay(const Section& parent, const std::string& key) {
    DelayConfig out;
    if (!parent.has(key)) return out;
    const std::string path = parent.child(key);
    const json& v = parent.at(key);
    if (v.is_number()) {
        out.value = Section::as_number(v, path);
    } else {
        const Section s(v, path, {"kind", "value"});
        out.kind = s.string("kind", "constant");
        if (out.kind == "constant") {
            out.value = s.number("value", 0.0);
        } else if (out.kind == "expression") {
            if (!s.has("value") || !s.at("value").is_string())
                throw SchemaError(s.child("value"), "expression delay needs a string value");
            out.expression = s.at("value").get<std::string>();
        } else {
            throw SchemaError(s.child("kind"), "expected 'constant' or 'expression'");
        }
    }
    if (out.kind == "constant" && out.value < 0.0) throw SchemaError(path, "delay must be nonnegative");
    return out;
}

json delay_json(const DelayConfig& d) {
    if (d.kind == "constant") return json{{"kind", "constant"}, {"value", d.value}};
    return json{{"kind", "expression"}, {"value", d.expression}};
}

json strings_json(const std::vector<std::string>& v) {
    if (v.size() == 1) return v.front();
    return json(v);
}

bool is_terminal_builtin(const std::vector<std::string>& v) {
    return v.size() == 1 && (v[0] == "zero" || v[0] == "brownian" || v[0] == "clipped_brownian");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
    const Section root(doc, "$",
                       {"problem", "terminal", "generator", "solver", "outputs", "bounds", "convergence", "validation"});
    RunConfig c;
    for (const char* required : {"problem", "terminal", "generator"})
        if (!root.has(required)) throw SchemaError(root.child(required), "missing section");

    {
        const Section s(root.at("problem"), "$.problem", {"n", "d", "T", "K", "steps_per_unit", "delta", "zeta", "L"});
        c.problem.n = s.integer("n", 1, 1);
        c.problem.d = s.integer("d", 1, 1);
        c.problem.T = s.number("T", 1.0);
        positive(c.problem.T, s.child("T"));
        c.problem.K = s.number("K", 0.0);
        if (c.problem.K < 0.0) throw SchemaError(s.child("K"), "must be nonnegative");
        c.problem.steps_per_unit = static_cast<int>(s.integer("steps_per_unit", 100, 1));
        c.problem.delta = read_delay(s, "delta");
        c.problem.zeta = read_delay(s, "zeta");
        c.problem.L = s.optional_number("L");
        if (c.problem.L && *c.problem.L < 1.0) throw SchemaError(s.child("L"), "must be at least 1");
    }
    {
        const Section s(root.at("terminal"), "$.terminal", {"xi", "eta"});
        c.terminal.xi = s.strings("xi", {"zero"});
        c.terminal.eta = s.strings("eta", {"zero"});
        const std::size_t n = c.problem.n, d = c.problem.d;
        if (!is_terminal_builtin(c.terminal.xi) && c.terminal.xi.size() != n)
            throw SchemaError(s.child("xi"), "expected a terminal builtin or " + std::to_string(n) + " expressions");
        if (!is_terminal_builtin(c.terminal.eta) && c.terminal.eta.size() != n * d)
            throw SchemaError(s.child("eta"),
                              "expected a terminal builtin or " + std::to_string(n * d) + " expressions");
    }
    {
        const Section s(root.at("generator"), "$.generator",
                        {"builtin", "knobs", "params", "expressions", "split_g", "convexity", "claimed_assumption"});
        GeneratorConfig& g = c.generator;
        if (s.has("builtin")) g.builtin = s.string("builtin", "");
        g.knobs = s.number_map("knobs");
        g.params = s.number_map("params");
        g.expressions = s.strings("expressions", {});
        g.split_g = s.strings("split_g", {});
        g.convexity = s.strings("convexity", {});
        if (s.has("claimed_assumption")) g.claimed_assumption = s.string("claimed_assumption", "");
        if (g.builtin.has_value() == !g.expressions.empty())
            throw SchemaError("$.generator", "give exactly one of 'builtin' or 'expressions'");
        if (g.builtin && (!g.split_g.empty()))
            throw SchemaError(s.child("split_g"), "split_g is only used with expressions");
        if (!g.builtin && !g.knobs.empty()) throw SchemaError(s.child("knobs"), "knobs need a builtin");
        if (!g.expressions.empty() && g.expressions.size() != c.problem.n)
            throw SchemaError(s.child("expressions"), "expected " + std::to_string(c.problem.n) + " expressions");
        if (!g.split_g.empty() && g.split_g.size() != c.problem.n)
            throw SchemaError(s.child("split_g"), "expected " + std::to_string(c.problem.n) + " expressions");
        for (const auto& [name, _] : g.params) {
            const auto& names = GrowthParams::names();
            if (std::find(names.begin(), names.end(), name) == names.end())
                throw SchemaError(s.child("params") + "." + name, "unknown growth constant");
        }
        for (std::size_t i = 0; i < g.convexity.size(); ++i)
            if (g.convexity[i] != "none" && g.convexity[i] != "convex" && g.convexity[i] != "concave")
                throw SchemaError(s.child("convexity") + "[" + std::to_string(i) + "]",
                                  "expected none, convex or concave");
        if (!g.convexity.empty() && g.convexity.size() != c.problem.n)
            throw SchemaError(s.child("convexity"), "expected one entry per component");
        if (g.claimed_assumption && !assumption_from_key(*g.claimed_assumption))
            throw SchemaError(s.child("claimed_assumption"), "expected one of 3.1, 4.1, 4.2, 5.1, 5.3");
    }
    if (root.has("solver")) {
        const Section s(root.at("solver"), "$.solver",
                        {"paths", "seed", "basis", "degree", "ridge", "z_max", "picard_tol", "max_iter", "kappa"});
        SolverConfig& v = c.solver;
        v.paths = s.integer("paths", v.paths, 2);
        v.seed = s.integer("seed", v.seed);
        v.basis = s.string("basis", v.basis);
        if (v.basis != "polynomial" && v.basis != "bins")
            throw SchemaError(s.child("basis"), "expected 'polynomial' or 'bins'");
        v.degree = static_cast<int>(s.integer("degree", v.degree, 1));
        v.ridge = s.number("ridge", v.ridge);
        if (v.ridge < 0.0) throw SchemaError(s.child("ridge"), "must be nonnegative");
        v.z_max = s.number("z_max", v.z_max);
        positive(v.z_max, s.child("z_max"));
        v.picard_tol = s.number("picard_tol", v.picard_tol);
        positive(v.picard_tol, s.child("picard_tol"));
        v.max_iter = s.integer("max_iter", v.max_iter, 1);
        v.kappa = s.optional_number("kappa");
        if (v.kappa) positive(*v.kappa, s.child("kappa"));
    }
    if (root.has("outputs")) {
        const Section s(root.at("outputs"), "$.outputs", {"csv_path", "report_path"});
        c.outputs.csv_path = s.string("csv_path", c.outputs.csv_path);
        c.outputs.report_path = s.string("report_path", c.outputs.report_path);
    }
    if (root.has("bounds")) {
        const Section s(root.at("bounds"), "$.bounds", {"q", "gamma_bar"});
        c.bounds.q = s.number("q", c.bounds.q);
        if (!(c.bounds.q > 1.0)) throw SchemaError(s.child("q"), "must exceed 1");
        c.bounds.gamma_bar = s.number("gamma_bar", c.bounds.gamma_bar);
        if (c.bounds.gamma_bar < 0.0) throw SchemaError(s.child("gamma_bar"), "must be nonnegative");
    }
    if (root.has("convergence")) {
        const Section s(root.at("convergence"), "$.convergence", {"pairs", "oracle"});
        c.convergence.oracle = s.string("oracle", c.convergence.oracle);
        if (c.convergence.oracle != "cole_hopf" && c.convergence.oracle != "linear_delay" &&
            c.convergence.oracle != "zero")
            throw SchemaError(s.child("oracle"), "expected cole_hopf, linear_delay or zero");
        if (s.has("pairs")) {
            const json& v = s.at("pairs");
            if (!v.is_array() || v.empty()) throw SchemaError(s.child("pairs"), "expected a nonempty array");
            c.convergence.pairs.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Section p(v[i], s.child("pairs") + "[" + std::to_string(i) + "]", {"steps_per_unit", "paths"});
                if (!p.has("steps_per_unit") || !p.has("paths"))
                    throw SchemaError(s.child("pairs") + "[" + std::to_string(i) + "]",
                                      "needs steps_per_unit and paths");
                c.convergence.pairs.push_back(
                    {static_cast<int>(p.integer("steps_per_unit", 0, 1)), p.integer("paths", 0, 2)});
            }
        }
    }
    if (root.has("validation")) {
        const Section s(root.at("validation"), "$.validation", {"samples", "radius"});
        c.validation.samples = s.integer("samples", c.validation.samples, 1);
        c.validation.radius = s.number("radius", c.validation.radius);
        positive(c.validation.radius, s.child("radius"));
    }

    // compile everything once so bad expressions and builtins surface here
    make_model(c);
    make_delay(c.problem.delta);
    make_delay(c.problem.zeta);
    if (c.generator.claimed_assumption == "5.3") {
        const bool split = !c.generator.split_g.empty() || c.generator.builtin == "split_fg";
        if (!split) throw SchemaError("$.generator.claimed_assumption", "5.3 needs a split generator");
    }
    return c;
}

std::string echo_config(const RunConfig& c) {
    json doc;
    json problem{{"n", c.problem.n},
                 {"d", c.problem.d},
                 {"T", c.problem.T},
                 {"K", c.problem.K},
                 {"steps_per_unit", c.problem.steps_per_unit},
                 {"delta", delay_json(c.problem.delta)},
                 {"zeta", delay_json(c.problem.zeta)}};
    if (c.problem.L) problem["L"] = *c.problem.L;
    doc["problem"] = problem;
    doc["terminal"] = json{{"xi", strings_json(c.terminal.xi)}, {"eta", strings_json(c.terminal.eta)}};
    json gen = json::object();
    if (c.generator.builtin) gen["builtin"] = *c.generator.builtin;
    if (!c.generator.knobs.empty()) gen["knobs"] = c.generator.knobs;
    if (!c.generator.params.empty()) gen["params"] = c.generator.params;
    if (!c.generator.expressions.empty()) gen["expressions"] = c.generator.expressions;
    if (!c.generator.split_g.empty()) gen["split_g"] = c.generator.split_g;
    if (!c.generator.convexity.empty()) gen["convexity"] = c.generator.convexity;
    if (c.generator.claimed_assumption) gen["claimed_assumption"] = *c.generator.claimed_assumption;
    doc["generator"] = gen;
    json solver{{"paths", c.solver.paths},   {"seed", c.solver.seed},   {"basis", c.solver.basis},
                {"degree", c.solver.degree}, {"ridge", c.solver.ridge}, {"z_max", c.solver.z_max},
                {"picard_tol", c.solver.picard_tol}, {"max_iter", c.solver.max_iter}};
    if (c.solver.kappa) solver["kappa"] = *c.solver.kappa;
    doc["solver"] = solver;
    doc["outputs"] = json{{"csv_path", c.outputs.csv_path}, {"report_path", c.outputs.report_path}};
    doc["bounds"] = json{{"q", c.bounds.q}, {"gamma_bar", c.bounds.gamma_bar}};
    json pairs = json::array();
    for (const auto& p : c.convergence.pairs) pairs.push_back({{"steps_per_unit", p.steps_per_unit}, {"paths", p.paths}});
    doc["convergence"] = json{{"pairs", pairs}, {"oracle", c.convergence.oracle}};
    doc["validation"] = json{{"samples", c.validation.samples}, {"radius", c.validation.radius}};
    return doc.dump(2);
}

DelayFn make_delay(const DelayConfig& delay) {
    if (delay.kind == "constant") return constant_delay(delay.value);
    auto expr = std::make_shared<Expression>(compile_expression(delay.expression, VariableLayout{0, 0}));
    return [expr](double t) {
        const double slot[1] = {t};
        return expr->evaluate(slot);
    };
}

TimeGrid make_grid(const ProblemConfig& p) {
    return build_grid(p.T, p.K, p.steps_per_unit, make_delay(p.delta), make_delay(p.zeta));
}

Model make_model(const RunConfig& c) {
    const std::size_t n = c.problem.n, d = c.problem.d;
    GrowthParams params;
    params.n = n;
    params.d = d;
    params.T = c.problem.T;
    for (const auto& [name, v] : c.generator.params) params.set(name, v);
    if (c.problem.L) params.L = *c.problem.L;

    Model m;
    if (c.generator.builtin) {
        m = builtin(*c.generator.builtin, params, Knobs(c.generator.knobs.begin(), c.generator.knobs.end()));
    } else {
        m.spec = generator_from_expressions(params, c.generator.expressions, c.generator.split_g);
        m.spec.name = "expressions";
    }
    if (c.generator.claimed_assumption) m.spec.claimed = assumption_from_key(*c.generator.claimed_assumption);
    if (!c.generator.convexity.empty()) {
        m.spec.convexity.clear();
        for (const auto& s : c.generator.convexity)
            m.spec.convexity.push_back(s == "convex" ? Convexity::Convex
                                                     : s == "concave" ? Convexity::Concave : Convexity::None);
    }

    const auto pick = [&](const std::vector<std::string>& v) { return is_terminal_builtin(v); };
    TerminalData xi_src, eta_src;
    const std::vector<std::string> zero_eta(n * d, "0"), zero_xi(n, "0");
    xi_src = pick(c.terminal.xi) ? terminal_builtin(c.terminal.xi[0], n, d)
                                 : terminal_from_expressions(c.terminal.xi, zero_eta, n, d);
    eta_src = pick(c.terminal.eta) ? terminal_builtin(c.terminal.eta[0], n, d)
                                   : terminal_from_expressions(zero_xi, c.terminal.eta, n, d);
    m.terminal.xi = xi_src.xi;
    m.terminal.xi_label = xi_src.xi_label;
    m.terminal.eta = eta_src.eta;
    m.terminal.eta_label = eta_src.eta_label;
    m.terminal.eta_is_zero = eta_src.eta_is_zero;
    return m;
}

SolverOptions make_solver_options(const SolverConfig& s) {
    SolverOptions o;
    o.basis.kind = s.basis == "bins" ? BasisKind::Bins : BasisKind::Polynomial;
    o.basis.degree_or_bins = s.degree;
    o.basis.ridge = s.ridge;
    o.z_max = s.z_max;
    o.tol = s.picard_tol;
    o.max_iter = s.max_iter;
    return o;
}

}  // namespace absde
