#include "absde/model.hpp"

#include "absde/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <utility>

namespace absde {
namespace {

using Field = std::optional<double> GrowthParams::*;

constexpr std::array<std::pair<std::string_view, Field>, 14> kFields{{
    {"gamma", &GrowthParams::gamma},
    {"lambda", &GrowthParams::lambda},
    {"lambda0", &GrowthParams::lambda0},
    {"sigma", &GrowthParams::sigma},
    {"sigma0", &GrowthParams::sigma0},
    {"alpha", &GrowthParams::alpha},
    {"M1", &GrowthParams::M1},
    {"M2", &GrowthParams::M2},
    {"M3", &GrowthParams::M3},
    {"M4", &GrowthParams::M4},
    {"C", &GrowthParams::C},
    {"L", &GrowthParams::L},
    {"rho", &GrowthParams::rho_slope},
    {"rho0", &GrowthParams::rho0_slope},
}};

Field field_of(std::string_view name) {
    for (const auto& [key, f] : kFields)
        if (key == name) return f;
    throw Error(ErrorCode::InvalidArgument, "unknown growth constant '" + std::string(name) + "'");
}

}  // namespace

std::string_view assumption_key(AssumptionClass c) {
    switch (c) {
    case AssumptionClass::LocalQuadratic: return "3.1";
    case AssumptionClass::GlobalLinearGrowth: return "4.1";
    case AssumptionClass::GlobalOneSided: return "4.2";
    case AssumptionClass::UnboundedLipschitz: return "5.1";
    case AssumptionClass::UnboundedSplit: return "5.3";
    }
    return "?";
}

std::optional<AssumptionClass> assumption_from_key(std::string_view key) {
    for (auto c : {AssumptionClass::LocalQuadratic, AssumptionClass::GlobalLinearGrowth, AssumptionClass::GlobalOneSided,
                   AssumptionClass::UnboundedLipschitz, AssumptionClass::UnboundedSplit})
        if (assumption_key(c) == key) return c;
    return std::nullopt;
}

std::string_view assumption_title(AssumptionClass c) {
    switch (c) {
    case AssumptionClass::LocalQuadratic: return "diagonally quadratic growth (local)";
    case AssumptionClass::GlobalLinearGrowth: return "linear growth in (y, phi), quadratic own row";
    case AssumptionClass::GlobalOneSided: return "one-sided growth with anticipated Z";
    case AssumptionClass::UnboundedLipschitz: return "Lipschitz in (y, phi), convex or concave in z";
    case AssumptionClass::UnboundedSplit: return "split generator f(t, z) + g";
    }
    return "?";
}

double GrowthParams::rho(double x) const {
    if (rho_fn) return rho_fn(x);
    return require("rho") * x;
}

double GrowthParams::rho0(double x) const {
    if (rho0_fn) return rho0_fn(x);
    return require("rho0") * x;
}

double GrowthParams::require(std::string_view name) const {
    const auto& v = this->*field_of(name);
    if (!v) throw Error(ErrorCode::MissingParams, "growth constant '" + std::string(name) + "' is not set");
    return *v;
}

double GrowthParams::value_or(std::string_view name, double fallback) const {
    return (this->*field_of(name)).value_or(fallback);
}

bool GrowthParams::has(std::string_view name) const { return (this->*field_of(name)).has_value(); }

void GrowthParams::set(std::string_view name, double value) { this->*field_of(name) = value; }

const std::vector<std::string>& GrowthParams::names() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const auto& [key, f] : kFields) v.emplace_back(key);
        return v;
    }();
    return all;
}

TerminalData terminal_builtin(std::string_view name, std::size_t n, std::size_t d) {
    TerminalData td;
    td.xi_label = std::string(name);
    td.eta_label = "zero";
    td.eta = [n, d](double, const double*, double* out) { std::fill(out, out + n * d, 0.0); };
    if (name == "zero") {
        td.xi = [n](double, const double*, double* out) { std::fill(out, out + n, 0.0); };
    } else if (name == "brownian") {
        td.xi = [n, d](double, const double* w, double* out) {
            for (std::size_t i = 0; i < n; ++i) out[i] = w[i % d];
        };
    } else if (name == "clipped_brownian") {
        td.xi = [n, d](double, const double* w, double* out) {
            for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(w[i % d], -1.0, 1.0);
        };
    } else {
        throw Error(ErrorCode::UnknownBuiltin, "unknown terminal builtin '" + std::string(name) + "'");
    }
    return td;
}

namespace {

/// Evaluates compiled expressions of (t, w) into consecutive outputs.
std::function<void(double, const double*, double*)> compile_terminal(const std::vector<std::string>& sources,
                                                                     std::size_t n, std::size_t d) {
    const VariableLayout layout{n, d};
    auto exprs = std::make_shared<std::vector<Expression>>();
    for (const auto& s : sources) exprs->push_back(compile_expression(s, layout));
    return [exprs, layout](double t, const double* w, double* out) {
        std::array<double, 64> small{};
        std::vector<double> big;
        double* slots = small.data();
        if (layout.size() > small.size()) {
            big.assign(layout.size(), 0.0);
            slots = big.data();
        }
        slots[layout.t()] = t;
        for (std::size_t j = 0; j < layout.d; ++j) slots[layout.w(j)] = w[j];
        const std::span<const double> view(slots, layout.size());
        for (std::size_t i = 0; i < exprs->size(); ++i) out[i] = (*exprs)[i].evaluate(view);
    };
}

std::string joined(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i];
    return s;
}

bool is_zero_literal(const std::string& s) {
    return s.find_first_not_of(" 0.") == std::string::npos && s.find('0') != std::string::npos;
}

}  // namespace

TerminalData terminal_from_expressions(const std::vector<std::string>& xi, const std::vector<std::string>& eta,
                                       std::size_t n, std::size_t d) {
    if (xi.size() != n) throw Error(ErrorCode::InvalidArgument, "xi needs one expression per component");
    if (!eta.empty() && eta.size() != n * d) throw Error(ErrorCode::InvalidArgument, "eta needs n*d expressions");
    TerminalData td;
    td.xi = compile_terminal(xi, n, d);
    td.xi_label = joined(xi);
    if (eta.empty()) {
        td.eta = [n, d](double, const double*, double* out) { std::fill(out, out + n * d, 0.0); };
    } else {
        td.eta = compile_terminal(eta, n, d);
        td.eta_label = joined(eta);
        td.eta_is_zero = std::all_of(eta.begin(), eta.end(), is_zero_literal);
    }
    return td;
}

GeneratorSpec generator_from_expressions(GrowthParams params, const std::vector<std::string>& driver,
                                         const std::vector<std::string>& split_g) {
    const std::size_t n = params.n, d = params.d;
    if (driver.size() != n) throw Error(ErrorCode::InvalidArgument, "driver needs one expression per component");
    if (!split_g.empty() && split_g.size() != n)
        throw Error(ErrorCode::InvalidArgument, "split_g needs one expression per component");
    const VariableLayout layout{n, d};

    auto compile_all = [&](const std::vector<std::string>& src) {
        auto exprs = std::make_shared<std::vector<Expression>>();
        for (const auto& s : src) exprs->push_back(compile_expression(s, layout));
        return exprs;
    };
    auto make_fn = [layout](std::shared_ptr<std::vector<Expression>> exprs) -> DriverFn {
        return [exprs, layout](const DriverPoint& x, double* out) {
            std::array<double, 64> small{};
            std::vector<double> big;
            double* slots = small.data();
            if (layout.size() > small.size()) {
                big.assign(layout.size(), 0.0);
                slots = big.data();
            }
            slots[layout.t()] = x.t;
            for (std::size_t j = 0; j < layout.d; ++j) slots[layout.w(j)] = x.w ? x.w[j] : 0.0;
            for (std::size_t i = 0; i < layout.n; ++i) {
                slots[layout.y(i)] = x.y[i];
                slots[layout.p(i)] = x.phi[i];
                for (std::size_t j = 0; j < layout.d; ++j) {
                    slots[layout.z(i, j)] = x.z[i * layout.d + j];
                    slots[layout.q(i, j)] = x.psi[i * layout.d + j];
                }
            }
            const std::span<const double> view(slots, layout.size());
            for (std::size_t i = 0; i < exprs->size(); ++i) out[i] = (*exprs)[i].evaluate(view);
        };
    };
    auto uses = [&](const std::vector<Expression>& exprs, bool anticipated_z) {
        for (const auto& e : exprs)
            for (std::size_t i = 0; i < n; ++i) {
                if (!anticipated_z && e.uses_slot(layout.p(i))) return true;
                for (std::size_t j = 0; anticipated_z && j < d; ++j)
                    if (e.uses_slot(layout.q(i, j))) return true;
            }
        return false;
    };

    GeneratorSpec spec;
    spec.name = "expression";
    spec.params = std::move(params);
    auto f = compile_all(driver);
    spec.driver = make_fn(f);
    spec.uses_anticipated_y = uses(*f, false);
    spec.uses_anticipated_z = uses(*f, true);
    if (!split_g.empty()) {
        auto g = compile_all(split_g);
        spec.split_g = make_fn(g);
        spec.uses_anticipated_y = spec.uses_anticipated_y || uses(*g, false);
        spec.uses_anticipated_z = spec.uses_anticipated_z || uses(*g, true);
    }
    spec.convexity.assign(n, Convexity::None);
    return spec;
}

}  // namespace absde
