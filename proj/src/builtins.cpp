#include "absde/error.hpp"
#include "absde/model.hpp"

#include <cmath>
#include <set>

namespace absde {
namespace {

double row_sq(const double* z, std::size_t i, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += z[i * d + j] * z[i * d + j];
    return s;
}

double vec_norm(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

struct KnobReader {
    const Knobs& knobs;
    std::string name;
    std::set<std::string> allowed;

    double get(const std::string& key, double fallback) {
        allowed.insert(key);
        auto it = knobs.find(key);
        return it == knobs.end() ? fallback : it->second;
    }
    void finish() const {
        for (const auto& [key, v] : knobs)
            if (!allowed.count(key)) {
                std::string msg = "builtin '" + name + "' has no knob '" + key + "' (knobs:";
                for (const auto& a : allowed) msg += " " + a;
                throw Error(ErrorCode::InvalidArgument, msg + ")");
            }
    }
};

void default_param(GrowthParams& p, std::string_view name, double value) {
    if (!p.has(name)) p.set(name, value);
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"zero",         "constant_drift",       "cole_hopf",
                                                "linear_delay", "diag_quadratic_delay", "split_fg"};
    return names;
}

Model builtin(std::string_view name, GrowthParams params, const Knobs& knobs) {
    KnobReader kr{knobs, std::string(name), {}};
    const std::size_t n = params.n, d = params.d;
    Model m;
    GeneratorSpec& s = m.spec;
    s.name = std::string(name);
    s.convexity.assign(n, Convexity::Convex);
    s.uses_anticipated_y = false;
    s.uses_anticipated_z = false;

    if (name == "zero") {
        s.driver = [n](const DriverPoint&, double* out) { std::fill(out, out + n, 0.0); };
        default_param(params, "M3", 0.0);
        s.claimed = AssumptionClass::GlobalLinearGrowth;
    } else if (name == "constant_drift") {
        const double c = kr.get("c", 1.0);
        s.driver = [n, c](const DriverPoint&, double* out) { std::fill(out, out + n, c); };
        default_param(params, "M3", std::fabs(c) * params.T);
        s.claimed = AssumptionClass::GlobalLinearGrowth;
    } else if (name == "cole_hopf") {
        if (n != 1) throw Error(ErrorCode::InvalidArgument, "cole_hopf is scalar (n = 1)");
        const double gamma = kr.get("gamma", params.value_or("gamma", 1.0));
        params.gamma = gamma;
        s.driver = [gamma, d](const DriverPoint& x, double* out) { out[0] = 0.5 * gamma * row_sq(x.z, 0, d); };
        default_param(params, "M3", 0.0);
        s.claimed = AssumptionClass::GlobalLinearGrowth;
    } else if (name == "linear_delay") {
        const double a = kr.get("a", 0.0);
        const double b = kr.get("b", 1.0);
        s.driver = [n, a, b](const DriverPoint& x, double* out) {
            for (std::size_t i = 0; i < n; ++i) out[i] = a * x.y[i] + b * x.phi[i];
        };
        s.uses_anticipated_y = b != 0.0;
        default_param(params, "sigma", std::fabs(a));
        default_param(params, "sigma0", std::fabs(b));
        default_param(params, "M3", 0.0);
        s.claimed = AssumptionClass::GlobalLinearGrowth;
    } else if (name == "diag_quadratic_delay") {
        const double gamma = kr.get("gamma", params.value_or("gamma", 1.0));
        const double lambda = kr.get("lambda", params.value_or("lambda", 0.0));
        const double alpha = kr.get("alpha", params.value_or("alpha", 0.0));
        const double sigma0 = kr.get("sigma0", params.value_or("sigma0", 0.0));
        params.gamma = gamma;
        params.lambda = lambda;
        params.alpha = alpha;
        params.sigma0 = sigma0;
        s.driver = [n, d, gamma, lambda, alpha, sigma0](const DriverPoint& x, double* out) {
            const double phi = vec_norm(x.phi, n);
            for (std::size_t i = 0; i < n; ++i) {
                double cross = 0.0;
                if (lambda != 0.0)
                    for (std::size_t j = 0; j < n; ++j)
                        if (j != i) cross += std::pow(std::sqrt(row_sq(x.z, j, d)), 1.0 + alpha);
                out[i] = 0.5 * gamma * row_sq(x.z, i, d) + lambda * cross + sigma0 * phi;
            }
        };
        s.uses_anticipated_y = sigma0 != 0.0;
        default_param(params, "sigma", 0.0);
        default_param(params, "lambda0", 0.0);
        default_param(params, "rho", 0.0);
        default_param(params, "rho0", sigma0);
        default_param(params, "M3", 0.0);
        s.claimed = AssumptionClass::LocalQuadratic;
    } else if (name == "split_fg") {
        const double C = kr.get("C", params.value_or("C", 0.25));
        const double gamma = kr.get("gamma", params.value_or("gamma", 1.0));
        params.C = C;
        params.gamma = gamma;
        s.driver = [n, d, gamma](const DriverPoint& x, double* out) {
            for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * gamma * row_sq(x.z, i, d);
        };
        // psi enters through the mean of its own row
        s.split_g = [n, d, C](const DriverPoint& x, double* out) {
            for (std::size_t i = 0; i < n; ++i) {
                double mean = 0.0;
                for (std::size_t j = 0; j < d; ++j) mean += x.psi[i * d + j];
                mean /= static_cast<double>(d);
                out[i] = C * (std::sin(x.y[i]) + x.phi[i] + mean);
            }
        };
        s.uses_anticipated_y = true;
        s.uses_anticipated_z = true;
        default_param(params, "M3", 0.0);
        s.claimed = AssumptionClass::UnboundedSplit;
    } else {
        std::string msg = "unknown builtin '" + std::string(name) + "' (known:";
        for (const auto& b : builtin_names()) msg += " " + b;
        throw Error(ErrorCode::UnknownBuiltin, msg + ")");
    }
    kr.finish();
    default_param(params, "gamma", 1.0);
    default_param(params, "sigma", 0.0);
    default_param(params, "sigma0", 0.0);
    s.params = std::move(params);
    m.terminal = terminal_builtin("zero", n, d);
    return m;
}

}  // namespace absde
