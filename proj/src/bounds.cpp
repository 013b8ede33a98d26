#include "absde/bounds.hpp"

#include "absde/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace absde {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kOverflowLog = 690.7755278982137;  // ln(1e300)

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Sum of (4n)^i for i = 1..m, in log space.
BoundValue geometric(double base, int m) {
    BoundValue s = BoundValue::of(0.0);
    for (int i = 1; i <= m; ++i) s = s + BoundValue::from_log(i * std::log(base));
    return s;
}

/// ((1-alpha)/2) ((1+alpha)/2)^e x^{2/(1-alpha)}
BoundValue young_constant(double alpha, BoundValue x) {
    const double e = (1.0 + alpha) / (1.0 - alpha);
    return BoundValue::of(0.5 * (1.0 - alpha)) * pow(BoundValue::of(0.5 * (1.0 + alpha)), e) *
           pow(x, 2.0 / (1.0 - alpha));
}

}  // namespace

BoundValue BoundValue::of(double v) {
    if (v == 0.0) return {0.0, kNegInf};
    return {v > 0 ? 1.0 : -1.0, std::log(std::fabs(v))};
}

BoundValue BoundValue::from_log(double log_abs, double sign) {
    if (log_abs == kNegInf) return {0.0, kNegInf};
    return {sign, log_abs};
}

double BoundValue::value() const {
    if (sign == 0.0) return 0.0;
    if (log_abs > kOverflowLog) return sign * std::numeric_limits<double>::infinity();
    return sign * std::exp(log_abs);
}

bool BoundValue::overflow() const { return sign != 0.0 && log_abs > kOverflowLog; }

std::string BoundValue::str() const {
    if (!overflow()) return fmt(value());
    return std::string(sign < 0 ? "-" : "") + "exp(" + fmt(log_abs) + ")";
}

BoundValue operator+(BoundValue a, BoundValue b) {
    if (a.sign == 0.0) return b;
    if (b.sign == 0.0) return a;
    if (a.log_abs < b.log_abs) std::swap(a, b);
    if (std::isinf(a.log_abs)) return a;
    const double r = std::exp(b.log_abs - a.log_abs);
    if (a.sign == b.sign) return {a.sign, a.log_abs + std::log1p(r)};
    if (r == 1.0) return {0.0, kNegInf};
    return {a.sign, a.log_abs + std::log1p(-r)};
}

BoundValue operator*(BoundValue a, BoundValue b) {
    if (a.sign == 0.0 || b.sign == 0.0) return {0.0, kNegInf};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
}

BoundValue operator/(BoundValue a, BoundValue b) {
    if (b.sign == 0.0) throw Error(ErrorCode::InvalidArgument, "division by zero in bound arithmetic");
    if (a.sign == 0.0) return a;
    return {a.sign * b.sign, a.log_abs - b.log_abs};
}

BoundValue pow(BoundValue a, double p) {
    if (p == 0.0) return BoundValue::of(1.0);
    if (a.sign == 0.0) return a;
    if (a.sign < 0.0) throw Error(ErrorCode::InvalidArgument, "fractional power of a negative bound");
    return {1.0, p * a.log_abs};
}

double R_of_q(double q) {
    if (!(q > 1.0)) throw Error(ErrorCode::InvalidArgument, "R(q) needs q > 1");
    return std::pow(q / (q - 1.0), 2.0 * q);
}

double kappa0_limit(const GrowthParams& p) {
    const double n = static_cast<double>(p.n);
    const double gamma = p.require("gamma"), lambda0 = p.require("lambda0"), L = p.require("L");
    const double s = p.require("sigma") + p.require("sigma0");
    if (lambda0 == 0.0) return std::numeric_limits<double>::infinity();
    const double eps0 = std::min(gamma / (16.0 * n * (18.0 * p.T * lambda0 * lambda0 * L * L + 1.0)),
                                 gamma / (24.0 * (2.0 + s * p.T)));
    return eps0 / (8.0 * n * n * n * lambda0 * lambda0 * gamma * L * L);
}

LocalConstants local_constants(const GrowthParams& p) {
    const double n = static_cast<double>(p.n);
    const double gamma = p.require("gamma"), lambda = p.require("lambda"), lambda0 = p.require("lambda0");
    const double alpha = p.require("alpha"), M1 = p.require("M1"), M2 = p.require("M2"), M3 = p.require("M3");
    const double L = p.require("L"), T = p.T;
    if (!(gamma > 0.0) || !(alpha >= 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidArgument, "need gamma > 0 and alpha in [0, 1)");

    LocalConstants c;
    c.K1 = (2.0 * n / gamma) * std::log(3.0) + 2.0 * (n + 1.0) * M1 + 2.0 * n * M3;
    const BoundValue tail = BoundValue::from_log(std::log(2.0 * n / (gamma * gamma)) + 2.0 * gamma * M1) +
                            BoundValue::from_log(std::log(n / (gamma * gamma)) + 2.0 * gamma * c.K1);
    c.K2 = tail + BoundValue::of(6.0 * M2);
    c.K2_proof = tail + BoundValue::of(4.0 * M2);

    const double rho_sum = p.rho(c.K1) + p.rho0(c.K1);
    c.D = BoundValue::of(2.0 * T) * pow(BoundValue::of(2.0 + rho_sum), 2.0) +
          BoundValue::of(2.0) * pow(BoundValue::of(1.0 + n * lambda + (lambda0 + 1.0) * L), 2.0) * c.K2;

    const double e = (1.0 + alpha) / (1.0 - alpha);
    const BoundValue Dpow = pow(c.D, e);
    const BoundValue shared = pow(BoundValue::of(1.0 + alpha), e) * Dpow;
    c.x1 = BoundValue::of(0.5 * c.K1) /
           (BoundValue::of(0.5 * n * (1.0 - alpha)) * pow(BoundValue::of(gamma), 2.0 / (1.0 - alpha)) * shared);
    c.x2 = (BoundValue::from_log(2.0 * std::log(gamma) - 2.0 * gamma * c.K1 - std::log(2.0 * n)) * c.K2) /
           (BoundValue::of(0.5 * (1.0 - alpha)) * pow(BoundValue::of(2.0 * gamma), 2.0 / (1.0 - alpha)) * shared);
    c.x0 = c.x1.log_abs <= c.x2.log_abs ? c.x1 : c.x2;
    c.epsilon = c.x0;
    return c;
}

GlobalConstants global_constants(const GrowthParams& p, double q, std::optional<double> kappa) {
    const double n = static_cast<double>(p.n);
    const double gamma = p.require("gamma"), lambda = p.require("lambda"), lambda0 = p.require("lambda0");
    const double sigma = p.require("sigma"), sigma0 = p.require("sigma0"), alpha = p.require("alpha");
    const double M1 = p.require("M1"), M2 = p.require("M2"), M3 = p.require("M3"), L = p.require("L");
    const double T = p.T;
    const double s = sigma + sigma0;
    if (!(gamma > 0.0) || !(alpha >= 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidArgument, "need gamma > 0 and alpha in [0, 1)");

    GlobalConstants g;
    g.q = q;
    g.Rq = R_of_q(q);

    g.Q1_terms = static_cast<int>(std::floor(2.0 * n * s * T)) + 1;
    g.Q1_general = pow(BoundValue::of(4.0 * n), g.Q1_terms) * BoundValue::of(M1) +
                   geometric(4.0 * n, g.Q1_terms) * BoundValue::of(M3);
    g.Q1 = s == 0.0 ? BoundValue::of(2.0 * n * (M1 + M3)) : g.Q1_general;

    const double gm = gamma * std::fabs(M1);
    // Phi(M1) = (e^{gamma|M1|} - gamma|M1| - 1) / gamma^2
    const BoundValue phi = gm > 50.0
                               ? BoundValue::from_log(gm + std::log1p(-(gm + 1.0) * std::exp(-gm)) - 2.0 * std::log(gamma))
                               : BoundValue::of((std::expm1(gm) - gm) / (gamma * gamma));
    const BoundValue dphi = gm > 50.0 ? BoundValue::from_log(gm + std::log1p(-std::exp(-gm)) - std::log(gamma))
                                      : BoundValue::of(std::expm1(gm) / gamma);
    g.Q2 = BoundValue::of(2.0 * n) * phi + BoundValue::of(M2) +
           BoundValue::of(2.0 * n) * dphi * (BoundValue::of(M3 * T) + BoundValue::of(s * T) * g.Q1);

    g.epsilon0 = std::min(gamma / (16.0 * n * (18.0 * T * lambda0 * lambda0 * L * L + 1.0)),
                          gamma / (24.0 * (2.0 + s * T)));
    const double k = kappa.value_or(T);
    g.m0 = std::max(1, static_cast<int>(std::ceil(2.0 * n * s * k)));

    g.C1 = young_constant(alpha, BoundValue::of(6.0 * lambda));
    g.C2 = young_constant(alpha, BoundValue::of(8.0 * n * n * lambda / g.epsilon0));

    const double M4 = p.require("M4");
    const double log_arg = 3888.0 * std::pow(M4, 4) / gamma;
    g.negative_log = log_arg < 1.0;
    g.M5 = BoundValue::of(std::log(log_arg) / n) + BoundValue::of(M3) +
           BoundValue::of(12.0 * g.epsilon0 * M3 / (n * gamma)) +
           BoundValue::of(4.0 * T / (n * gamma)) * g.C1 + BoundValue::of(T / (n * gamma)) * g.C2;

    g.Q3_terms = static_cast<int>(std::floor(4.0 * n * s * T)) + 1;
    g.Q3 = pow(BoundValue::of(4.0 * n), g.Q3_terms) * BoundValue::of(M1) + geometric(4.0 * n, g.Q3_terms) * g.M5;

    // exponent 6 eps0 M3 + 2 C1 T + 6 eps0 (2 + sT) Q3, kept finite only when it is representable
    const BoundValue exponent = BoundValue::of(6.0 * g.epsilon0 * M3) + BoundValue::of(2.0 * T) * g.C1 +
                                BoundValue::of(6.0 * g.epsilon0 * (2.0 + s * T)) * g.Q3;
    const double ex = exponent.value();
    g.Q4 = BoundValue::from_log(std::log(144.0 * n * M4 * M4 / (gamma * g.epsilon0)) + ex);

    g.kappa0_max = lambda0 == 0.0 ? std::numeric_limits<double>::infinity()
                                  : g.epsilon0 / (8.0 * n * n * n * lambda0 * lambda0 * gamma * L * L);
    return g;
}

IqEstimate estimate_Iq(const GrowthParams& p, double q, const TerminalData& terminal, const PathEnsemble& ens,
                       double gamma_bar) {
    const double gamma = p.require("gamma");
    const std::size_t n = p.n, d = ens.dimension, M = ens.path_count;
    const auto& grid = ens.grid;
    const double scale = 8.0 * static_cast<double>(n) * q * gamma;

    std::vector<double> expo(M, 0.0), w(d), xi(n);
    for (std::size_t m = 0; m < M; ++m) {
        double peak = 0.0;
        for (std::size_t k = grid.terminal_index; k < grid.node_count; ++k) {
            for (std::size_t j = 0; j < d; ++j) w[j] = ens.states.at(k, j, m);
            terminal.xi(grid.time(k), w.data(), xi.data());
            double s = 0.0;
            for (double v : xi) s += v * v;
            peak = std::max(peak, std::sqrt(s));
        }
        expo[m] = scale * peak;
    }
    const double top = *std::max_element(expo.begin(), expo.end());
    double sum = 0.0, sum_sq = 0.0;
    for (double a : expo) {
        const double v = std::exp(a - top);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(M);
    const double var = std::max(0.0, sum_sq / static_cast<double>(M) - mean * mean) * static_cast<double>(M) /
                       static_cast<double>(M - 1);
    const double base = std::log(R_of_q(2.0 * q)) + top + scale * gamma_bar;

    IqEstimate out;
    out.paths = M;
    out.value = BoundValue::from_log(base + std::log(mean));
    out.std_error = BoundValue::from_log(base + 0.5 * std::log(var / static_cast<double>(M)));
    return out;
}

std::string format_bound_report(const BoundReport& r) {
    std::string out;
    auto line = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    const GrowthParams& p = r.inputs;
    line("n", std::to_string(p.n));
    line("d", std::to_string(p.d));
    line("T", fmt(p.T));
    for (const auto& name : GrowthParams::names())
        if (p.has(name)) line(name, fmt(p.require(name)));
    if (r.local) {
        const auto& c = *r.local;
        line("K1", fmt(c.K1));
        line("K2", c.K2.str());
        line("K2_proof_variant", c.K2_proof.str());
        line("D", c.D.str());
        line("x1", c.x1.str());
        line("x2", c.x2.str());
        line("x0", c.x0.str());
        line("epsilon", c.epsilon.str());
    }
    if (r.global) {
        const auto& g = *r.global;
        line("Q1", g.Q1.str());
        line("Q1_general", g.Q1_general.str());
        line("Q2", g.Q2.str());
        line("epsilon0", fmt(g.epsilon0));
        line("m0", std::to_string(g.m0));
        line("C1", g.C1.str());
        line("C2", g.C2.str());
        line("M5", g.M5.str());
        line("M5_negative_log", g.negative_log ? "true" : "false");
        line("Q3", g.Q3.str());
        line("Q4", g.Q4.str());
        line("kappa0_max", std::isinf(g.kappa0_max) ? "inf" : fmt(g.kappa0_max));
        line("q", fmt(g.q));
        line("Rq", fmt(g.Rq));
    }
    if (r.Iq) {
        line("Iq", r.Iq->value.str());
        line("Iq_std_error", r.Iq->std_error.str());
        line("Iq_paths", std::to_string(r.Iq->paths));
    }
    for (const auto& note : r.notes) out += "# " + note + "\n";
    return out;
}

std::string bound_report_csv(const BoundReport& r) {
    std::string out = "# absde-lab v1\nconstant,value\n";
    const std::string text = format_bound_report(r);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string ln = text.substr(pos, end - pos);
        pos = end + 1;
        if (ln.empty() || ln[0] == '#') continue;
        const std::size_t eq = ln.find(" = ");
        out += ln.substr(0, eq) + "," + ln.substr(eq + 3) + "\n";
    }
    return out;
}

}  // namespace absde
