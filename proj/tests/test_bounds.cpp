#include "absde/bounds.hpp"
#include "absde/model.hpp"
#include "absde/paths.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace absde;

namespace {

GrowthParams base() {
    GrowthParams p;
    p.n = 1;
    p.d = 1;
    p.T = 1.0;
    for (const auto& name : GrowthParams::names()) p.set(name, 0.0);
    p.gamma = 1.0;
    p.L = 1.0;
    p.M4 = 1.0;
    return p;
}

bool rel_close(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol * std::fabs(b); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("local constants golden values") {
    const GrowthParams p = base();
    const LocalConstants c = local_constants(p);
    CHECK(rel_close(c.K1, 2.0 * std::log(3.0)));
    CHECK(rel_close(c.K2.value(), 83.0));
    CHECK(rel_close(c.K2_proof.value(), 83.0));
    CHECK(rel_close(c.D.value(), 672.0));
    CHECK(rel_close(c.x1.value(), c.K1 / 672.0));
    CHECK(c.epsilon.value() <= std::min(c.x1.value(), c.x2.value()));
    CHECK(c.x0.value() == std::min(c.x1.value(), c.x2.value()));
}

TEST_CASE("x2 solves its defining equation") {
    // alpha = 0: x2 = (gamma^2 K2 e^{-2 gamma K1} / (2n)) / ((1/2) (2 gamma)^2 D)
    const GrowthParams p = base();
    const LocalConstants c = local_constants(p);
    const double expected = (83.0 * std::exp(-2.0 * c.K1) / 2.0) / (0.5 * 4.0 * 672.0);
    CHECK(rel_close(c.x2.value(), expected, 1e-12));
}

TEST_CASE("K2 statement and proof variants differ by 2 M2") {
    GrowthParams p = base();
    p.M2 = 1.5;
    const LocalConstants c = local_constants(p);
    CHECK(rel_close(c.K2.value() - c.K2_proof.value(), 3.0, 1e-12));
}

TEST_CASE("global constants golden values") {
    GrowthParams p = base();
    p.M1 = 1.0;
    p.M3 = 2.0;
    const GlobalConstants g = global_constants(p, 2.0);
    CHECK(g.Q1.value() == 6.0);
    CHECK(rel_close(g.Rq, 16.0));
    CHECK(rel_close(R_of_q(2.0), 16.0));

    GrowthParams e = base();
    e.lambda0 = 1.0;
    e.sigma = 0.5;
    e.sigma0 = 0.5;
    CHECK(rel_close(global_constants(e, 2.0).epsilon0, 1.0 / 304.0));

    GrowthParams z = base();
    z.M2 = 0.75;
    CHECK(rel_close(global_constants(z, 2.0).Q2.value(), 0.75));
}

TEST_CASE("general Q1 formula at sigma + sigma0 = 0 gives 4n(M1 + M3)") {
    GrowthParams p = base();
    p.M1 = 1.0;
    p.M3 = 2.0;
    const GlobalConstants g = global_constants(p, 2.0);
    CHECK(g.Q1_general.value() == doctest::Approx(12.0));
}

TEST_CASE("epsilon0 stays below gamma/48 without linear growth terms") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        GrowthParams p = base();
        p.T = 1.0 + u(rng);
        p.gamma = 0.1 + u(rng);
        p.lambda0 = u(rng);
        p.L = 1.0 + u(rng);
        CHECK(global_constants(p, 2.0).epsilon0 <= *p.gamma / 48.0 * (1.0 + 1e-15));
    }
}

TEST_CASE("Q1 is nondecreasing and epsilon0 nonincreasing in their inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        GrowthParams p = base();
        p.M1 = 2.0 * u(rng);
        p.M3 = 2.0 * u(rng);
        p.sigma = u(rng);
        p.sigma0 = u(rng);
        p.lambda0 = u(rng);
        p.T = 0.5 + u(rng);
        p.L = 1.0 + u(rng);
        const GlobalConstants g0 = global_constants(p, 2.0);
        for (const char* key : {"M1", "M3", "sigma", "sigma0", "T"}) {
            CAPTURE(key);
            GrowthParams q = p;
            if (std::string(key) == "T")
                q.T = p.T + 0.5 * u(rng);
            else
                q.set(key, p.require(key) + 0.5 * u(rng));
            CHECK(global_constants(q, 2.0).Q1.value() >= g0.Q1.value());
        }
        for (const char* key : {"T", "lambda0", "L", "sigma", "sigma0"}) {
            CAPTURE(key);
            GrowthParams q = p;
            if (std::string(key) == "T")
                q.T = p.T + 0.5 * u(rng);
            else
                q.set(key, p.require(key) + 0.5 * u(rng));
            CHECK(global_constants(q, 2.0).epsilon0 <= g0.epsilon0);
        }
        GrowthParams twice = p;
        twice.gamma = 2.0;
        CHECK(rel_close(global_constants(twice, 2.0).epsilon0, 2.0 * g0.epsilon0));
    }
}

TEST_CASE("R(q) exceeds 1 and decreases") {
    double prev = std::numeric_limits<double>::infinity();
    for (double q = 1.05; q < 50.0; q *= 1.1) {
        const double r = R_of_q(q);
        CHECK(r > 1.0);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("overflowing constants stay finite in log space") {
    GrowthParams p = base();
    p.M1 = 50.0;
    p.M3 = 10.0;
    p.sigma = 3.0;
    p.lambda0 = 1.0;
    const GlobalConstants g = global_constants(p, 2.0);
    CHECK(std::isfinite(g.Q4.log_abs));
    CHECK(g.Q4.overflow());
    CHECK(g.Q4.str().rfind("exp(", 0) == 0);
}

TEST_CASE("M5 log term sign is flagged") {
    GrowthParams p = base();
    p.gamma = 4000.0;
    CHECK(global_constants(p, 2.0).negative_log);
    CHECK_FALSE(global_constants(base(), 2.0).negative_log);
}

TEST_CASE("I(q) at zero terminal and constant terminal") {
    const TimeGrid g = build_grid(1.0, 0.5, 4, constant_delay(0.0), constant_delay(0.0));
    const PathEnsemble e = simulate(g, 1000, 1, 1);
    GrowthParams p = base();
    const IqEstimate zero = estimate_Iq(p, 2.0, terminal_builtin("zero", 1, 1), e, 0.0);
    CHECK(rel_close(zero.value.value(), std::pow(4.0 / 3.0, 8.0)));
    CHECK(rel_close(zero.value.value(), 9.98872123151958, 1e-12));

    p.gamma = 0.2;
    const TerminalData c = terminal_from_expressions({"0.3"}, {"0"}, 1, 1);
    const IqEstimate cst = estimate_Iq(p, 2.0, c, e, 0.1);
    CHECK(rel_close(cst.value.value(), R_of_q(4.0) * std::exp(8.0 * 2.0 * 0.2 * 0.4), 1e-12));
}

TEST_CASE("I(q) estimate matches the Gaussian integral oracle") {
    const TimeGrid g = build_grid(1.0, 0.0, 1, constant_delay(0.0), constant_delay(0.0));
    const PathEnsemble e = simulate(g, 200000, 1, 12);
    GrowthParams p = base();
    p.gamma = 0.1;
    const TerminalData xi = terminal_from_expressions({"min(abs(w1), 1)"}, {"0"}, 1, 1);
    const IqEstimate est = estimate_Iq(p, 2.0, xi, e, 0.0);
    // E exp(a min(|W|, 1)) with a = 8 n q gamma = 1.6
    const double a = 1.6;
    const double mean = 2.0 * std::exp(a * a / 2.0) * (normal_cdf(1.0 - a) - normal_cdf(-a)) +
                        2.0 * std::exp(a) * (1.0 - normal_cdf(1.0));
    const double oracle = std::pow(4.0 / 3.0, 8.0) * mean;
    CHECK(std::fabs(est.value.value() - oracle) <= 3.0 * est.std_error.value());
}

TEST_CASE("kappa limit is infinite without anticipated Z growth") {
    GrowthParams p = base();
    CHECK(std::isinf(kappa0_limit(p)));
    p.lambda0 = 1.0;
    p.sigma = 1.0;
    const double eps0 = global_constants(p, 2.0).epsilon0;
    CHECK(rel_close(kappa0_limit(p), eps0 / 8.0));
}

TEST_CASE("report lines") {
    BoundReport r;
    r.inputs = base();
    r.inputs.M1 = 1.0;
    r.inputs.M3 = 2.0;
    r.global = global_constants(r.inputs, 2.0);
    const std::string text = format_bound_report(r);
    CHECK(text.find("Q1 = 6\n") != std::string::npos);
    CHECK(bound_report_csv(r).find("Q1,6\n") != std::string::npos);
}
