#include "absde/error.hpp"
#include "absde/model.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace absde {
namespace {

struct Point {
    double t = 0.0;
    std::vector<double> w, y, z, phi, psi;

    DriverPoint view() const { return {t, w.data(), y.data(), z.data(), phi.data(), psi.data()}; }
    std::vector<double> flat() const {
        std::vector<double> v{t};
        for (const auto* part : {&w, &y, &z, &phi, &psi}) v.insert(v.end(), part->begin(), part->end());
        return v;
    }
};

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double row_norm(const std::vector<double>& z, std::size_t i, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += z[i * d + j] * z[i * d + j];
    return std::sqrt(s);
}

struct Tracker {
    double worst = std::numeric_limits<double>::infinity();
    bool failed = false;
    std::string check;
    std::vector<double> witness;
    std::size_t component = 0;

    void record(double lhs, double rhs, const char* name, const Point& p, std::size_t i) {
        const double margin = rhs - lhs;
        if (margin < -1e-12 * (1.0 + std::fabs(lhs) + std::fabs(rhs))) failed = true;
        if (margin < worst) {
            worst = margin;
            check = name;
            witness = p.flat();
            component = i;
        }
    }
    void merge(const Tracker& o) {
        failed = failed || o.failed;
        if (o.worst < worst) {
            worst = o.worst;
            check = o.check;
            witness = o.witness;
            component = o.component;
        }
    }
};

class Sampler {
public:
    Sampler(std::uint64_t seed, double radius, double T, std::size_t n, std::size_t d)
        : rng_(seed), u_(-radius, radius), ut_(0.0, T), n_(n), d_(d) {}

    Point draw() {
        Point p;
        p.t = ut_(rng_);
        p.w = vec(d_);
        p.y = vec(n_);
        p.z = vec(n_ * d_);
        p.phi = vec(n_);
        p.psi = vec(n_ * d_);
        return p;
    }
    std::vector<double> vec(std::size_t k) {
        std::vector<double> v(k);
        for (double& x : v) x = u_(rng_);
        return v;
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> u_, ut_;
    std::size_t n_, d_;
};

}  // namespace

ValidationReport validate_growth(const GeneratorSpec& spec, std::size_t samples, double radius, std::uint64_t seed) {
    if (!spec.claimed) throw Error(ErrorCode::InvalidArgument, "generator '" + spec.name + "' claims no assumption class");
    return validate_growth(spec, *spec.claimed, samples, radius, seed);
}

ValidationReport validate_growth(const GeneratorSpec& spec, AssumptionClass cls, std::size_t samples, double radius,
                                 std::uint64_t seed) {
    const GrowthParams& gp = spec.params;
    const std::size_t n = gp.n, d = gp.d;
    if (samples == 0 || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "validation needs samples > 0 and radius > 0");
    const bool split = cls == AssumptionClass::UnboundedSplit;
    if (split && !spec.has_split())
        throw Error(ErrorCode::InvalidArgument, "split class needs a generator with split_g");

    // constants each class reads; missing ones abort before sampling
    const double gamma = gp.require("gamma");
    const double theta = gp.require("M3") / gp.T;
    double sigma = 0, sigma0 = 0, lambda = 0, lambda0 = 0, alpha = 0, C = 0;
    switch (cls) {
    case AssumptionClass::LocalQuadratic:
        lambda = gp.require("lambda");
        lambda0 = gp.require("lambda0");
        alpha = gp.require("alpha");
        if (!gp.rho_fn) gp.require("rho");
        if (!gp.rho0_fn) gp.require("rho0");
        break;
    case AssumptionClass::GlobalLinearGrowth:
        sigma = gp.require("sigma");
        sigma0 = gp.require("sigma0");
        break;
    case AssumptionClass::GlobalOneSided:
        sigma = gp.require("sigma");
        sigma0 = gp.require("sigma0");
        lambda = gp.require("lambda");
        lambda0 = gp.require("lambda0");
        alpha = gp.require("alpha");
        if (lambda0 > 0.0) gp.require("M4");
        break;
    case AssumptionClass::UnboundedLipschitz:
    case AssumptionClass::UnboundedSplit:
        C = gp.require("C");
        break;
    }

    ValidationReport rep;
    rep.assumption = cls;
    rep.samples = samples;
    rep.radius = radius;
    Tracker all;
    std::vector<Tracker> lower(n), upper(n), convex(n), concave(n);
    double probe = 0.0;
    Sampler sampler(seed, radius, gp.T, n, d);
    std::vector<double> f(n), f2(n), f3(n), g(n), g2(n);
    const DriverFn& main_fn = spec.driver;

    for (std::size_t s = 0; s < samples; ++s) {
        Point p = sampler.draw();
        main_fn(p.view(), f.data());
        const double ny = norm(p.y), nz = norm(p.z), nphi = norm(p.phi), npsi = norm(p.psi);

        for (std::size_t i = 0; i < n; ++i) {
            const double own = 0.5 * gamma * std::pow(row_norm(p.z, i, d), 2);
            switch (cls) {
            case AssumptionClass::LocalQuadratic: {
                double cross = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) cross += std::pow(row_norm(p.z, j, d), 1.0 + alpha);
                const double rhs = theta + gp.rho(ny) + lambda * cross + gp.rho0(nphi) +
                                   lambda0 * std::pow(npsi, 1.0 + alpha) + own;
                all.record(std::fabs(f[i]), rhs, "growth |f^i|", p, i);
                break;
            }
            case AssumptionClass::GlobalLinearGrowth:
                all.record(std::fabs(f[i]), theta + sigma * ny + sigma0 * nphi + own, "growth |f^i|", p, i);
                break;
            case AssumptionClass::GlobalOneSided: {
                const double slack = theta + sigma * ny + lambda * std::pow(nz, 1.0 + alpha) + sigma0 * nphi + lambda0 * npsi;
                const double sgn = p.y[i] > 0 ? 1.0 : (p.y[i] < 0 ? -1.0 : 0.0);
                all.record(sgn * f[i], slack + own, "one-sided sgn(y^i) f^i", p, i);
                lower[i].record(own - slack, f[i], "lower branch f^i >= (gamma/2)|z^i|^2 - ...", p, i);
                upper[i].record(f[i], -own + slack, "upper branch f^i <= -(gamma/2)|z^i|^2 + ...", p, i);
                break;
            }
            case AssumptionClass::UnboundedLipschitz:
                all.record(std::fabs(f[i]), theta + C * (ny + nphi) + own, "growth |f^i|", p, i);
                break;
            case AssumptionClass::UnboundedSplit:
                all.record(std::fabs(f[i]), theta + own, "growth |f^i(t,z)|", p, i);
                break;
            }
        }

        if (cls == AssumptionClass::LocalQuadratic) {
            Point q = p;
            const double h = 1e-4 * (1.0 + radius);
            for (auto* part : {&q.y, &q.z, &q.phi, &q.psi})
                for (double& x : *part) x += h * (sampler.vec(1)[0] / radius);
            main_fn(q.view(), f2.data());
            const double dx = diff_norm(p.y, q.y) + diff_norm(p.z, q.z) + diff_norm(p.phi, q.phi) + diff_norm(p.psi, q.psi);
            if (dx > 0.0)
                for (std::size_t i = 0; i < n; ++i) probe = std::max(probe, std::fabs(f[i] - f2[i]) / dx);
        }

        if (cls == AssumptionClass::UnboundedLipschitz || cls == AssumptionClass::UnboundedSplit) {
            // Lipschitz in (y, phi) at fixed (t, z, psi)
            Point q = p;
            q.y = sampler.vec(n);
            q.phi = sampler.vec(n);
            const double dy = diff_norm(p.y, q.y), dphi = diff_norm(p.phi, q.phi);
            if (split) {
                spec.split_g(p.view(), g.data());
                spec.split_g(q.view(), g2.data());
                all.record(norm(g), C * (1.0 + ny + nz * nz + nphi + npsi), "growth |g|", p, 0);
                all.record(diff_norm(g, g2), C * (dy + dphi), "Lipschitz g in (y, phi)", p, 0);
            } else {
                main_fn(q.view(), f2.data());
                for (std::size_t i = 0; i < n; ++i)
                    all.record(std::fabs(f[i] - f2[i]), C * (dy + dphi), "Lipschitz f^i in (y, phi)", p, i);
            }
            // midpoint convexity in z
            Point a = p, mid = p;
            a.z = sampler.vec(n * d);
            for (std::size_t k = 0; k < n * d; ++k) mid.z[k] = 0.5 * (p.z[k] + a.z[k]);
            main_fn(a.view(), f2.data());
            main_fn(mid.view(), f3.data());
            for (std::size_t i = 0; i < n; ++i) {
                const double chord = 0.5 * (f[i] + f2[i]);
                convex[i].record(f3[i], chord, "midpoint convexity in z", mid, i);
                concave[i].record(chord, f3[i], "midpoint concavity in z", mid, i);
            }
        }
    }

    auto pick = [&](std::vector<Tracker>& first, std::vector<Tracker>& second, bool enabled) {
        if (!enabled) return;
        for (std::size_t i = 0; i < n; ++i) {
            const Convexity flag = i < spec.convexity.size() ? spec.convexity[i] : Convexity::None;
            if (flag == Convexity::Convex)
                all.merge(first[i]);
            else if (flag == Convexity::Concave)
                all.merge(second[i]);
            else
                all.merge(first[i].worst >= second[i].worst ? first[i] : second[i]);
        }
    };
    pick(lower, upper, cls == AssumptionClass::GlobalOneSided);
    pick(convex, concave, cls == AssumptionClass::UnboundedLipschitz || cls == AssumptionClass::UnboundedSplit);

    rep.pass = !all.failed;
    rep.worst_margin = all.worst;
    rep.worst_check = all.check;
    rep.worst_component = all.component;
    rep.witness = all.witness;
    if (cls == AssumptionClass::LocalQuadratic) {
        rep.lipschitz_probe = probe;
        rep.notes.push_back("local Lipschitz modulus is probed by finite differences only; not certified");
    }
    rep.notes.push_back("theta replaced by its integral bound M3/T");
    return rep;
}

}  // namespace absde
