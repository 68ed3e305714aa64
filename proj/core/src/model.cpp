#include "debtceil/model.hpp"

#include <cmath>
#include <stdexcept>

#include "debtceil/math.hpp"

namespace debtceil {

double CostSpec::value(double x) const {
    if (x <= 0.0) return 0.0;
    return c * std::pow(x, gamma) + m * x;
}

double CostSpec::deriv(double x) const {
    if (x <= 0.0) return m;
    if (gamma == 2.0) return 2.0 * c * x + m;
    return c * gamma * std::pow(x, gamma - 1.0) + m;
}

namespace {
bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}
}  // namespace

ValidationReport validate_params(const ModelParams& p, const CostSpec& cost) {
    if (!all_finite({p.delta, p.g, p.a, p.theta, p.sigma, p.rho, p.kappa, cost.c, cost.gamma,
                     cost.m}))
        throw std::invalid_argument("validate_params: non-finite input");

    ValidationReport r;
    auto fail = [&r](std::string msg) { r.violations.push_back(std::move(msg)); };

    if (!(p.theta > 0.0)) fail("theta must be > 0");
    if (!(p.sigma > 0.0)) fail("sigma must be > 0");
    if (!(p.kappa > 0.0)) fail("kappa must be > 0");
    if (!(p.rho > 0.0)) fail("rho must be > 0");
    if (!(cost.c > 0.0)) fail("cost.c must be > 0 (strict convexity)");
    if (!(cost.gamma > 1.0)) fail("cost.gamma must be > 1");
    if (!(cost.m >= 0.0)) fail("cost.m must be >= 0");
    if (!r.violations.empty()) {
        r.pass = false;
        return r;
    }

    const double base = p.delta - p.g - p.a / p.theta;
    const double s2t2 = p.sigma * p.sigma / (p.theta * p.theta);
    const double gam = cost.gamma;
    r.rho0_bound = std::max(4.0 * (base + 2.0 * s2t2), 0.0);
    r.gamma_bound = gam * (base + 0.5 * gam * s2t2);
    r.gamma1_bound = 2.0 * (gam - 1.0) * (base + (gam - 1.0) * s2t2);
    r.required = std::max({r.rho0_bound, r.gamma_bound, r.gamma1_bound});
    r.margin = p.rho - r.required;
    if (!(p.rho > r.required)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "rho = %.6g does not exceed required bound %.6g "
                      "(rho0 %.6g, gamma %.6g, 2(gamma-1) %.6g)",
                      p.rho, r.required, r.rho0_bound, r.gamma_bound, r.gamma1_bound);
        fail(buf);
    }
    r.pass = r.violations.empty();
    return r;
}

OuMoments ou_moments(const ModelParams& p, double t, double y0) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("ou_moments: t must be >= 0");
    const double x = p.theta * t;
    const double em1 = std::expm1(-x);           // e^{-x} - 1
    const double k1 = -em1 / p.theta;            // (1 - e^{-theta t})/theta
    const double s2 = p.sigma * p.sigma;
    OuMoments m;
    m.mean_Y = p.a / p.theta + (y0 - p.a / p.theta) * (1.0 + em1);
    m.var_Y = s2 / (2.0 * p.theta) * (-std::expm1(-2.0 * x));
    m.mean_intY = (p.a / p.theta) * t + (y0 - p.a / p.theta) * k1;
    m.var_intY = s2 * ou_var_int_shape(x) / (p.theta * p.theta * p.theta);
    m.cov_intY_Y = s2 / (2.0 * p.theta * p.theta) * em1 * em1;
    return m;
}

GaussianLaw2D zy_law(const ModelParams& p, double t, double z0, double y0) {
    const OuMoments m = ou_moments(p, t, y0);
    GaussianLaw2D law;
    law.t = t;
    law.mean_Z = z0 + (p.delta - p.g) * t - m.mean_intY;
    law.mean_Y = m.mean_Y;
    law.var_Z = m.var_intY;
    law.cov_ZY = -m.cov_intY_Y;
    law.var_Y = m.var_Y;
    return law;
}

double log_transition_density(const GaussianLaw2D& law, double v, double u) {
    if (!(law.t > 0.0)) throw std::domain_error("transition_density: degenerate law (t = 0)");
    const double det = law.det();
    if (!(det > 0.0)) throw std::domain_error("transition_density: singular covariance");
    const double dv = v - law.mean_Z;
    const double du = u - law.mean_Y;
    const double quad =
        (law.var_Y * dv * dv - 2.0 * law.cov_ZY * dv * du + law.var_Z * du * du) / det;
    return -0.5 * quad - 0.5 * std::log(det) - std::log(2.0 * M_PI);
}

double transition_density(const GaussianLaw2D& law, double v, double u) {
    return std::exp(log_transition_density(law, v, u));
}

double discount_drift_moment(const ModelParams& p, double t, double y0, double pexp) {
    if (!(t >= 0.0)) throw std::invalid_argument("discount_drift_moment: t must be >= 0");
    const OuMoments m = ou_moments(p, t, y0);
    return std::exp(pexp * (p.delta - p.g) * t - pexp * m.mean_intY +
                    0.5 * pexp * pexp * m.var_intY);
}

double decay_rate(const ModelParams& p, double pexp) {
    const double base = p.delta - p.g - p.a / p.theta;
    return p.rho - pexp * base - 0.5 * pexp * pexp * p.sigma * p.sigma / (p.theta * p.theta);
}

double auto_t_max(const ModelParams& p, const CostSpec& cost, double eps) {
    const double r1 = decay_rate(p, 1.0);
    const double rg = decay_rate(p, cost.gamma);
    const double rate = std::min(r1, rg);
    if (!(rate > 0.0))
        throw std::domain_error("auto_t_max: nonpositive decay rate; parameters fail Assumption-"
                                "type discount bounds");
    // transient allowance: |y0 - a/theta|/theta enters the exponent at most once
    return (std::log(1.0 / eps) + 10.0) / rate;
}

}  // namespace debtceil
