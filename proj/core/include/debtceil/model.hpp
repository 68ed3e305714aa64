#pragma once

#include <string>
#include <vector>

namespace debtceil {

/// Model constants. Rates are per year, time is in years.
struct ModelParams {
    double delta = 0.03;   // nominal interest rate
    double g = 0.02;       // GDP growth rate
    double a = 0.01;       // OU drift level; equilibrium inflation is a/theta
    double theta = 0.5;    // mean-reversion speed
    double sigma = 0.05;   // OU volatility
    double rho = 0.05;     // discount rate
    double kappa = 1.0;    // marginal intervention cost

    double equilibrium() const { return a / theta; }
};

/// Holding cost C(x) = c x^gamma + m x on x >= 0, with C'(x) = c gamma x^(gamma-1) + m.
struct CostSpec {
    double c = 0.5;
    double gamma = 2.0;
    double m = 0.0;

    double value(double x) const;
    double deriv(double x) const;
    double deriv0() const { return m; }  // C'(0)
};

struct ValidationReport {
    bool pass = false;
    double rho0_bound = 0.0;    // 4[delta - g - a/theta + 2 sigma^2/theta^2] v 0
    double gamma_bound = 0.0;   // gamma[delta - g - a/theta + gamma sigma^2/(2 theta^2)]
    double gamma1_bound = 0.0;  // 2(gamma-1)[delta - g - a/theta + (gamma-1) sigma^2/theta^2]
    double required = 0.0;      // max of the three
    double margin = 0.0;        // rho - required
    std::vector<std::string> violations;
};

/// Checks positivity constraints and the discount-rate inequalities. Throws
/// std::invalid_argument on non-finite input.
ValidationReport validate_params(const ModelParams& p, const CostSpec& cost);

struct OuMoments {
    double mean_Y = 0.0;
    double var_Y = 0.0;
    double mean_intY = 0.0;
    double var_intY = 0.0;
    double cov_intY_Y = 0.0;
};

/// Exact moments of (Y_t, int_0^t Y ds) for the OU process started at y0.
OuMoments ou_moments(const ModelParams& p, double t, double y0);

/// Joint Gaussian law of (Z_t, Y_t) given (z0, y0), Z_t = z0 + (delta-g)t - int_0^t Y.
struct GaussianLaw2D {
    double t = 0.0;
    double mean_Z = 0.0;
    double mean_Y = 0.0;
    double var_Z = 0.0;
    double cov_ZY = 0.0;
    double var_Y = 0.0;

    double det() const { return var_Z * var_Y - cov_ZY * cov_ZY; }
};

GaussianLaw2D zy_law(const ModelParams& p, double t, double z0, double y0);

/// Bivariate Gaussian density of (Z_t, Y_t) at (v, u). Requires law.t > 0.
double transition_density(const GaussianLaw2D& law, double v, double u);
double log_transition_density(const GaussianLaw2D& law, double v, double u);

/// E[e^{p (Z_t - z0)}] = exp{p(delta-g)t - p E[intY] + p^2 Var[intY]/2}.
double discount_drift_moment(const ModelParams& p, double t, double y0, double pexp);

/// Asymptotic decay rate of e^{-rho t} E[e^{p(Z_t - z0)}]:
/// rho - p(delta - g - a/theta) - p^2 sigma^2 / (2 theta^2).
double decay_rate(const ModelParams& p, double pexp);

/// Truncation horizon: e^{-rho t} E[e^{p(Z_t-z0)}] < eps for p in {1, gamma}
/// beyond it (rate-based, with a transient allowance).
double auto_t_max(const ModelParams& p, const CostSpec& cost, double eps = 1e-12);

}  // namespace debtceil
