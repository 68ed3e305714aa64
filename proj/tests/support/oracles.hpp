#pragma once

// Monte Carlo oracles, independent of the production quadrature path:
// expectations of discounted time integrals are estimated with a randomized
// exponential horizon plus one exact Gaussian draw of the state at that
// horizon, so there is no time-discretization bias anywhere.

#include <cmath>
#include <cstdint>

#include "debtceil/kernel.hpp"
#include "debtceil/model.hpp"
#include "debtceil/rng.hpp"

namespace oracle {

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

/// E[int_0^inf e^{-rho t} G(Z_t,Y_t) 1{Y_t > f(Z_t)} dt] from (z0, y0).
inline McEstimate mc_corr(const debtceil::ModelParams& p, const debtceil::CostSpec& cost,
                          double z0, double y0, const debtceil::Curve& f, double lambda,
                          std::size_t n, std::uint64_t seed) {
    const double dgr = p.delta - p.g - p.rho;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = debtceil::philox_words(seed, i, 0);
        const double tau = -std::log(debtceil::u64_to_unit(w[0])) / lambda;
        const auto zz = debtceil::normal_pair(seed, i, 1);
        const debtceil::OuMoments m = debtceil::ou_moments(p, tau, y0);
        const double mean_Z = z0 + (p.delta - p.g) * tau - m.mean_intY;
        const double sd_Z = std::sqrt(m.var_intY);
        const double Z = mean_Z + sd_Z * zz[0];
        const double cov_ZY = -m.cov_intY_Y;
        const double mu_c = m.mean_Y + (m.var_intY > 0.0 ? cov_ZY / m.var_intY * (Z - mean_Z) : 0.0);
        const double s_c =
            std::sqrt(std::max(m.var_Y - (m.var_intY > 0.0 ? cov_ZY * cov_ZY / m.var_intY : 0.0),
                               0.0));
        const double Y = mu_c + s_c * zz[1];
        double val = 0.0;
        if (Y > f(Z)) {
            const double ez = std::exp(Z);
            val = ez * (cost.deriv(ez) + p.kappa * (dgr - Y));
        }
        const double weight = std::exp(-p.rho * tau) / (lambda * std::exp(-lambda * tau));
        val *= weight;
        sum += val;
        sumsq += val * val;
    }
    McEstimate e;
    e.mean = sum / n;
    e.se = std::sqrt((sumsq / n - e.mean * e.mean) / (n - 1.0));
    return e;
}

/// E[int_0^inf e^{-rho t + (delta-g)t - intY} (C'(0) + kappa(dgr - Y_t)) 1{Y_t > thr} dt].
inline McEstimate mc_objective_1d(const debtceil::ModelParams& p, const debtceil::CostSpec& cost,
                                  double y0, double thr, double lambda, std::size_t n,
                                  std::uint64_t seed) {
    const double dgr = p.delta - p.g - p.rho;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = debtceil::philox_words(seed, i, 0);
        const double tau = -std::log(debtceil::u64_to_unit(w[0])) / lambda;
        const auto zz = debtceil::normal_pair(seed, i, 1);
        const debtceil::OuMoments m = debtceil::ou_moments(p, tau, y0);
        const double sd_I = std::sqrt(m.var_intY);
        const double I = m.mean_intY + sd_I * zz[0];
        const double mu_c = m.mean_Y + (m.var_intY > 0.0 ? m.cov_intY_Y / m.var_intY * (I - m.mean_intY) : 0.0);
        const double s_c = std::sqrt(
            std::max(m.var_Y - (m.var_intY > 0.0 ? m.cov_intY_Y * m.cov_intY_Y / m.var_intY : 0.0),
                     0.0));
        const double Y = mu_c + s_c * zz[1];
        double val = 0.0;
        if (Y > thr) val = (cost.m + p.kappa * (dgr - Y)) * std::exp((p.delta - p.g) * tau - I);
        const double weight = std::exp(-p.rho * tau) / (lambda * std::exp(-lambda * tau));
        sum += val * weight;
        sumsq += val * weight * val * weight;
    }
    McEstimate e;
    e.mean = sum / n;
    e.se = std::sqrt((sumsq / n - e.mean * e.mean) / (n - 1.0));
    return e;
}

}  // namespace oracle
