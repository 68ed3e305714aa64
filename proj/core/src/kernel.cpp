#include "debtceil/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "debtceil/math.hpp"

namespace debtceil {

namespace {
constexpr double kLogTiny = -700.0;   // e^{-700} ~ 1e-304
constexpr double kArgClamp = 39.0;    // erfc underflows past ~38.6

inline double phibar_c(double x) {
    return 0.5 * std::erfc(std::clamp(x, -kArgClamp, kArgClamp) * M_SQRT1_2);
}
inline double phi_c(double x) {
    const double y = std::clamp(x, -kArgClamp, kArgClamp);
    return 0.39894228040143267794 * std::exp(-0.5 * y * y);
}
}  // namespace

double theta_bound(const ModelParams& p, const CostSpec& cost, double z) {
    const double ez = std::exp(std::min(z, 690.0 / std::max(cost.gamma - 1.0, 1.0)));
    return cost.deriv(ez) / p.kappa + p.delta - p.g - p.rho;
}

double stopping_integrand(const ModelParams& p, const CostSpec& cost, double z, double y) {
    const double ez = std::exp(z);
    return ez * (cost.deriv(ez) + p.kappa * (p.delta - p.g - p.rho - y));
}

Curve::Curve(const std::vector<double>& z, const std::vector<double>& f, double y_star,
             const ModelParams& p, const CostSpec& cost)
    : z_(&z),
      f_(&f),
      y_star_(y_star),
      p_(&p),
      cost_(&cost),
      theta_last_(theta_bound(p, cost, z.back())),
      override_node_(static_cast<std::size_t>(-1)),
      override_value_(0.0) {
    if (z.size() != f.size() || z.size() < 2)
        throw std::invalid_argument("Curve: grid and values must match, size >= 2");
}

Curve Curve::with_override(std::size_t node, double value) const {
    Curve c = *this;
    c.override_node_ = node;
    c.override_value_ = value;
    return c;
}

double Curve::left_ext(double v) const {
    const double f0 = node_value(0), f1 = node_value(1);
    const double slope = (f1 - f0) / ((*z_)[1] - (*z_)[0]);
    const double ext = std::min(f0 + slope * (v - (*z_)[0]), f0);
    return std::isfinite(y_star_) ? std::max(ext, y_star_) : ext;
}

double Curve::right_ext(double v) const {
    const std::size_t n = z_->size();
    const double fn = node_value(n - 1);
    return std::max(fn + (theta_bound(*p_, *cost_, v) - theta_last_), fn);
}

double Curve::operator()(double v) const {
    const auto& z = *z_;
    if (v <= z.front()) return (v == z.front()) ? node_value(0) : left_ext(v);
    if (v >= z.back()) return (v == z.back()) ? node_value(z.size() - 1) : right_ext(v);
    const auto it = std::upper_bound(z.begin(), z.end(), v);
    const std::size_t j = static_cast<std::size_t>(it - z.begin()) - 1;
    const double w = (v - z[j]) / (z[j + 1] - z[j]);
    return node_value(j) + w * (node_value(j + 1) - node_value(j));
}

void Curve::eval_ascending(const double* v, double* out, std::size_t n) const {
    const auto& z = *z_;
    const std::size_t nz = z.size();
    std::size_t j = 0;  // current segment [z[j], z[j+1])
    for (std::size_t i = 0; i < n; ++i) {
        const double x = v[i];
        if (x <= z.front()) {
            out[i] = (x == z.front()) ? node_value(0) : left_ext(x);
            continue;
        }
        if (x >= z.back()) {
            out[i] = (x == z.back()) ? node_value(nz - 1) : right_ext(x);
            continue;
        }
        while (j + 2 < nz && z[j + 1] <= x) ++j;
        const double w = (x - z[j]) / (z[j + 1] - z[j]);
        out[i] = node_value(j) + w * (node_value(j + 1) - node_value(j));
    }
}

void make_time_grid(double t_max, int n_t, double theta, double y_scale, std::vector<double>& t,
                    std::vector<double>& w) {
    if (!(t_max > 0.0)) throw std::invalid_argument("make_time_grid: t_max must be > 0");
    const double t_first = std::min(1e-3 / theta, 1e-3 / std::max(1.0, y_scale));
    const int n_panels =
        std::max(6, static_cast<int>(std::ceil(std::log2(t_max / t_first))));
    const int per_panel = std::clamp(n_t / n_panels, 4, 24);
    const QuadRule gl = gauss_legendre(per_panel);
    t.clear();
    w.clear();
    double lo = 0.0;
    for (int k = 0; k < n_panels; ++k) {
        const double hi = (k + 1 == n_panels) ? t_max : t_first * std::pow(2.0, k);
        for (int i = 0; i < per_panel; ++i) {
            t.push_back(0.5 * (hi - lo) * gl.nodes[i] + 0.5 * (hi + lo));
            w.push_back(0.5 * (hi - lo) * gl.weights[i]);
        }
        lo = hi;
    }
}

KernelGrid KernelGrid::build(const ModelParams& p, const CostSpec& cost, double t_max, int n_t,
                             int n_v, double y_scale) {
    KernelGrid k;
    k.p_ = &p;
    k.cost_ = &cost;
    make_time_grid(t_max, n_t, p.theta, y_scale, k.t_, k.w_);
    const std::size_t n = k.t_.size();
    k.E1_.resize(n);
    k.K1_.resize(n);
    k.vY_.resize(n);
    k.vI_.resize(n);
    k.cIY_.resize(n);
    k.sZ_.resize(n);
    k.beta_.resize(n);
    k.s_c_.resize(n);
    const double s2 = p.sigma * p.sigma;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = p.theta * k.t_[i];
        const double em1 = std::expm1(-x);
        k.E1_[i] = 1.0 + em1;
        k.K1_[i] = -em1 / p.theta;
        k.vY_[i] = s2 / (2.0 * p.theta) * (-std::expm1(-2.0 * x));
        k.vI_[i] = s2 * ou_var_int_shape(x) / (p.theta * p.theta * p.theta);
        k.cIY_[i] = s2 / (2.0 * p.theta * p.theta) * em1 * em1;
        k.sZ_[i] = std::sqrt(k.vI_[i]);
        k.beta_[i] = -k.cIY_[i] / k.vI_[i];
        k.s_c_[i] = std::sqrt(std::max(k.vY_[i] - k.cIY_[i] * k.cIY_[i] / k.vI_[i], 1e-300));
    }
    const QuadRule gh = gauss_hermite(n_v);
    k.ghx_.resize(n_v);
    k.ghw_.resize(n_v);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    for (int i = 0; i < n_v; ++i) {
        k.ghx_[i] = M_SQRT2 * gh.nodes[i];
        k.ghw_[i] = gh.weights[i] * inv_sqrt_pi;
    }
    return k;
}

double KernelGrid::corr(double z0, double y0, const Curve& f) const {
    const ModelParams& p = *p_;
    const CostSpec& cost = *cost_;
    const double dgr = p.delta - p.g - p.rho;
    const double aot = p.a / p.theta;
    const double dy = y0 - aot;
    const std::size_t nt = t_.size();
    const std::size_t nv = ghx_.size();
    // skip threshold: drop time nodes contributing < ~1e-19 kappa e^{z0}
    const double log_skip = kLogTiny + 0.0;  // exp() underflow guard
    const double scale_skip = std::log(1e-19 * p.kappa) + z0;

    std::vector<double> v(nv), fv(nv);
    double total = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
        const double mZ = z0 + (p.delta - p.g) * t_[k] - (aot * t_[k] + dy * K1_[k]);
        const double mY = aot + dy * E1_[k];
        const double rho_t = p.rho * t_[k];
        const double vZ = vI_[k];
        const double sZ = sZ_[k];
        const double beta = beta_[k];
        const double s_c = s_c_[k];
        double acc = 0.0;
        for (int pb = 0; pb < 2; ++pb) {
            const double pe = pb == 0 ? cost.gamma : 1.0;
            const double pref = pb == 0 ? cost.c * cost.gamma : 1.0;
            const double logfac = pe * mZ + 0.5 * pe * pe * vZ - rho_t;
            if (logfac < log_skip || logfac + std::log(pref) < scale_skip - 20.0) {
                // h is bounded by a moderate polynomial of the state; 20 nats of slack
                continue;
            }
            const double tilt_mean = mZ + pe * vZ;
            for (std::size_t i = 0; i < nv; ++i) v[i] = tilt_mean + sZ * ghx_[i];
            f.eval_ascending(v.data(), fv.data(), nv);
            double inner = 0.0;
            if (pb == 0) {
                for (std::size_t i = 0; i < nv; ++i) {
                    const double mu_c = mY + beta * (v[i] - mZ);
                    inner += ghw_[i] * phibar_c((fv[i] - mu_c) / s_c);
                }
            } else {
                for (std::size_t i = 0; i < nv; ++i) {
                    const double mu_c = mY + beta * (v[i] - mZ);
                    const double alpha = (fv[i] - mu_c) / s_c;
                    inner += ghw_[i] * ((cost.m + p.kappa * (dgr - mu_c)) * phibar_c(alpha) -
                                        p.kappa * s_c * phi_c(alpha));
                }
            }
            acc += pref * std::exp(logfac) * inner;
        }
        total += w_[k] * acc;
    }
    return total;
}

double KernelGrid::corr_1d(double y0, double threshold) const {
    const ModelParams& p = *p_;
    const CostSpec& cost = *cost_;
    const double dgr = p.delta - p.g - p.rho;
    const double aot = p.a / p.theta;
    const double dy = y0 - aot;
    double total = 0.0;
    for (std::size_t k = 0; k < t_.size(); ++k) {
        const double mI = aot * t_[k] + dy * K1_[k];
        const double mY = aot + dy * E1_[k];
        // exponential tilt by e^{-intY}: Y-mean shifts down by cov(intY, Y)
        const double le = (p.delta - p.g) * t_[k] - mI + 0.5 * vI_[k] - p.rho * t_[k];
        if (le < kLogTiny) continue;
        const double mu_t = mY - cIY_[k];
        const double s = std::sqrt(vY_[k]);
        const double alpha = (threshold - mu_t) / std::max(s, 1e-300);
        const double val = (cost.m + p.kappa * (dgr - mu_t)) * phibar_c(alpha) -
                           p.kappa * s * phi_c(alpha);
        total += w_[k] * std::exp(le) * val;
    }
    return total;
}

}  // namespace debtceil
