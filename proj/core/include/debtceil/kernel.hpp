#pragma once

#include <cstddef>
#include <vector>

#include "debtceil/model.hpp"

namespace debtceil {

/// theta(z) = C'(e^z)/kappa + delta - g - rho; dominates the free boundary.
double theta_bound(const ModelParams& p, const CostSpec& cost, double z);

/// G(z,y) = e^z (C'(e^z) + kappa (delta - g - rho - y)); vanishes on y = theta(z).
double stopping_integrand(const ModelParams& p, const CostSpec& cost, double z, double y);

/// Piecewise-linear nondecreasing curve on a z-grid with the boundary's
/// extension rules: left of the grid, the first segment's linear extension
/// clamped into [y_star, f[0]]; right of the grid, f[n-1] + (theta(z) -
/// theta(z_max)) clamped above f[n-1]. An optional single-node override
/// supports implicit per-node solves without copying.
class Curve {
  public:
    Curve(const std::vector<double>& z, const std::vector<double>& f, double y_star,
          const ModelParams& p, const CostSpec& cost);

    Curve with_override(std::size_t node, double value) const;

    double operator()(double v) const;
    /// v must be ascending; out[i] = f(v[i]). O(n + grid).
    void eval_ascending(const double* v, double* out, std::size_t n) const;

    double y_star() const { return y_star_; }
    const std::vector<double>& grid() const { return *z_; }

  private:
    double node_value(std::size_t i) const {
        return (i == override_node_) ? override_value_ : (*f_)[i];
    }
    double left_ext(double v) const;
    double right_ext(double v) const;

    const std::vector<double>* z_;
    const std::vector<double>* f_;
    double y_star_;
    const ModelParams* p_;
    const CostSpec* cost_;
    double theta_last_;
    std::size_t override_node_;
    double override_value_;
};

/// Quadrature grid and per-time-node law coefficients for expectations of the
/// form E[int_0^inf e^{-rho t} G(Z_t, Y_t) 1{Y_t > f(Z_t)} dt]. Time uses
/// composite Gauss-Legendre on geometrically growing panels (first panel
/// scaled to the fastest mean-reversion scale present, 1/theta or 1/|y|);
/// space uses Gauss-Hermite after an exponential tilt per growth term.
class KernelGrid {
  public:
    static KernelGrid build(const ModelParams& p, const CostSpec& cost, double t_max, int n_t,
                            int n_v, double y_scale);

    /// E_{(z0,y0)}[int_0^inf e^{-rho t} G(Z_t,Y_t) 1{Y_t > f(Z_t)} dt].
    /// Equals u(z0,y0) - kappa e^{z0} when f is the optimal boundary.
    double corr(double z0, double y0, const Curve& f) const;

    /// One-dimensional analogue with threshold constant in z:
    /// E[int_0^inf e^{-rho t + (delta-g)t - intY} (C'(0) + kappa(delta-g-rho - Y_t))
    ///   1{Y_t > threshold} dt], Y started at y0.
    double corr_1d(double y0, double threshold) const;

    std::size_t n_time_nodes() const { return t_.size(); }
    double t_max() const { return t_.empty() ? 0.0 : t_.back(); }

  private:
    const ModelParams* p_ = nullptr;
    const CostSpec* cost_ = nullptr;
    std::vector<double> t_, w_;
    std::vector<double> E1_, K1_, vY_, vI_, cIY_, sZ_, beta_, s_c_;
    std::vector<double> ghx_, ghw_;  // ghx pre-scaled by sqrt(2)
};

/// Geometric-panel Gauss-Legendre time grid on [0, t_max]; n_t is the
/// approximate total node count, y_scale sets the first panel width.
void make_time_grid(double t_max, int n_t, double theta, double y_scale, std::vector<double>& t,
                    std::vector<double>& w);

}  // namespace debtceil
