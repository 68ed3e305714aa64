#include "debtceil/valuation.hpp"

#include <cmath>
#include <stdexcept>

#include "debtceil/math.hpp"

namespace debtceil {

double eval_H(const Boundary& b, double z, double y) {
    const double ez = std::exp(z);
    if (y > eval_yhat(b, z)) return ez * b.cost.deriv(ez);
    return -b.params.kappa * (b.params.delta - b.params.g - b.params.rho - y) * ez;
}

Valuator::Valuator(const Boundary& b, double quad_refine)
    : b_(&b), curve_(b.curve()) {
    if (!b.converged)
        throw std::invalid_argument("Valuator: boundary did not converge; refusing to evaluate");
    const double y_scale = std::max({1.0, std::fabs(b.theta_curve.front()),
                                     std::fabs(b.theta_curve.back())});
    const int n_t = std::max(32, static_cast<int>(b.settings.n_t * quad_refine));
    const int n_v = std::max(16, static_cast<int>(b.settings.n_v * quad_refine));
    grid_ = KernelGrid::build(b.params, b.cost, b.t_max_used, n_t, n_v, y_scale);
    // conservative: dominated by the piecewise-linear curve's kink error in the
    // Gauss-Hermite stage near the boundary knee; anchored to the solve's own
    // residual certificate so coarse grids report coarser brackets
    u_tol_rel_ = std::max(2e-4, 5.0 * b.residual_rel_max) / (quad_refine * quad_refine);
}

double Valuator::local_sag_rel(double z) const {
    // between nodes the piecewise-linear chord overshoots the convex ramp by
    // ~ f'' dz^2 / 8; the induced value error scales with the overshoot
    // relative to the local boundary magnitude
    const auto& zg = b_->z_grid;
    const auto& f = b_->yhat;
    if (z <= zg.front() || z >= zg.back()) return 0.0;
    std::size_t i = static_cast<std::size_t>((z - zg.front()) / (zg[1] - zg[0]));
    i = std::min(std::max<std::size_t>(i, 1), f.size() - 2);
    const double sag = std::fabs(f[i + 1] - 2.0 * f[i] + f[i - 1]) / 8.0;
    return sag / (1.0 + std::fabs(f[i]));
}

UValue Valuator::u(double z, double y) const {
    const double kez = b_->params.kappa * std::exp(z);
    UValue out;
    out.value = kez + grid_.corr(z, y, curve_);
    out.error_bracket = (u_tol_rel_ + 10.0 * local_sag_rel(z)) * kez;
    out.bound_violation =
        (out.value > kez + out.error_bracket) || (out.value < -out.error_bracket);
    return out;
}

VValue Valuator::v(double x, double y) const {
    if (!(x > 0.0)) throw std::invalid_argument("eval_v: x must be > 0");
    const double lnx = std::log(x);
    // panels sit on an absolute lattice so neighbouring x share every full
    // panel; finite differences of v then see only the smooth top sliver
    const double w = 1.25;
    const double base = std::floor(lnx / w) * w;
    const double q_cut = base - 30.0;  // kappa e^{q_cut} <~ 1e-13 kappa x
    const int n_panels = 24, per_panel = 8;
    static const QuadRule gl = gauss_legendre(per_panel);
    double acc = 0.0;
    auto add_panel = [&](double lo, double hi) {
        for (int i = 0; i < per_panel; ++i) {
            const double q = 0.5 * (hi - lo) * gl.nodes[i] + 0.5 * (hi + lo);
            acc += 0.5 * (hi - lo) * gl.weights[i] * u(q, y).value;
        }
    };
    for (int kpanel = 0; kpanel < n_panels; ++kpanel)
        add_panel(q_cut + w * kpanel, q_cut + w * (kpanel + 1));
    if (lnx > base) add_panel(base, lnx);
    const double tail = b_->params.kappa * std::exp(q_cut);  // 0 <= int_{-inf}^{q_cut} u <= tail
    VValue out;
    out.value = acc + 0.5 * tail;
    out.error_bracket = 0.5 * tail +
                        (u_tol_rel_ + 10.0 * local_sag_rel(lnx)) * b_->params.kappa * x;
    return out;
}

double Valuator::w1d(double y) const {
    if (b_->cost.m == 0.0) return -b_->params.kappa;
    return grid_.corr_1d(y, b_->y_star);
}

MarginalCheck Valuator::marginal_value_check(double x, double y) const {
    if (!(x > 0.0)) throw std::invalid_argument("marginal_value_check: x must be > 0");
    const double h = 1e-4 * std::max(1.0, std::fabs(x));
    MarginalCheck mc;
    mc.fd_derivative = (v(x + h, y).value - v(x - h, y).value) / (2.0 * h);
    mc.u_over_x = u(std::log(x), y).value / x;
    mc.discrepancy = std::fabs(mc.fd_derivative - mc.u_over_x) /
                     std::max(std::fabs(mc.u_over_x), 1e-12);
    return mc;
}

double Valuator::deep_debt_limit_check(double z_probe, double y) const {
    const double scaled_gap = std::exp(-z_probe) * grid_.corr(z_probe, y, curve_);
    const double w = w1d(y);
    return std::fabs(scaled_gap - w) / std::max(std::fabs(w), 1e-12);
}

SmoothFitReport Valuator::smooth_fit_diagnostic(double z, double fd_step) const {
    SmoothFitReport r;
    r.z = z;
    const double yb = curve_(z);
    const double kez = b_->params.kappa * std::exp(z);
    r.gap_value = u(z, yb).value - kez;
    r.dy_at_boundary = (u(z, yb + fd_step).value - u(z, yb).value) / fd_step;
    const double hz = 1e-4 * std::max(1.0, std::fabs(z));
    r.dz_gap = (u(z + hz, yb).value - u(z - hz, yb).value) / (2.0 * hz) - kez;
    return r;
}

UValue eval_u(const Boundary& b, double z, double y) { return Valuator(b).u(z, y); }
VValue eval_v(const Boundary& b, double x, double y) { return Valuator(b).v(x, y); }
double eval_w1d(const Boundary& b, double y) { return Valuator(b).w1d(y); }
MarginalCheck marginal_value_check(const Boundary& b, double x, double y) {
    return Valuator(b).marginal_value_check(x, y);
}
double deep_debt_limit_check(const Boundary& b, double z_probe, double y) {
    return Valuator(b).deep_debt_limit_check(z_probe, y);
}
SmoothFitReport smooth_fit_diagnostic(const Boundary& b, double z, double fd_step) {
    return Valuator(b).smooth_fit_diagnostic(z, fd_step);
}

}  // namespace debtceil
