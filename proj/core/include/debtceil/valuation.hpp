#pragma once

#include <memory>

#include "debtceil/boundary.hpp"

namespace debtceil {

struct UValue {
    double value = 0.0;
    double error_bracket = 0.0;
    bool bound_violation = false;  // outside [0, kappa e^z] beyond the bracket
};

struct VValue {
    double value = 0.0;
    double error_bracket = 0.0;
};

struct MarginalCheck {
    double fd_derivative = 0.0;
    double u_over_x = 0.0;
    double discrepancy = 0.0;  // relative
};

struct SmoothFitReport {
    double z = 0.0;
    double gap_value = 0.0;       // u(z, yhat(z)) - kappa e^z
    double dy_at_boundary = 0.0;  // one-sided du/dy at (z, yhat(z)+)
    double dz_gap = 0.0;          // u_z(z, yhat(z)) - kappa e^z
};

/// H_yhat(z,y): e^z C'(e^z) above the boundary, -kappa(delta-g-rho-y)e^z on
/// and below it (the boundary itself takes the stopping branch).
double eval_H(const Boundary& b, double z, double y);

/// Batch evaluator holding the quadrature grid for a solved boundary.
/// All members are const; safe for concurrent use.
class Valuator {
  public:
    explicit Valuator(const Boundary& b, double quad_refine = 1.0);

    /// u(z,y) via the representation u = kappa e^z + E[int e^{-rho t} G 1{Y>yhat(Z)}].
    UValue u(double z, double y) const;

    /// v(x,y) = int_{-inf}^{ln x} u(q,y) dq, lower tail bounded by kappa e^q.
    VValue v(double x, double y) const;

    /// One-dimensional stopping value w(y); -kappa when C'(0) = 0.
    double w1d(double y) const;

    MarginalCheck marginal_value_check(double x, double y) const;

    /// Relative gap |e^{-z}(u - kappa e^z) - w(y)| / max(|w(y)|, 1e-12).
    double deep_debt_limit_check(double z_probe, double y) const;

    SmoothFitReport smooth_fit_diagnostic(double z, double fd_step = 1e-3) const;

    const Boundary& boundary() const { return *b_; }

  private:
    double local_sag_rel(double z) const;

    const Boundary* b_;
    Curve curve_;
    KernelGrid grid_;
    double u_tol_rel_;  // conservative relative quadrature bracket for u
};

/// One-shot conveniences.
UValue eval_u(const Boundary& b, double z, double y);
VValue eval_v(const Boundary& b, double x, double y);
double eval_w1d(const Boundary& b, double y);
MarginalCheck marginal_value_check(const Boundary& b, double x, double y);
double deep_debt_limit_check(const Boundary& b, double z_probe, double y);
SmoothFitReport smooth_fit_diagnostic(const Boundary& b, double z, double fd_step = 1e-3);

}  // namespace debtceil
