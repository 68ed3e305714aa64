#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "debtceil/kernel.hpp"
#include "debtceil/model.hpp"

namespace debtceil {

struct SolverSettings {
    double z_min = -4.605170185988091;  // ln 0.01
    double z_max = 4.605170185988092;   // ln 100
    int n_z = 81;
    double t_max = 0.0;        // 0 = choose from discount margins
    int n_t = 272;             // approximate total time-quadrature nodes
    int n_v = 128;             // Gauss-Hermite nodes per growth term
    double picard_tol = 1e-8;  // scaled sup-norm stop: |step| / (1 + |yhat|)
    double picard_damping = 0.5;
    int max_iter = 200;
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Solved free boundary yhat on a z-grid with the y* tail and the dominating
/// curve theta. Immutable after the solve; safe to share across threads.
struct Boundary {
    std::vector<double> z_grid;
    std::vector<double> yhat;
    std::vector<double> theta_curve;
    std::vector<double> residual;  // per-node signed residual, finer quadrature
    double y_star = kNegInf;       // finite iff C'(0) > 0
    std::string params_digest;
    double residual_max = 0.0;      // max |residual|
    double residual_rel_max = 0.0;  // max |residual| / (kappa e^z)
    int sweeps = 0;
    bool converged = false;

    ModelParams params;
    CostSpec cost;
    SolverSettings settings;
    double t_max_used = 0.0;

    Curve curve() const { return Curve(z_grid, yhat, y_star, params, cost); }
};

class NonConvergenceError : public std::runtime_error {
  public:
    NonConvergenceError(std::string msg, std::vector<double> iterate, std::vector<double> residuals,
                        int sweeps_done)
        : std::runtime_error(std::move(msg)),
          last_iterate(std::move(iterate)),
          residual_profile(std::move(residuals)),
          sweeps(sweeps_done) {}
    std::vector<double> last_iterate;
    std::vector<double> residual_profile;
    int sweeps = 0;
};

class BracketError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// FNV-1a over the canonical text of (params, cost, settings).
std::string params_digest(const ModelParams& p, const CostSpec& cost, const SolverSettings& s);

/// Left side of the one-dimensional threshold equation at threshold-and-start y.
/// Requires C'(0) > 0.
double ystar_objective(const ModelParams& p, const CostSpec& cost, const KernelGrid& grid,
                       double y);

/// Unique root below delta - g - rho, or -inf when C'(0) = 0. Throws
/// BracketError when no sign change is found below delta - g - rho.
double solve_ystar(const ModelParams& p, const CostSpec& cost, const KernelGrid& grid);

/// Convenience overload building its own quadrature grid.
double solve_ystar(const ModelParams& p, const CostSpec& cost, const SolverSettings& s);

/// Solves the boundary integral equation on the settings grid. Phase 1 is a
/// damped Jacobi sweep of per-node implicit solves from a flat curve below the
/// solution; phase 2 polishes with alternating-direction nonlinear
/// Gauss-Seidel. Every iterate is projected into the admissible class
/// (nondecreasing, <= theta, >= y*). Throws NonConvergenceError at max_iter.
/// `init` overrides the starting curve (values on the settings grid, clamped
/// into the admissible class).
Boundary solve_boundary(const ModelParams& p, const CostSpec& cost, const SolverSettings& s,
                        int max_threads = 0, const std::vector<double>* init = nullptr);

/// Signed residual of the integral equation at z, evaluated on a finer
/// quadrature than the solver's (refine >= 1 scales node counts).
double boundary_residual(const Boundary& b, double z, double refine = 1.5);

/// Monotone piecewise-linear interpolation with the documented extensions.
double eval_yhat(const Boundary& b, double z);

enum class YhatRegion { grid, left_extension, right_extension };
struct YhatValue {
    double value;
    YhatRegion region;
};
YhatValue eval_yhat_ex(const Boundary& b, double z);

struct BValue {
    double value = 0.0;
    bool grid_truncated = false;  // inverted beyond yhat(z_max) via the theta extension
};

/// Debt ceiling b(y) = sup{x > 0 : y > yhat(ln x)}; 0 for y <= y*.
BValue b_of_y(const Boundary& b, double y);

}  // namespace debtceil
