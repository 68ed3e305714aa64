#include "debtceil/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "debtceil/math.hpp"

namespace debtceil {

namespace {

void append_val(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g;", v);
    s += buf;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct NodeSolver {
    const KernelGrid* grid;
    const std::vector<double>* zgrid;
    const std::vector<double>* theta;
    double hard_floor;
    double xtol_scale;

    // Implicit update at node i: root in xi of corr evaluated from (z_i, xi)
    // with the curve overridden at node i. Expands the bracket from the
    // current value in the direction the sign indicates.
    double solve(const Curve& base, std::size_t i, double cur, double h0) const {
        const double z = (*zgrid)[i];
        const double th = (*theta)[i];
        auto gi = [&](double xi) { return grid->corr(z, xi, base.with_override(i, xi)); };
        cur = std::min(cur, th);
        const double gcur = gi(cur);
        if (gcur == 0.0) return cur;
        const double xtol = xtol_scale * (1.0 + std::fabs(cur));
        if (gcur > 0.0) {
            double lo = cur, glo = gcur;
            double h = h0 * (1.0 + std::fabs(cur));
            for (int k = 0; k < 64; ++k) {
                const double hi = std::min(lo + h, th);
                const double ghi = gi(hi);
                if (ghi <= 0.0)
                    return brent_root([&](double x) { return gi(x); }, lo, hi, glo, ghi, xtol);
                if (hi >= th) return th;
                lo = hi;
                glo = ghi;
                h *= 2.0;
            }
            return th;
        }
        double hi = cur, ghi = gcur;
        double h = h0 * (1.0 + std::fabs(cur));
        for (int k = 0; k < 64; ++k) {
            const double lo = std::max(hi - h, hard_floor);
            const double glo = gi(lo);
            if (glo >= 0.0)
                return brent_root([&](double x) { return gi(x); }, lo, hi, glo, ghi, xtol);
            if (lo <= hard_floor) return hard_floor;
            hi = lo;
            ghi = glo;
            h *= 2.0;
        }
        return hard_floor;
    }
};

double scaled_sup_step(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::fabs(a[i] - b[i]) / (1.0 + std::fabs(b[i])));
    return d;
}

void project_admissible(std::vector<double>& f, const std::vector<double>& theta, double y_star) {
    isotonic_nondecreasing(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = std::min(f[i], theta[i]);
        if (std::isfinite(y_star)) f[i] = std::max(f[i], y_star);
    }
    isotonic_nondecreasing(f);
}

}  // namespace

std::string params_digest(const ModelParams& p, const CostSpec& cost, const SolverSettings& s) {
    std::string data = "debtceil-boundary-v1;";
    for (double v : {p.delta, p.g, p.a, p.theta, p.sigma, p.rho, p.kappa, cost.c, cost.gamma,
                     cost.m, s.z_min, s.z_max, static_cast<double>(s.n_z), s.t_max,
                     static_cast<double>(s.n_t), static_cast<double>(s.n_v), s.picard_tol,
                     s.picard_damping, static_cast<double>(s.max_iter)})
        append_val(data, v);
    return fnv1a_hex(data);
}

double ystar_objective(const ModelParams&, const CostSpec& cost, const KernelGrid& grid,
                       double y) {
    if (!(cost.m > 0.0))
        throw std::domain_error("ystar_objective: requires C'(0) > 0 (the threshold is -inf "
                                "for C'(0) = 0)");
    return grid.corr_1d(y, y);
}

double solve_ystar(const ModelParams& p, const CostSpec& cost, const KernelGrid& grid) {
    if (cost.m == 0.0) return kNegInf;  // C'(0) = 0: never optimal to stop in finite time
    const double dgr = p.delta - p.g - p.rho;
    const double yhi = dgr - 1e-12;
    const double ghi = ystar_objective(p, cost, grid, yhi);
    if (ghi > 0.0)
        throw BracketError(
            "solve_ystar: objective positive at delta-g-rho; no root below the threshold bound");
    double step = 0.05;
    double ylo = dgr - step;
    double glo = ystar_objective(p, cost, grid, ylo);
    while (glo < 0.0) {
        step *= 2.0;
        ylo -= step;
        if (ylo < dgr - 1e4)
            throw BracketError("solve_ystar: no sign change found while expanding the bracket");
        glo = ystar_objective(p, cost, grid, ylo);
    }
    return brent_root([&](double y) { return ystar_objective(p, cost, grid, y); }, ylo, yhi, glo,
                      ghi, 1e-13);
}

double solve_ystar(const ModelParams& p, const CostSpec& cost, const SolverSettings& s) {
    if (cost.m == 0.0) return kNegInf;
    const double t_max = (s.t_max > 0.0) ? s.t_max : auto_t_max(p, cost);
    const KernelGrid grid = KernelGrid::build(p, cost, t_max, s.n_t, s.n_v, 1.0);
    return solve_ystar(p, cost, grid);
}

Boundary solve_boundary(const ModelParams& p, const CostSpec& cost, const SolverSettings& s,
                        int max_threads, const std::vector<double>* init) {
    if (s.n_z < 2 || !(s.z_max > s.z_min)) throw std::invalid_argument("solve_boundary: bad grid");
    if (!(s.picard_tol > 0.0) || !(s.picard_damping > 0.0) || !(s.picard_damping <= 1.0))
        throw std::invalid_argument("solve_boundary: bad tolerance or damping");
    const ValidationReport vr = validate_params(p, cost);
    if (!vr.pass)
        throw std::invalid_argument("solve_boundary: parameters fail validation: " +
                                    (vr.violations.empty() ? std::string("unknown")
                                                           : vr.violations.front()));

    Boundary b;
    b.params = p;
    b.cost = cost;
    b.settings = s;
    b.params_digest = params_digest(p, cost, s);
    b.z_grid.resize(s.n_z);
    for (int i = 0; i < s.n_z; ++i)
        b.z_grid[i] = s.z_min + (s.z_max - s.z_min) * i / static_cast<double>(s.n_z - 1);
    b.theta_curve.resize(s.n_z);
    for (int i = 0; i < s.n_z; ++i) b.theta_curve[i] = theta_bound(p, cost, b.z_grid[i]);

    const double t_max = (s.t_max > 0.0) ? s.t_max : auto_t_max(p, cost);
    b.t_max_used = t_max;
    const double y_scale = std::max({1.0, std::fabs(b.theta_curve.front()),
                                     std::fabs(b.theta_curve.back())});
    const KernelGrid grid = KernelGrid::build(p, cost, t_max, s.n_t, s.n_v, y_scale);

    b.y_star = solve_ystar(p, cost, grid);

    const double sd_inf = p.sigma / std::sqrt(2.0 * p.theta);
    const double start = std::isfinite(b.y_star) ? b.y_star
                                                 : b.theta_curve.front() - 8.0 * sd_inf - 1.0;
    NodeSolver ns;
    ns.grid = &grid;
    ns.zgrid = &b.z_grid;
    ns.theta = &b.theta_curve;
    ns.hard_floor = std::isfinite(b.y_star) ? b.y_star : start - 64.0;
    ns.xtol_scale = 1e-10;

    std::vector<double> f(s.n_z, start);
    if (init != nullptr) {
        if (init->size() != f.size())
            throw std::invalid_argument("solve_boundary: init size does not match the grid");
        f = *init;
        project_admissible(f, b.theta_curve, b.y_star);
    }
    int sweeps = 0;

    // Phase 1: damped Jacobi sweeps of implicit node solves, from below.
    const double p1_tol = std::max(3e-4, s.picard_tol);
    bool done = false;
    while (sweeps < std::min(s.max_iter, 60)) {
        ++sweeps;
        std::vector<double> fnew(f.size());
        const Curve base(b.z_grid, f, b.y_star, p, cost);
        parallel_for(f.size(), max_threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) fnew[i] = ns.solve(base, i, f[i], 0.05);
        });
        std::vector<double> fnext(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            fnext[i] = f[i] + s.picard_damping * (fnew[i] - f[i]);
        project_admissible(fnext, b.theta_curve, b.y_star);
        const double d = scaled_sup_step(fnext, f);
        f = std::move(fnext);
        if (d < p1_tol) {
            done = (d < s.picard_tol);
            break;
        }
    }

    // Phase 2: alternating-direction nonlinear Gauss-Seidel polish.
    while (!done && sweeps < s.max_iter) {
        ++sweeps;
        const std::vector<double> fold = f;
        const bool forward = (sweeps % 2) == 0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const std::size_t i = forward ? k : f.size() - 1 - k;
            const Curve base(b.z_grid, f, b.y_star, p, cost);
            f[i] = ns.solve(base, i, f[i], 1e-4);
        }
        project_admissible(f, b.theta_curve, b.y_star);
        const double d = scaled_sup_step(f, fold);
        if (d < s.picard_tol) done = true;
    }

    b.yhat = f;
    b.sweeps = sweeps;
    b.converged = done;

    // Residual certificate on a finer quadrature.
    const KernelGrid fine = KernelGrid::build(p, cost, t_max, (s.n_t * 3) / 2, (s.n_v * 3) / 2,
                                              y_scale);
    b.residual.resize(f.size());
    const Curve cur(b.z_grid, b.yhat, b.y_star, p, cost);
    parallel_for(f.size(), max_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) b.residual[i] = fine.corr(b.z_grid[i], f[i], cur);
    });
    for (std::size_t i = 0; i < f.size(); ++i) {
        b.residual_max = std::max(b.residual_max, std::fabs(b.residual[i]));
        b.residual_rel_max = std::max(b.residual_rel_max,
                                      std::fabs(b.residual[i]) / (p.kappa * std::exp(b.z_grid[i])));
    }

    if (!done)
        throw NonConvergenceError("solve_boundary: max_iter reached without convergence",
                                  b.yhat, b.residual, sweeps);
    return b;
}

double boundary_residual(const Boundary& b, double z, double refine) {
    const double y_scale = std::max({1.0, std::fabs(b.theta_curve.front()),
                                     std::fabs(b.theta_curve.back())});
    const int n_t = static_cast<int>(b.settings.n_t * refine);
    const int n_v = static_cast<int>(b.settings.n_v * refine);
    const KernelGrid grid = KernelGrid::build(b.params, b.cost, b.t_max_used, n_t, n_v, y_scale);
    const Curve cur = b.curve();
    return grid.corr(z, cur(z), cur);
}

double eval_yhat(const Boundary& b, double z) { return b.curve()(z); }

YhatValue eval_yhat_ex(const Boundary& b, double z) {
    YhatValue v;
    v.value = b.curve()(z);
    v.region = (z < b.z_grid.front())  ? YhatRegion::left_extension
               : (z > b.z_grid.back()) ? YhatRegion::right_extension
                                       : YhatRegion::grid;
    return v;
}

BValue b_of_y(const Boundary& b, double y) {
    BValue out;
    if (std::isfinite(b.y_star) && y <= b.y_star) return out;  // 0, not truncated
    const auto& z = b.z_grid;
    const auto& f = b.yhat;
    const std::size_t n = f.size();
    if (y > f.back()) {
        // invert the theta-shaped right extension: f_n + theta(z) - theta(z_max) = y
        out.grid_truncated = true;
        const double want = b.cost.m +
                            b.params.kappa * (y - f.back()) +
                            b.cost.deriv(std::exp(z.back())) - b.cost.m;
        // want = C'(e^z); C'(x) = c gamma x^{gamma-1} + m
        const double rhs = want - b.cost.m;
        if (!(rhs > 0.0)) {
            out.value = std::exp(z.back());
            return out;
        }
        const double logx = std::log(rhs / (b.cost.c * b.cost.gamma)) / (b.cost.gamma - 1.0);
        out.value = std::exp(logx);
        return out;
    }
    if (y <= f.front()) {
        // left extension: f0 + slope (z - z0), clamped into [y_star, f0]
        const double slope = (f[1] - f[0]) / (z[1] - z[0]);
        if (!(slope > 0.0) || !(y > (std::isfinite(b.y_star) ? b.y_star : -1e308))) return out;
        if (y == f.front() && slope > 0.0) {
            out.value = std::exp(z.front());
            return out;
        }
        const double zz = z.front() - (f.front() - y) / slope;
        out.value = std::exp(zz);
        return out;
    }
    // largest j with f[j] < y; crossing inside (z_j, z_{j+1}]
    std::size_t jlo = 0, jhi = n - 1;
    while (jhi - jlo > 1) {
        const std::size_t mid = (jlo + jhi) / 2;
        if (f[mid] < y)
            jlo = mid;
        else
            jhi = mid;
    }
    const double den = f[jhi] - f[jlo];
    const double zz = (den > 0.0) ? z[jlo] + (y - f[jlo]) / den * (z[jhi] - z[jlo]) : z[jlo];
    out.value = std::exp(zz);
    return out;
}

}  // namespace debtceil
