#include "debtceil/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "debtceil/math.hpp"
#include "debtceil/paths.hpp"
#include "debtceil/rng.hpp"

namespace debtceil {

std::string PolicySpec::name() const {
    switch (kind) {
        case Kind::optimal_ceiling: return "optimal-ceiling";
        case Kind::do_nothing: return "do-nothing";
        case Kind::immediate_to_zero: return "immediate-to-zero";
        case Kind::constant_ceiling: {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "constant-ceiling(%.6g)", level);
            return buf;
        }
    }
    return "?";
}

void PolicySpec::validate() const {
    if (kind == Kind::constant_ceiling && !(level > 0.0))
        throw std::invalid_argument("constant-ceiling level must be > 0");
    if (kind == Kind::optimal_ceiling && (boundary == nullptr || !boundary->converged))
        throw std::invalid_argument("optimal-ceiling requires a converged boundary");
}

namespace {

struct CeilingFn {
    const PolicySpec* policy;
    double operator()(double y) const {
        switch (policy->kind) {
            case PolicySpec::Kind::optimal_ceiling: return b_of_y(*policy->boundary, y).value;
            case PolicySpec::Kind::constant_ceiling: return policy->level;
            default: return std::numeric_limits<double>::infinity();
        }
    }
    bool active() const {
        return policy->kind == PolicySpec::Kind::optimal_ceiling ||
               policy->kind == PolicySpec::Kind::constant_ceiling;
    }
};

struct SimConfig {
    std::size_t n_steps = 0;
    StepCoeffs step;
    std::vector<double> disc;  // e^{-rho k dt}
    double drift_dt = 0.0;     // (delta - g) dt
};

SimConfig make_sim(const ModelParams& p, double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("simulate: horizon and dt must be > 0");
    SimConfig c;
    c.n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
    if (c.n_steps == 0) c.n_steps = 1;
    c.step = make_step(p, dt);
    c.disc.resize(c.n_steps + 1);
    for (std::size_t k = 0; k <= c.n_steps; ++k) c.disc[k] = std::exp(-p.rho * dt * k);
    c.drift_dt = (p.delta - p.g) * dt;
    return c;
}

}  // namespace

ControlledPath simulate_controlled(const ModelParams& p, const CostSpec& cost, double x0,
                                   double y0, const PolicySpec& policy, double horizon, double dt,
                                   std::uint64_t seed, std::uint64_t path_index) {
    if (!(x0 > 0.0)) throw std::invalid_argument("simulate_controlled: x0 must be > 0");
    policy.validate();
    const SimConfig c = make_sim(p, horizon, dt);
    const CeilingFn ceil{&policy};

    ControlledPath path;
    const std::size_t n = c.n_steps + 1;
    path.t_grid.resize(n);
    path.X.resize(n);
    path.Y.resize(n);
    path.nu_cum.resize(n);
    path.cost_running.resize(n);
    path.intervention_cost_running.resize(n);

    double x = x0, y = y0, nu = 0.0, run = 0.0, icost = 0.0;
    if (policy.kind == PolicySpec::Kind::immediate_to_zero) {
        nu = x0;
        icost = p.kappa * x0;
        x = 0.0;
    } else if (ceil.active()) {
        const double cap = ceil(y0);
        if (x > cap) {
            nu = x - cap;
            icost = p.kappa * nu;
            x = cap;
        }
    }
    path.t_grid[0] = 0.0;
    path.X[0] = x;
    path.Y[0] = y;
    path.nu_cum[0] = nu;
    path.cost_running[0] = 0.0;
    path.intervention_cost_running[0] = icost;

    double prev_c = cost.value(x);
    for (std::size_t k = 0; k < c.n_steps; ++k) {
        const auto zn = normal_pair(seed, path_index, k);
        double inc;
        step_exact(c.step, y, inc, zn[0], zn[1]);
        x *= std::exp(c.drift_dt - inc);
        if (ceil.active()) {
            const double cap = ceil(y);
            if (x > cap) {
                const double jump = x - cap;
                nu += jump;
                icost += p.kappa * c.disc[k + 1] * jump;
                x = cap;
            }
        }
        const double cur_c = cost.value(x);
        run += 0.5 * c.step.dt * (c.disc[k] * prev_c + c.disc[k + 1] * cur_c);
        prev_c = cur_c;
        path.t_grid[k + 1] = (k + 1) * dt;
        path.X[k + 1] = x;
        path.Y[k + 1] = y;
        path.nu_cum[k + 1] = nu;
        path.cost_running[k + 1] = run;
        path.intervention_cost_running[k + 1] = icost;
    }
    return path;
}

namespace {

// One path's total discounted cost for each policy, sharing the noise stream.
void run_paths(const ModelParams& p, const CostSpec& cost,
               const std::vector<PolicySpec>& policies, double x0, double y0, const SimConfig& c,
               std::uint64_t seed, std::size_t path_lo, std::size_t path_hi, double* totals,
               std::size_t stride) {
    const std::size_t np = policies.size();
    std::vector<CeilingFn> ceils(np);
    for (std::size_t j = 0; j < np; ++j) ceils[j] = CeilingFn{&policies[j]};
    std::vector<double> x(np), run(np), icost(np), prev_c(np);

    for (std::size_t path = path_lo; path < path_hi; ++path) {
        double y = y0;
        for (std::size_t j = 0; j < np; ++j) {
            x[j] = x0;
            run[j] = 0.0;
            icost[j] = 0.0;
            if (policies[j].kind == PolicySpec::Kind::immediate_to_zero) {
                icost[j] = p.kappa * x0;
                x[j] = 0.0;
            } else if (ceils[j].active()) {
                const double cap = ceils[j](y0);
                if (x[j] > cap) {
                    icost[j] = p.kappa * (x[j] - cap);
                    x[j] = cap;
                }
            }
            prev_c[j] = cost.value(x[j]);
        }
        for (std::size_t k = 0; k < c.n_steps; ++k) {
            const auto zn = normal_pair(seed, path, k);
            double inc;
            step_exact(c.step, y, inc, zn[0], zn[1]);
            const double factor = std::exp(c.drift_dt - inc);
            for (std::size_t j = 0; j < np; ++j) {
                double xj = x[j] * factor;
                if (ceils[j].active()) {
                    const double cap = ceils[j](y);
                    if (xj > cap) {
                        icost[j] += p.kappa * c.disc[k + 1] * (xj - cap);
                        xj = cap;
                    }
                }
                const double cur = cost.value(xj);
                run[j] += 0.5 * c.step.dt * (c.disc[k] * prev_c[j] + c.disc[k + 1] * cur);
                prev_c[j] = cur;
                x[j] = xj;
            }
        }
        for (std::size_t j = 0; j < np; ++j) totals[path * stride + j] = run[j] + icost[j];
    }
}

double closed_form_cost_integrand(const ModelParams& p, const CostSpec& cost, double x0,
                                  double y0, double s) {
    // e^{-rho s} E[C(X0_s)] = e^{-rho s}(c x0^gamma ddm(s, gamma) + m x0 ddm(s, 1))
    const double dg = cost.gamma;
    return std::exp(-p.rho * s) *
           (cost.c * std::pow(x0, dg) * discount_drift_moment(p, s, y0, dg) +
            cost.m * x0 * discount_drift_moment(p, s, y0, 1.0));
}

double cost_integral(const ModelParams& p, const CostSpec& cost, double x0, double y0, double lo,
                     double hi) {
    static const QuadRule gl = gauss_legendre(16);
    const int n_panels = std::max(8, static_cast<int>((hi - lo) / 2.0));
    double acc = 0.0;
    for (int k = 0; k < n_panels; ++k) {
        const double a = lo + (hi - lo) * k / n_panels;
        const double b = lo + (hi - lo) * (k + 1) / n_panels;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double s = 0.5 * (b - a) * gl.nodes[i] + 0.5 * (a + b);
            acc += 0.5 * (b - a) * gl.weights[i] * closed_form_cost_integrand(p, cost, x0, y0, s);
        }
    }
    return acc;
}

}  // namespace

double uncontrolled_cost_quadrature(const ModelParams& p, const CostSpec& cost, double x0,
                                    double y0, double horizon) {
    return cost_integral(p, cost, x0, y0, 0.0, horizon);
}

double horizon_tail_bound(const ModelParams& p, const CostSpec& cost, double x0, double y0,
                          double horizon) {
    // running-cost tail of the uncontrolled path: quadrature out to where the
    // integrand is negligible, then a geometric-rate bound
    const double rate = std::min(decay_rate(p, 1.0), decay_rate(p, cost.gamma));
    const double t2 = horizon + std::log(1e8) / rate;
    const double running_tail = cost_integral(p, cost, x0, y0, horizon, t2) +
                                closed_form_cost_integrand(p, cost, x0, y0, t2) / rate;
    // whatever any policy does after T costs at most kappa E[X_T] <= kappa E[X0_T]
    const double kappa_tail = p.kappa * x0 * std::exp(-p.rho * horizon) *
                              discount_drift_moment(p, horizon, y0, 1.0);
    return running_tail + kappa_tail;
}

CostEstimate estimate_cost(const ModelParams& p, const CostSpec& cost, const PolicySpec& policy,
                           double x0, double y0, std::size_t n_paths, double horizon, double dt,
                           std::uint64_t seed, int max_threads) {
    if (n_paths < 2) throw std::invalid_argument("estimate_cost: n_paths must be >= 2");
    policy.validate();
    const SimConfig c = make_sim(p, horizon, dt);
    std::vector<double> totals(n_paths);
    const std::vector<PolicySpec> pol = {policy};
    parallel_for(n_paths, max_threads, [&](std::size_t lo, std::size_t hi) {
        run_paths(p, cost, pol, x0, y0, c, seed, lo, hi, totals.data(), 1);
    });
    CostEstimate est;
    est.n_paths = n_paths;
    est.horizon = horizon;
    est.dt = dt;
    double sum = 0.0, lo = totals[0], hi = totals[0];
    for (double t : totals) {
        sum += t;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    est.mean = (lo == hi) ? lo : sum / n_paths;
    double ss = 0.0;
    for (double t : totals) ss += (t - est.mean) * (t - est.mean);
    est.stderr_ = (lo == hi) ? 0.0 : std::sqrt(ss / (n_paths - 1.0) / n_paths);
    est.tail_bound = horizon_tail_bound(p, cost, x0, y0, horizon);
    return est;
}

ComparisonReport compare_policies(const ModelParams& p, const CostSpec& cost,
                                  const std::vector<PolicySpec>& policies, double x0, double y0,
                                  std::size_t n_paths, double horizon, double dt,
                                  std::uint64_t seed, int max_threads, bool measure_dt_bias) {
    if (policies.size() < 2) throw std::invalid_argument("compare_policies: need >= 2 policies");
    if (n_paths < 2) throw std::invalid_argument("compare_policies: n_paths must be >= 2");
    for (const auto& pol : policies) pol.validate();
    const std::size_t np = policies.size();
    const SimConfig c = make_sim(p, horizon, dt);
    std::vector<double> totals(n_paths * np);
    parallel_for(n_paths, max_threads, [&](std::size_t lo, std::size_t hi) {
        run_paths(p, cost, policies, x0, y0, c, seed, lo, hi, totals.data(), np);
    });

    ComparisonReport rep;
    rep.x0 = x0;
    rep.y0 = y0;
    rep.seed = seed;
    rep.names.reserve(np);
    const double tail = horizon_tail_bound(p, cost, x0, y0, horizon);
    for (std::size_t j = 0; j < np; ++j) {
        rep.names.push_back(policies[j].name());
        CostEstimate est;
        est.n_paths = n_paths;
        est.horizon = horizon;
        est.dt = dt;
        est.tail_bound = tail;
        double sum = 0.0, lo = totals[j], hi = totals[j];
        for (std::size_t i = 0; i < n_paths; ++i) {
            const double t = totals[i * np + j];
            sum += t;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        est.mean = (lo == hi) ? lo : sum / n_paths;
        double ss = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const double d = totals[i * np + j] - est.mean;
            ss += d * d;
        }
        est.stderr_ = (lo == hi) ? 0.0 : std::sqrt(ss / (n_paths - 1.0) / n_paths);
        rep.estimates.push_back(est);
    }
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b2 = a + 1; b2 < np; ++b2) {
            PairwiseDiff d;
            d.i = a;
            d.j = b2;
            double sum = 0.0;
            for (std::size_t i = 0; i < n_paths; ++i)
                sum += totals[i * np + a] - totals[i * np + b2];
            d.mean = sum / n_paths;
            double ss = 0.0;
            for (std::size_t i = 0; i < n_paths; ++i) {
                const double x = totals[i * np + a] - totals[i * np + b2] - d.mean;
                ss += x * x;
            }
            d.se = std::sqrt(ss / (n_paths - 1.0) / n_paths);
            rep.diffs.push_back(d);
        }
    rep.ranking.resize(np);
    std::iota(rep.ranking.begin(), rep.ranking.end(), std::size_t{0});
    std::sort(rep.ranking.begin(), rep.ranking.end(), [&rep](std::size_t a, std::size_t b2) {
        return rep.estimates[a].mean < rep.estimates[b2].mean;
    });

    if (measure_dt_bias) {
        // Same Brownian path at both resolutions: the 2dt evaluation reuses the
        // fine (Y, intY) increments pairwise, so the difference isolates the
        // projection/quadrature discretization.
        const std::size_t n_pilot = std::min<std::size_t>(n_paths, 2000);
        const std::size_t n2 = c.n_steps / 2;
        std::vector<double> ta(n_pilot * np, 0.0), tb(n_pilot * np, 0.0);
        parallel_for(n_pilot, max_threads, [&](std::size_t lo, std::size_t hi) {
            std::vector<double> ys(2 * n2 + 1), incs(2 * n2);
            std::vector<double> x(np), run(np), icost(np), prev_c(np);
            std::vector<CeilingFn> ceils(np);
            for (std::size_t j = 0; j < np; ++j) ceils[j] = CeilingFn{&policies[j]};
            auto init_states = [&](double y_init) {
                for (std::size_t j = 0; j < np; ++j) {
                    x[j] = x0;
                    run[j] = 0.0;
                    icost[j] = 0.0;
                    if (policies[j].kind == PolicySpec::Kind::immediate_to_zero) {
                        icost[j] = p.kappa * x0;
                        x[j] = 0.0;
                    } else if (ceils[j].active()) {
                        const double cap = ceils[j](y_init);
                        if (x[j] > cap) {
                            icost[j] = p.kappa * (x[j] - cap);
                            x[j] = cap;
                        }
                    }
                    prev_c[j] = cost.value(x[j]);
                }
            };
            for (std::size_t path = lo; path < hi; ++path) {
                double y = y0;
                ys[0] = y;
                for (std::size_t k = 0; k < 2 * n2; ++k) {
                    const auto zn = normal_pair(seed, path, k);
                    double inc;
                    step_exact(c.step, y, inc, zn[0], zn[1]);
                    ys[k + 1] = y;
                    incs[k] = inc;
                }
                // fine resolution
                init_states(y0);
                for (std::size_t k = 0; k < 2 * n2; ++k) {
                    const double factor = std::exp(c.drift_dt - incs[k]);
                    for (std::size_t j = 0; j < np; ++j) {
                        double xj = x[j] * factor;
                        if (ceils[j].active()) {
                            const double cap = ceils[j](ys[k + 1]);
                            if (xj > cap) {
                                icost[j] += p.kappa * c.disc[k + 1] * (xj - cap);
                                xj = cap;
                            }
                        }
                        const double cur = cost.value(xj);
                        run[j] += 0.5 * c.step.dt * (c.disc[k] * prev_c[j] + c.disc[k + 1] * cur);
                        prev_c[j] = cur;
                        x[j] = xj;
                    }
                }
                for (std::size_t j = 0; j < np; ++j) ta[path * np + j] = run[j] + icost[j];
                // coarse resolution on the same samples
                init_states(y0);
                for (std::size_t k2 = 0; k2 < n2; ++k2) {
                    const double inc2 = incs[2 * k2] + incs[2 * k2 + 1];
                    const double factor = std::exp(2.0 * c.drift_dt - inc2);
                    const double yk = ys[2 * k2 + 2];
                    for (std::size_t j = 0; j < np; ++j) {
                        double xj = x[j] * factor;
                        if (ceils[j].active()) {
                            const double cap = ceils[j](yk);
                            if (xj > cap) {
                                icost[j] += p.kappa * c.disc[2 * k2 + 2] * (xj - cap);
                                xj = cap;
                            }
                        }
                        const double cur = cost.value(xj);
                        run[j] += 0.5 * (2.0 * c.step.dt) *
                                  (c.disc[2 * k2] * prev_c[j] + c.disc[2 * k2 + 2] * cur);
                        prev_c[j] = cur;
                        x[j] = xj;
                    }
                }
                for (std::size_t j = 0; j < np; ++j) tb[path * np + j] = run[j] + icost[j];
            }
        });
        for (std::size_t j = 0; j < np; ++j) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t i = 0; i < n_pilot; ++i) {
                ma += ta[i * np + j];
                mb += tb[i * np + j];
            }
            rep.estimates[j].dt_bias = std::fabs(ma - mb) / n_pilot;
        }
    }
    return rep;
}

}  // namespace debtceil
