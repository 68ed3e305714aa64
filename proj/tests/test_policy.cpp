#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "debtceil/paths.hpp"
#include "debtceil/policy.hpp"
#include "debtceil/rng.hpp"
#include "debtceil/valuation.hpp"
#include "support/test_configs.hpp"

using namespace debtceil;

namespace {

const Boundary& bnd() {
    static const Boundary b =
        solve_boundary(testcfg::base_params(), testcfg::cost_mpos(), testcfg::fast_settings());
    return b;
}

}  // namespace

TEST_CASE("do-nothing path reproduces x0 e^{(delta-g)t - intY} exactly") {
    const ModelParams p = testcfg::base_params();
    const CostSpec c = testcfg::cost_m0();
    const double x0 = 1.3, y0 = 0.0;
    const ControlledPath path =
        simulate_controlled(p, c, x0, y0, PolicySpec::none(), 2.0, 0.01, 11);
    // recompute intY from an identical-noise run through the sampler path
    double acc = 0.0;
    const StepCoeffs s = make_step(p, 0.01);
    double y = y0;
    for (std::size_t k = 0; k + 1 < path.t_grid.size(); ++k) {
        const auto z = normal_pair(11, 0, k);
        double inc;
        step_exact(s, y, inc, z[0], z[1]);
        acc += inc;
        const double expect = x0 * std::exp((p.delta - p.g) * path.t_grid[k + 1] - acc);
        CHECK(path.X[k + 1] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(path.Y[k + 1] == doctest::Approx(y).epsilon(1e-12));
        CHECK(path.nu_cum[k + 1] == 0.0);
    }
}

TEST_CASE("immediate-to-zero: cost is exactly kappa x0 with zero spread") {
    const ModelParams p = testcfg::base_params();
    const CostSpec c = testcfg::cost_m0();
    const CostEstimate est =
        estimate_cost(p, c, PolicySpec::to_zero(), 0.8, 0.02, 200, 5.0, 0.01, 3);
    CHECK(est.mean == doctest::Approx(p.kappa * 0.8).epsilon(1e-14));
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("optimal ceiling: immediate lump-sum, ceiling invariant, inaction") {
    const Boundary& b = bnd();
    const double y0 = b.params.equilibrium();
    const double cap0 = b_of_y(b, y0).value;
    REQUIRE(cap0 > 0.0);
    const double x0 = 1.5 * cap0;
    const PolicySpec pol = PolicySpec::optimal(b);
    for (std::uint64_t pi = 0; pi < 20; ++pi) {
        const ControlledPath path =
            simulate_controlled(b.params, b.cost, x0, y0, pol, 3.0, 0.002, 17, pi);
        CHECK(path.nu_cum[0] == doctest::Approx(x0 - cap0).epsilon(1e-14));
        CHECK(path.X[0] == doctest::Approx(cap0));
        for (std::size_t k = 0; k < path.t_grid.size(); ++k) {
            const double cap = b_of_y(b, path.Y[k]).value;
            CHECK(path.X[k] <= cap * (1.0 + 1e-12) + 1e-15);
            if (k > 0 && path.X[k - 1] < b_of_y(b, path.Y[k - 1]).value - 1e-9) {
                // strict inaction: no intervention from strictly inside
                const bool intervened_now = path.nu_cum[k] > path.nu_cum[k - 1];
                if (intervened_now)
                    CHECK(path.X[k] == doctest::Approx(b_of_y(b, path.Y[k]).value));
            }
        }
        // nu nondecreasing, X nonnegative
        for (std::size_t k = 1; k < path.t_grid.size(); ++k) {
            CHECK(path.nu_cum[k] >= path.nu_cum[k - 1]);
            CHECK(path.X[k] >= 0.0);
        }
    }
}

TEST_CASE("running-supremum identity for the reflected control (cond2 structure)") {
    const Boundary& b = bnd();
    const double y0 = b.params.equilibrium();
    const double x0 = 1.2 * b_of_y(b, y0).value;
    const PolicySpec pol = PolicySpec::optimal(b);
    const double dt = 0.002;
    const ControlledPath path =
        simulate_controlled(b.params, b.cost, x0, y0, pol, 4.0, dt, 23, 0);
    // discounted-units control: nubar_t = sum of jumps deflated by the growth
    // factor; compare with sup_{s<=t}(x0 - b(Y_s) e^{-Gamma_s}) v 0
    double gamma_s = 0.0;  // (delta-g)s - intY_s reconstructed from the path
    double nubar = path.nu_cum[0];
    double run_sup = std::max(x0 - b_of_y(b, path.Y[0]).value, 0.0);
    double max_err = 0.0;
    for (std::size_t k = 1; k < path.t_grid.size(); ++k) {
        // X evolves multiplicatively between interventions, so the growth factor
        // can be recovered from the uncontrolled recursion on the same noise
        const double jump = path.nu_cum[k] - path.nu_cum[k - 1];
        const double x_pre = path.X[k] + jump;  // state before the projection
        if (path.X[k - 1] <= 0.0 || x_pre <= 0.0) break;  // absorbed at 0
        gamma_s += std::log(x_pre / path.X[k - 1]);
        nubar += jump * std::exp(-gamma_s);
        run_sup = std::max(run_sup, x0 - b_of_y(b, path.Y[k]).value * std::exp(-gamma_s));
        max_err = std::max(max_err, std::fabs(nubar - std::max(run_sup, 0.0)));
    }
    CHECK(max_err < 0.05);  // O(dt)-scale agreement
}

TEST_CASE("estimated cost: deterministic in the seed, monotone in x0") {
    const Boundary& b = bnd();
    const double y0 = b.params.equilibrium();
    const double cap = b_of_y(b, y0).value;
    const PolicySpec pol = PolicySpec::optimal(b);
    const CostEstimate a1 =
        estimate_cost(b.params, b.cost, pol, cap, y0, 300, 10.0, 0.01, 5, 1);
    const CostEstimate a2 =
        estimate_cost(b.params, b.cost, pol, cap, y0, 300, 10.0, 0.01, 5, 4);
    CHECK(a1.mean == a2.mean);
    CHECK(a1.stderr_ == a2.stderr_);
    double prev = -1.0;
    for (double f : {0.5, 1.0, 1.5}) {
        const CostEstimate e =
            estimate_cost(b.params, b.cost, pol, f * cap, y0, 400, 10.0, 0.01, 5);
        CHECK(e.mean > prev);
        prev = e.mean;
    }
}

TEST_CASE("do-nothing cost matches the closed-form quadrature oracle") {
    const ModelParams p = testcfg::base_params();
    const CostSpec c = testcfg::cost_m0();
    const double x0 = 0.9, y0 = 0.02, T = 60.0;
    const CostEstimate est =
        estimate_cost(p, c, PolicySpec::none(), x0, y0, 4000, T, 0.02, 99);
    const double oracle = uncontrolled_cost_quadrature(p, c, x0, y0, T);
    CHECK(std::fabs(est.mean - oracle) < 3.0 * est.stderr_ + 2e-4 * oracle);
}

TEST_CASE("policy comparison: optimal wins within pairwise noise, CRN wiring") {
    const Boundary& b = bnd();
    const double y0 = b.params.equilibrium();
    const double cap = b_of_y(b, y0).value;
    const double x0 = 1.5 * cap;
    std::vector<PolicySpec> pols = {PolicySpec::optimal(b), PolicySpec::none(),
                                    PolicySpec::to_zero(), PolicySpec::constant(0.5 * cap),
                                    PolicySpec::constant(2.0 * cap)};
    const ComparisonReport rep =
        compare_policies(b.params, b.cost, pols, x0, y0, 1500, 40.0, 0.005, 12345, 0, false);
    REQUIRE(rep.estimates.size() == 5);
    for (const auto& d : rep.diffs)
        if (d.i == 0) CHECK(d.mean <= 3.0 * d.se + 1e-9);
    // immediate-to-zero is exact and strictly dominated at this x0
    CHECK(rep.estimates[2].mean == doctest::Approx(b.params.kappa * x0));
    CHECK(rep.estimates[0].mean < rep.estimates[2].mean);
}

TEST_CASE("halving dt moves the estimate by less than the reported bias bounds") {
    const Boundary& b = bnd();
    const double y0 = b.params.equilibrium();
    const double x0 = 1.2 * b_of_y(b, y0).value;
    std::vector<PolicySpec> pols = {PolicySpec::optimal(b), PolicySpec::none()};
    const double T = 20.0;
    const ComparisonReport r1 =
        compare_policies(b.params, b.cost, pols, x0, y0, 2000, T, 0.01, 5, 0, true);
    const ComparisonReport r2 =
        compare_policies(b.params, b.cost, pols, x0, y0, 2000, T, 0.005, 5, 0, true);
    const double shift = std::fabs(r1.estimates[0].mean - r2.estimates[0].mean);
    const double budget = r1.estimates[0].dt_bias + r2.estimates[0].dt_bias +
                          3.0 * (r1.estimates[0].stderr_ + r2.estimates[0].stderr_);
    CHECK(shift < budget);
}

TEST_CASE("input validation") {
    const ModelParams p = testcfg::base_params();
    const CostSpec c = testcfg::cost_m0();
    CHECK_THROWS_AS(simulate_controlled(p, c, -1.0, 0.0, PolicySpec::none(), 1.0, 0.01, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_controlled(p, c, 1.0, 0.0, PolicySpec::none(), 0.0, 0.01, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(PolicySpec::constant(0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(estimate_cost(p, c, PolicySpec::none(), 1.0, 0.0, 1, 1.0, 0.01, 1),
                    std::invalid_argument);
}
