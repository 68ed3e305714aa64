#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "debtceil/boundary.hpp"

namespace debtceil {

struct PolicySpec {
    enum class Kind { optimal_ceiling, do_nothing, immediate_to_zero, constant_ceiling };
    Kind kind = Kind::do_nothing;
    double level = 0.0;                 // constant_ceiling only, > 0
    const Boundary* boundary = nullptr; // optimal_ceiling only, converged

    static PolicySpec optimal(const Boundary& b) {
        return {Kind::optimal_ceiling, 0.0, &b};
    }
    static PolicySpec none() { return {Kind::do_nothing, 0.0, nullptr}; }
    static PolicySpec to_zero() { return {Kind::immediate_to_zero, 0.0, nullptr}; }
    static PolicySpec constant(double level) {
        return {Kind::constant_ceiling, level, nullptr};
    }
    std::string name() const;
    void validate() const;
};

struct ControlledPath {
    std::vector<double> t_grid;
    std::vector<double> X;
    std::vector<double> Y;
    std::vector<double> nu_cum;
    std::vector<double> cost_running;               // int e^{-rho s} C(X) ds accrued
    std::vector<double> intervention_cost_running;  // kappa int e^{-rho s} dnu accrued
};

struct CostEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    double horizon = 0.0;
    double dt = 0.0;
    double tail_bound = 0.0;  // truncated-horizon remainder, analytic
    double dt_bias = 0.0;     // |J(dt) - J(2dt)| on a pilot set; 0 if not measured
};

struct PairwiseDiff {
    std::size_t i = 0, j = 0;   // indices into policies
    double mean = 0.0;          // E[J_i - J_j], common random numbers
    double se = 0.0;
};

struct ComparisonReport {
    std::vector<std::string> names;
    std::vector<CostEstimate> estimates;
    std::vector<PairwiseDiff> diffs;
    std::vector<std::size_t> ranking;  // by mean, ascending
    double x0 = 0.0, y0 = 0.0;
    std::uint64_t seed = 0;
};

/// One reflected trajectory under the policy; exact (Y, intY) steps, X scaled
/// by the exact growth factor between interventions, end-of-step projection
/// onto [0, ceiling(Y)].
ControlledPath simulate_controlled(const ModelParams& p, const CostSpec& cost, double x0,
                                   double y0, const PolicySpec& policy, double horizon, double dt,
                                   std::uint64_t seed, std::uint64_t path_index = 0);

CostEstimate estimate_cost(const ModelParams& p, const CostSpec& cost, const PolicySpec& policy,
                           double x0, double y0, std::size_t n_paths, double horizon, double dt,
                           std::uint64_t seed, int max_threads = 0);

/// All policies on the same noise streams (common random numbers); paired
/// difference estimates for every pair.
ComparisonReport compare_policies(const ModelParams& p, const CostSpec& cost,
                                  const std::vector<PolicySpec>& policies, double x0, double y0,
                                  std::size_t n_paths, double horizon, double dt,
                                  std::uint64_t seed, int max_threads = 0,
                                  bool measure_dt_bias = true);

/// Analytic bound on E[int_T^inf e^{-rho s} C(X0_s) ds] + kappa e^{-rho T} E[X0_T]
/// (running-cost tail of the uncontrolled path plus the value bound kappa x for
/// whatever follows T under any policy).
double horizon_tail_bound(const ModelParams& p, const CostSpec& cost, double x0, double y0,
                          double horizon);

/// E[int_0^T e^{-rho s} C(X0_s) ds] by quadrature of the closed-form integrand;
/// the do-nothing cost oracle.
double uncontrolled_cost_quadrature(const ModelParams& p, const CostSpec& cost, double x0,
                                    double y0, double horizon);

}  // namespace debtceil
