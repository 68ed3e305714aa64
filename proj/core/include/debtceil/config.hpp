#pragma once

#include <cstdint>
#include <string>

#include "debtceil/boundary.hpp"
#include "debtceil/model.hpp"

namespace debtceil {

struct SimSettings {
    double x0 = 1.0;
    double y0 = 0.02;
    double horizon = 100.0;
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
};

struct RunConfig {
    ModelParams model;
    CostSpec cost;
    SolverSettings solver;
    SimSettings sim;
};

/// Flat key/value config: `key = value` lines, `#` comments, UTF-8.
/// Keys: delta g a theta sigma rho kappa cost.{c,gamma,m}
///       solver.{z_min,z_max,n_z,t_max,n_t,n_v,picard_tol,picard_damping,max_iter}
///       sim.{x0,y0,horizon,dt,n_paths,seed}
/// Unknown keys raise std::invalid_argument.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace debtceil
