#pragma once

#include <cstdint>
#include <vector>

#include "debtceil/model.hpp"

namespace debtceil {

/// Exactly sampled OU paths with their running integral, on a shared time grid.
/// Row-major: Y[path * n_nodes + node].
struct PathBatch {
    std::vector<double> t_grid;
    std::size_t n_paths = 0;
    std::vector<double> Y;
    std::vector<double> intY;
    std::uint64_t seed = 0;

    std::size_t n_nodes() const { return t_grid.size(); }
    double y(std::size_t path, std::size_t node) const { return Y[path * n_nodes() + node]; }
    double iy(std::size_t path, std::size_t node) const { return intY[path * n_nodes() + node]; }
};

/// Per-step coefficients of the exact joint Gaussian transition of
/// (Y_{t+dt}, int_t^{t+dt} Y ds) given Y_t.
struct StepCoeffs {
    double dt = 0.0;
    double e1 = 0.0;       // e^{-theta dt}
    double k1 = 0.0;       // (1 - e^{-theta dt})/theta
    double sd_Y = 0.0;     // sd of Y_{t+dt} | Y_t
    double b_IY = 0.0;     // cov(intY, Y)/var(Y)
    double sd_I_c = 0.0;   // sd of the integral increment given Y_{t+dt}
    double a_over_theta = 0.0;
};

StepCoeffs make_step(const ModelParams& p, double dt);

/// Advances (y, int_inc) by one exact joint draw from two standard normals.
inline void step_exact(const StepCoeffs& s, double& y, double& int_inc, double z1, double z2) {
    const double mean_Y = s.a_over_theta + (y - s.a_over_theta) * s.e1;
    const double mean_I = s.a_over_theta * s.dt + (y - s.a_over_theta) * s.k1;
    const double y_new = mean_Y + s.sd_Y * z1;
    int_inc = mean_I + s.b_IY * (y_new - mean_Y) + s.sd_I_c * z2;
    y = y_new;
}

/// Exact path sampling; bit-identical for a given (seed, t_grid, n_paths)
/// under any thread split. Throws std::invalid_argument on an unsorted grid.
PathBatch sample_paths(const ModelParams& p, double y0, const std::vector<double>& t_grid,
                       std::size_t n_paths, std::uint64_t seed, int max_threads = 0);

}  // namespace debtceil
