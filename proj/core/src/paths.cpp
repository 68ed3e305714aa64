#include "debtceil/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "debtceil/math.hpp"
#include "debtceil/rng.hpp"

namespace debtceil {

StepCoeffs make_step(const ModelParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_step: dt must be > 0");
    StepCoeffs s;
    s.dt = dt;
    const double x = p.theta * dt;
    const double em1 = std::expm1(-x);
    s.e1 = 1.0 + em1;
    s.k1 = -em1 / p.theta;
    const double s2 = p.sigma * p.sigma;
    const double var_Y = s2 / (2.0 * p.theta) * (-std::expm1(-2.0 * x));
    const double var_I = s2 * ou_var_int_shape(x) / (p.theta * p.theta * p.theta);
    const double cov_IY = s2 / (2.0 * p.theta * p.theta) * em1 * em1;
    s.sd_Y = std::sqrt(var_Y);
    s.b_IY = cov_IY / var_Y;
    s.sd_I_c = std::sqrt(std::max(var_I - cov_IY * cov_IY / var_Y, 0.0));
    s.a_over_theta = p.a / p.theta;
    return s;
}

PathBatch sample_paths(const ModelParams& p, double y0, const std::vector<double>& t_grid,
                       std::size_t n_paths, std::uint64_t seed, int max_threads) {
    if (t_grid.size() < 2) throw std::invalid_argument("sample_paths: need at least two time nodes");
    if (t_grid.front() != 0.0) throw std::invalid_argument("sample_paths: grid must start at 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw std::invalid_argument("sample_paths: grid must be strictly ascending");
    if (n_paths == 0) throw std::invalid_argument("sample_paths: n_paths must be >= 1");

    const std::size_t n_nodes = t_grid.size();
    std::vector<StepCoeffs> steps(n_nodes - 1);
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) steps[k] = make_step(p, t_grid[k + 1] - t_grid[k]);

    PathBatch batch;
    batch.t_grid = t_grid;
    batch.n_paths = n_paths;
    batch.seed = seed;
    batch.Y.resize(n_paths * n_nodes);
    batch.intY.resize(n_paths * n_nodes);

    parallel_for(n_paths, max_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t path = lo; path < hi; ++path) {
            double y = y0, acc = 0.0;
            batch.Y[path * n_nodes] = y;
            batch.intY[path * n_nodes] = 0.0;
            for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
                const auto z = normal_pair(seed, path, k);
                double inc;
                step_exact(steps[k], y, inc, z[0], z[1]);
                acc += inc;
                batch.Y[path * n_nodes + k + 1] = y;
                batch.intY[path * n_nodes + k + 1] = acc;
            }
        }
    });
    return batch;
}

}  // namespace debtceil
