#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "debtceil/config.hpp"
#include "debtceil/io.hpp"
#include "support/test_configs.hpp"

using namespace debtceil;

TEST_CASE("config parsing: all keys, comments, whitespace") {
    const std::string text = R"(
# model
delta = 0.031
g     = 0.019
a = 0.012
theta = 0.6
sigma = 0.04   # inline comment
rho = 0.055
kappa = 1.5
cost.c = 0.4
cost.gamma = 2.5
cost.m = 0.02
solver.n_z = 61
solver.picard_tol = 1e-7
sim.x0 = 2.5
sim.n_paths = 5000
sim.seed = 99
)";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.model.delta == 0.031);
    CHECK(cfg.model.g == 0.019);
    CHECK(cfg.model.a == 0.012);
    CHECK(cfg.model.theta == 0.6);
    CHECK(cfg.model.sigma == 0.04);
    CHECK(cfg.model.rho == 0.055);
    CHECK(cfg.model.kappa == 1.5);
    CHECK(cfg.cost.c == 0.4);
    CHECK(cfg.cost.gamma == 2.5);
    CHECK(cfg.cost.m == 0.02);
    CHECK(cfg.solver.n_z == 61);
    CHECK(cfg.solver.picard_tol == 1e-7);
    CHECK(cfg.sim.x0 == 2.5);
    CHECK(cfg.sim.n_paths == 5000);
    CHECK(cfg.sim.seed == 99);
    // untouched keys keep defaults
    CHECK(cfg.solver.n_v == SolverSettings{}.n_v);
}

TEST_CASE("config parsing: rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("delta = fast\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("delta 0.03\n"), std::invalid_argument);
}

TEST_CASE("fmt17 round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 6.02e23, -1.7976931348623157e308, 5e-324}) {
        const double back = std::strtod(fmt17(v).c_str(), nullptr);
        CHECK(back == v);
    }
}

TEST_CASE("boundary cache round-trip preserves everything") {
    const Boundary b =
        solve_boundary(testcfg::base_params(), testcfg::cost_mpos(), testcfg::fast_settings());
    const std::string path = (std::filesystem::temp_directory_path() / "dc_cache_test.json").string();
    save_boundary_cache(path, b);
    const auto loaded = load_boundary_cache(path);
    REQUIRE(loaded.has_value());
    CHECK(loaded->params_digest == b.params_digest);
    CHECK(loaded->z_grid == b.z_grid);
    CHECK(loaded->yhat == b.yhat);
    CHECK(loaded->theta_curve == b.theta_curve);
    CHECK(loaded->residual == b.residual);
    CHECK(loaded->y_star == b.y_star);
    CHECK(loaded->residual_max == b.residual_max);
    CHECK(loaded->sweeps == b.sweeps);
    CHECK(loaded->converged == b.converged);
    CHECK(loaded->settings.n_v == b.settings.n_v);
    CHECK(loaded->params.sigma == b.params.sigma);
    std::remove(path.c_str());
    CHECK_FALSE(load_boundary_cache("/nonexistent/nope.json").has_value());
}

TEST_CASE("m = 0 boundary cache keeps the -inf sentinel") {
    const Boundary b =
        solve_boundary(testcfg::base_params(), testcfg::cost_m0(), testcfg::fast_settings());
    CHECK(b.y_star == kNegInf);
    const std::string path = (std::filesystem::temp_directory_path() / "dc_cache_m0.json").string();
    save_boundary_cache(path, b);
    const auto loaded = load_boundary_cache(path);
    REQUIRE(loaded.has_value());
    CHECK(loaded->y_star == kNegInf);
    std::remove(path.c_str());
}

TEST_CASE("boundary csv carries the specified header") {
    const Boundary b =
        solve_boundary(testcfg::base_params(), testcfg::cost_mpos(), testcfg::fast_settings());
    const std::string path = (std::filesystem::temp_directory_path() / "dc_bnd.csv").string();
    write_boundary_csv(path, b);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "z,yhat,theta_bound,residual");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == b.z_grid.size());
    std::remove(path.c_str());
}
