// Command-line front end: validate configs, solve the free boundary, evaluate
// value surfaces, simulate the controlled debt ratio, and compare policies.
//
// Exit codes: 0 success, 2 validation failure, 3 missing artifact, 4 numerical
// failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "debtceil/boundary.hpp"
#include "debtceil/config.hpp"
#include "debtceil/io.hpp"
#include "debtceil/model.hpp"
#include "debtceil/policy.hpp"
#include "debtceil/valuation.hpp"

namespace fs = std::filesystem;
using namespace debtceil;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitMissingArtifact = 3;
constexpr int kExitNumerical = 4;

struct TableWriter {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::initializer_list<double> vals) {
        std::vector<std::string> r;
        r.reserve(vals.size());
        for (double v : vals) r.push_back(fmt17(v));
        rows.push_back(std::move(r));
    }
    void write(const std::string& path, const std::string& format) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        if (format == "json") {
            out << "[\n";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out << " {";
                for (std::size_t j = 0; j < header.size(); ++j)
                    out << '"' << header[j] << "\": " << rows[i][j]
                        << (j + 1 < header.size() ? ", " : "");
                out << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
            }
            out << "]\n";
            return;
        }
        for (std::size_t j = 0; j < header.size(); ++j)
            out << header[j] << (j + 1 < header.size() ? ',' : '\n');
        for (const auto& r : rows)
            for (std::size_t j = 0; j < r.size(); ++j) out << r[j] << (j + 1 < r.size() ? ',' : '\n');
    }
};

std::string cache_path(const std::string& out_dir) {
    return (fs::path(out_dir) / "boundary_cache.json").string();
}

int report_validation(const ValidationReport& vr) {
    std::printf("validation: %s\n", vr.pass ? "pass" : "FAIL");
    std::printf("  rho0 bound              : %s\n", fmt17(vr.rho0_bound).c_str());
    std::printf("  gamma bound             : %s\n", fmt17(vr.gamma_bound).c_str());
    std::printf("  2(gamma-1) bound        : %s\n", fmt17(vr.gamma1_bound).c_str());
    std::printf("  required (max)          : %s\n", fmt17(vr.required).c_str());
    std::printf("  margin (rho - required) : %s\n", fmt17(vr.margin).c_str());
    for (const auto& v : vr.violations) std::printf("  violated: %s\n", v.c_str());
    return vr.pass ? kExitOk : kExitValidation;
}

Boundary solve_or_cached(const RunConfig& cfg, const std::string& out_dir, int threads,
                         bool* from_cache) {
    const std::string digest = params_digest(cfg.model, cfg.cost, cfg.solver);
    if (auto cached = load_boundary_cache(cache_path(out_dir));
        cached && cached->params_digest == digest && cached->converged) {
        if (from_cache) *from_cache = true;
        return *cached;
    }
    if (from_cache) *from_cache = false;
    return solve_boundary(cfg.model, cfg.cost, cfg.solver, threads);
}

Boundary require_cached(const RunConfig& cfg, const std::string& out_dir) {
    const std::string digest = params_digest(cfg.model, cfg.cost, cfg.solver);
    auto cached = load_boundary_cache(cache_path(out_dir));
    if (!cached) throw std::runtime_error("missing boundary cache; run `debtceil solve` first");
    if (cached->params_digest != digest)
        throw std::runtime_error("boundary cache digest mismatch; re-run `debtceil solve`");
    return *cached;
}

int cmd_solve(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
              int threads) {
    const ValidationReport vr = validate_params(cfg.model, cfg.cost);
    if (!vr.pass) return report_validation(vr);
    bool cached = false;
    Boundary b;
    try {
        b = solve_or_cached(cfg, out_dir, threads, &cached);
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "solve failed: %s (after %d sweeps)\n", e.what(), e.sweeps);
        std::fprintf(stderr, "residual profile (per node):\n");
        for (double r : e.residual_profile) std::fprintf(stderr, "  %s\n", fmt17(r).c_str());
        return kExitNumerical;
    }
    if (cached) std::printf("cached\n");
    else save_boundary_cache(cache_path(out_dir), b);
    write_boundary_csv((fs::path(out_dir) / "boundary.csv").string(), b);
    (void)format;
    std::printf("y_star       : %s\n",
                std::isfinite(b.y_star) ? fmt17(b.y_star).c_str() : "-inf");
    std::printf("residual_max : %s (relative %s)\n", fmt17(b.residual_max).c_str(),
                fmt17(b.residual_rel_max).c_str());
    std::printf("iterations   : %d\n", b.sweeps);
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
             bool smooth_fit, int eval_nz, int eval_ny) {
    Boundary b = require_cached(cfg, out_dir);
    Valuator val(b);

    const double z_lo = b.z_grid.front(), z_hi = b.z_grid.back();
    const double yhat_lo = b.yhat.front();
    TableWriter u_table;
    u_table.header = {"z", "y", "value", "error_bracket"};
    for (int i = 0; i < eval_nz; ++i) {
        const double z = z_lo + (z_hi - z_lo) * i / std::max(1, eval_nz - 1);
        const double yb = eval_yhat(b, z);
        for (int j = 0; j < eval_ny; ++j) {
            const double y = yhat_lo - 0.5 + (yb - yhat_lo + 1.5) * j / std::max(1, eval_ny - 1);
            const UValue u = val.u(z, y);
            u_table.add_row({z, y, u.value, u.error_bracket});
        }
    }
    u_table.write((fs::path(out_dir) / "u_surface.csv").string(), format);

    TableWriter v_table;
    v_table.header = {"x", "y", "value", "error_bracket"};
    const int vnx = std::max(3, eval_nz / 3), vny = std::max(3, eval_ny / 2);
    for (int i = 0; i < vnx; ++i) {
        const double x = std::exp(z_lo + (z_hi - z_lo) * i / std::max(1, vnx - 1));
        for (int j = 0; j < vny; ++j) {
            const double y =
                yhat_lo - 0.25 + (b.params.equilibrium() + 0.3 - yhat_lo) * j /
                                     std::max(1, vny - 1);
            const VValue vv = val.v(x, y);
            v_table.add_row({x, y, vv.value, vv.error_bracket});
        }
    }
    v_table.write((fs::path(out_dir) / "v_surface.csv").string(), format);

    TableWriter b_table;
    b_table.header = {"y", "value", "grid_truncated"};
    const double y_top = b.yhat.back() > 1e3 ? b.yhat[b.yhat.size() * 3 / 4] : b.yhat.back();
    for (int j = 0; j < 4 * eval_ny; ++j) {
        const double y = yhat_lo - 0.1 + (y_top - yhat_lo + 0.2) * j / (4.0 * eval_ny - 1);
        const BValue bv = b_of_y(b, y);
        b_table.add_row({y, bv.value, bv.grid_truncated ? 1.0 : 0.0});
    }
    b_table.write((fs::path(out_dir) / "b_curve.csv").string(), format);

    TableWriter w_table;
    w_table.header = {"y", "value"};
    for (int j = 0; j < 4 * eval_ny; ++j) {
        const double y = yhat_lo - 0.5 + 1.0 * j / (4.0 * eval_ny - 1);
        w_table.add_row({y, val.w1d(y)});
    }
    w_table.write((fs::path(out_dir) / "w_curve.csv").string(), format);

    if (smooth_fit) {
        TableWriter sf;
        sf.header = {"z", "gap_value", "dy_at_boundary", "dz_gap"};
        for (std::size_t i = 2; i + 2 < b.z_grid.size(); i += std::max<std::size_t>(1, b.z_grid.size() / 10)) {
            const SmoothFitReport r = val.smooth_fit_diagnostic(b.z_grid[i]);
            sf.add_row({r.z, r.gap_value, r.dy_at_boundary, r.dz_gap});
        }
        sf.write((fs::path(out_dir) / "smooth_fit.csv").string(), format);
    }
    std::printf("eval: wrote u_surface, v_surface, b_curve, w_curve%s to %s\n",
                smooth_fit ? ", smooth_fit" : "", out_dir.c_str());
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
                 int threads, int paths_out) {
    Boundary b = require_cached(cfg, out_dir);
    const PolicySpec pol = PolicySpec::optimal(b);
    const auto& s = cfg.sim;
    for (int k = 0; k < paths_out; ++k) {
        const ControlledPath path = simulate_controlled(cfg.model, cfg.cost, s.x0, s.y0, pol,
                                                        s.horizon, s.dt, s.seed, k);
        char name[48];
        std::snprintf(name, sizeof(name), "path_%03d.csv", k);
        write_path_csv((fs::path(out_dir) / name).string(), path);
    }
    (void)format;
    CostEstimate est = estimate_cost(cfg.model, cfg.cost, pol, s.x0, s.y0, s.n_paths, s.horizon,
                                     s.dt, s.seed, threads);
    // ceiling flag over the exported paths
    bool below = true;
    for (int k = 0; k < paths_out && below; ++k) {
        const ControlledPath path = simulate_controlled(cfg.model, cfg.cost, s.x0, s.y0, pol,
                                                        s.horizon, s.dt, s.seed, k);
        for (std::size_t i = 0; i < path.X.size(); ++i)
            if (path.X[i] > b_of_y(b, path.Y[i]).value * (1.0 + 1e-12) + 1e-12) below = false;
    }
    std::printf("J(optimal-ceiling) = %s +- %s (tail bound %s)\n", fmt17(est.mean).c_str(),
                fmt17(est.stderr_).c_str(), fmt17(est.tail_bound).c_str());
    std::printf("X <= b(Y) on exported paths: %s\n", below ? "true" : "FALSE");
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg, const std::string& out_dir, int threads) {
    Boundary b = require_cached(cfg, out_dir);
    const auto& s = cfg.sim;
    const double by0 = b_of_y(b, s.y0).value;
    std::vector<PolicySpec> pols = {PolicySpec::optimal(b), PolicySpec::none(),
                                    PolicySpec::to_zero()};
    if (by0 > 0.0) {
        pols.push_back(PolicySpec::constant(0.5 * by0));
        pols.push_back(PolicySpec::constant(2.0 * by0));
    }
    const ComparisonReport rep = compare_policies(cfg.model, cfg.cost, pols, s.x0, s.y0,
                                                  s.n_paths, s.horizon, s.dt, s.seed, threads);
    std::ofstream out((fs::path(out_dir) / "comparison.json").string());
    out << comparison_report_json(rep, s.horizon, s.dt, s.n_paths) << '\n';
    std::printf("rank  policy                        mean            stderr\n");
    for (std::size_t r = 0; r < rep.ranking.size(); ++r) {
        const std::size_t i = rep.ranking[r];
        std::printf("%4zu  %-28s  %-14.8g  %-12.6g\n", r + 1, rep.names[i].c_str(),
                    rep.estimates[i].mean, rep.estimates[i].stderr_);
    }
    return kExitOk;
}

int cmd_density(const RunConfig& cfg, const std::string& out_dir, const std::string& format,
                std::vector<double> ts, double z0, double y0) {
    if (ts.empty()) ts = {0.1, 1.0, 5.0};
    TableWriter table;
    table.header = {"t", "v", "u", "density"};
    for (double t : ts) {
        const GaussianLaw2D law = zy_law(cfg.model, t, z0, y0);
        const double sv = std::sqrt(law.var_Z), su = std::sqrt(law.var_Y);
        const int n = 41;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = law.mean_Z + 4.0 * sv * (2.0 * i / (n - 1.0) - 1.0);
                const double u = law.mean_Y + 4.0 * su * (2.0 * j / (n - 1.0) - 1.0);
                table.add_row({t, v, u, transition_density(law, v, u)});
            }
    }
    table.write((fs::path(out_dir) / "density.csv").string(), format);
    std::printf("density: wrote slices at %zu times to %s\n", ts.size(), out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"debtceil: optimal debt-ceiling solver (free-boundary + Monte Carlo)"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".", format = "csv";
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int threads = 0;
    app.add_option("--config", config_path, "config file (key = value lines)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed_override, "override sim.seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--threads", threads, "worker-thread cap (0 = all cores)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* sub_validate = app.add_subcommand("validate", "check model parameters");
    auto* sub_solve = app.add_subcommand("solve", "solve y* and the free boundary, write cache");
    auto* sub_eval = app.add_subcommand("eval", "value surfaces u, v, b, w from the cache");
    bool smooth_fit = false;
    int eval_nz = 25, eval_ny = 9;
    sub_eval->add_flag("--smooth-fit", smooth_fit, "append the smooth-fit report");
    sub_eval->add_option("--eval-nz", eval_nz, "z resolution of value surfaces");
    sub_eval->add_option("--eval-ny", eval_ny, "y resolution of value surfaces");
    auto* sub_sim = app.add_subcommand("simulate", "simulate the optimal-ceiling policy");
    int paths_out = 3;
    sub_sim->add_option("--paths-out", paths_out, "number of path CSVs to export");
    auto* sub_cmp = app.add_subcommand("compare", "policy comparison with common random numbers");
    auto* sub_den = app.add_subcommand("density", "transition-density slices");
    std::vector<double> den_ts;
    double den_z0 = 0.0, den_y0 = 0.02;
    sub_den->add_option("--t", den_ts, "slice times");
    sub_den->add_option("--z0", den_z0, "initial z");
    sub_den->add_option("--y0", den_y0, "initial y");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config_file(config_path);
        if (seed_set) cfg.sim.seed = seed_override;
        fs::create_directories(out_dir);

        if (sub_validate->parsed()) return report_validation(validate_params(cfg.model, cfg.cost));
        if (sub_solve->parsed()) return cmd_solve(cfg, out_dir, format, threads);
        if (sub_eval->parsed()) {
            const ValidationReport vr = validate_params(cfg.model, cfg.cost);
            if (!vr.pass) return report_validation(vr);
            return cmd_eval(cfg, out_dir, format, smooth_fit, eval_nz, eval_ny);
        }
        if (sub_sim->parsed()) {
            const ValidationReport vr = validate_params(cfg.model, cfg.cost);
            if (!vr.pass) return report_validation(vr);
            return cmd_simulate(cfg, out_dir, format, threads, paths_out);
        }
        if (sub_cmp->parsed()) {
            const ValidationReport vr = validate_params(cfg.model, cfg.cost);
            if (!vr.pass) return report_validation(vr);
            return cmd_compare(cfg, out_dir, threads);
        }
        if (sub_den->parsed()) return cmd_density(cfg, out_dir, format, den_ts, den_z0, den_y0);
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const BracketError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        if (msg.find("cache") != std::string::npos) return kExitMissingArtifact;
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
