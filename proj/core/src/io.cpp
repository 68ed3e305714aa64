#include "debtceil/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace debtceil {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_boundary_csv(const std::string& path, const Boundary& b) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "z,yhat,theta_bound,residual\n";
    for (std::size_t i = 0; i < b.z_grid.size(); ++i)
        out << fmt17(b.z_grid[i]) << ',' << fmt17(b.yhat[i]) << ',' << fmt17(b.theta_curve[i])
            << ',' << fmt17(b.residual.empty() ? 0.0 : b.residual[i]) << '\n';
}

void write_path_csv(const std::string& path, const ControlledPath& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,X,Y,nu_cum,cost_running,intervention_cost_running\n";
    for (std::size_t i = 0; i < p.t_grid.size(); ++i)
        out << fmt17(p.t_grid[i]) << ',' << fmt17(p.X[i]) << ',' << fmt17(p.Y[i]) << ','
            << fmt17(p.nu_cum[i]) << ',' << fmt17(p.cost_running[i]) << ','
            << fmt17(p.intervention_cost_running[i]) << '\n';
}

namespace {

json params_json(const ModelParams& p) {
    return {{"delta", p.delta}, {"g", p.g},        {"a", p.a},     {"theta", p.theta},
            {"sigma", p.sigma}, {"rho", p.rho},    {"kappa", p.kappa}};
}

json cost_json(const CostSpec& c) { return {{"c", c.c}, {"gamma", c.gamma}, {"m", c.m}}; }

json settings_json(const SolverSettings& s) {
    return {{"z_min", s.z_min},
            {"z_max", s.z_max},
            {"n_z", s.n_z},
            {"t_max", s.t_max},
            {"n_t", s.n_t},
            {"n_v", s.n_v},
            {"picard_tol", s.picard_tol},
            {"picard_damping", s.picard_damping},
            {"max_iter", s.max_iter}};
}

}  // namespace

void save_boundary_cache(const std::string& path, const Boundary& b) {
    json j;
    j["format"] = "debtceil-boundary-cache";
    j["version"] = 1;
    j["digest"] = b.params_digest;
    j["params"] = params_json(b.params);
    j["cost"] = cost_json(b.cost);
    j["settings"] = settings_json(b.settings);
    j["z_grid"] = b.z_grid;
    j["yhat"] = b.yhat;
    j["theta_curve"] = b.theta_curve;
    j["residual"] = b.residual;
    j["y_star_finite"] = std::isfinite(b.y_star);
    j["y_star"] = std::isfinite(b.y_star) ? b.y_star : 0.0;
    j["residual_max"] = b.residual_max;
    j["residual_rel_max"] = b.residual_rel_max;
    j["sweeps"] = b.sweeps;
    j["converged"] = b.converged;
    j["t_max_used"] = b.t_max_used;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(1) << '\n';
}

std::optional<Boundary> load_boundary_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
        if (j.at("format") != "debtceil-boundary-cache" || j.at("version") != 1)
            return std::nullopt;
        Boundary b;
        b.params_digest = j.at("digest").get<std::string>();
        const auto& pj = j.at("params");
        b.params.delta = pj.at("delta");
        b.params.g = pj.at("g");
        b.params.a = pj.at("a");
        b.params.theta = pj.at("theta");
        b.params.sigma = pj.at("sigma");
        b.params.rho = pj.at("rho");
        b.params.kappa = pj.at("kappa");
        const auto& cj = j.at("cost");
        b.cost.c = cj.at("c");
        b.cost.gamma = cj.at("gamma");
        b.cost.m = cj.at("m");
        const auto& sj = j.at("settings");
        b.settings.z_min = sj.at("z_min");
        b.settings.z_max = sj.at("z_max");
        b.settings.n_z = sj.at("n_z");
        b.settings.t_max = sj.at("t_max");
        b.settings.n_t = sj.at("n_t");
        b.settings.n_v = sj.at("n_v");
        b.settings.picard_tol = sj.at("picard_tol");
        b.settings.picard_damping = sj.at("picard_damping");
        b.settings.max_iter = sj.at("max_iter");
        b.z_grid = j.at("z_grid").get<std::vector<double>>();
        b.yhat = j.at("yhat").get<std::vector<double>>();
        b.theta_curve = j.at("theta_curve").get<std::vector<double>>();
        b.residual = j.at("residual").get<std::vector<double>>();
        b.y_star = j.at("y_star_finite").get<bool>() ? j.at("y_star").get<double>() : kNegInf;
        b.residual_max = j.at("residual_max");
        b.residual_rel_max = j.at("residual_rel_max");
        b.sweeps = j.at("sweeps");
        b.converged = j.at("converged");
        b.t_max_used = j.at("t_max_used");
        return b;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

std::string comparison_report_json(const ComparisonReport& rep, double horizon, double dt,
                                   std::size_t n_paths) {
    json j;
    j["x0"] = rep.x0;
    j["y0"] = rep.y0;
    j["seed"] = rep.seed;
    j["horizon"] = horizon;
    j["dt"] = dt;
    j["n_paths"] = n_paths;
    json pols = json::array();
    for (std::size_t i = 0; i < rep.names.size(); ++i) {
        const auto& e = rep.estimates[i];
        pols.push_back({{"name", rep.names[i]},
                        {"mean", e.mean},
                        {"stderr", e.stderr_},
                        {"tail_bound", e.tail_bound},
                        {"dt_bias", e.dt_bias}});
    }
    j["policies"] = pols;
    json diffs = json::array();
    for (const auto& d : rep.diffs)
        diffs.push_back({{"i", d.i},
                         {"j", d.j},
                         {"names", {rep.names[d.i], rep.names[d.j]}},
                         {"mean", d.mean},
                         {"se", d.se}});
    j["pairwise_diffs"] = diffs;
    j["ranking"] = rep.ranking;
    return j.dump(1);
}

}  // namespace debtceil
