#include "debtceil/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace debtceil {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
    return x;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "delta") cfg.model.delta = to_double(key, val);
        else if (key == "g") cfg.model.g = to_double(key, val);
        else if (key == "a") cfg.model.a = to_double(key, val);
        else if (key == "theta") cfg.model.theta = to_double(key, val);
        else if (key == "sigma") cfg.model.sigma = to_double(key, val);
        else if (key == "rho") cfg.model.rho = to_double(key, val);
        else if (key == "kappa") cfg.model.kappa = to_double(key, val);
        else if (key == "cost.c") cfg.cost.c = to_double(key, val);
        else if (key == "cost.gamma") cfg.cost.gamma = to_double(key, val);
        else if (key == "cost.m") cfg.cost.m = to_double(key, val);
        else if (key == "solver.z_min") cfg.solver.z_min = to_double(key, val);
        else if (key == "solver.z_max") cfg.solver.z_max = to_double(key, val);
        else if (key == "solver.n_z") cfg.solver.n_z = static_cast<int>(to_int(key, val));
        else if (key == "solver.t_max") cfg.solver.t_max = to_double(key, val);
        else if (key == "solver.n_t") cfg.solver.n_t = static_cast<int>(to_int(key, val));
        else if (key == "solver.n_v") cfg.solver.n_v = static_cast<int>(to_int(key, val));
        else if (key == "solver.picard_tol") cfg.solver.picard_tol = to_double(key, val);
        else if (key == "solver.picard_damping") cfg.solver.picard_damping = to_double(key, val);
        else if (key == "solver.max_iter") cfg.solver.max_iter = static_cast<int>(to_int(key, val));
        else if (key == "sim.x0") cfg.sim.x0 = to_double(key, val);
        else if (key == "sim.y0") cfg.sim.y0 = to_double(key, val);
        else if (key == "sim.horizon") cfg.sim.horizon = to_double(key, val);
        else if (key == "sim.dt") cfg.sim.dt = to_double(key, val);
        else if (key == "sim.n_paths") cfg.sim.n_paths = static_cast<std::size_t>(to_int(key, val));
        else if (key == "sim.seed") cfg.sim.seed = static_cast<std::uint64_t>(to_int(key, val));
        else
            throw std::invalid_argument("config: unknown key '" + key + "' at line " +
                                        std::to_string(lineno));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace debtceil
