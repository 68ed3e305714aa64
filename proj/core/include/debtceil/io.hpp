#pragma once

#include <optional>
#include <string>

#include "debtceil/boundary.hpp"
#include "debtceil/policy.hpp"

namespace debtceil {

/// Shortest round-trip decimal (17 significant digits).
std::string fmt17(double v);

void write_boundary_csv(const std::string& path, const Boundary& b);
void write_path_csv(const std::string& path, const ControlledPath& p);

/// Versioned JSON cache. save overwrites; load returns nullopt when the file
/// is missing or malformed. load_boundary_cache does not check the digest;
/// callers compare against params_digest() for the active configuration.
void save_boundary_cache(const std::string& path, const Boundary& b);
std::optional<Boundary> load_boundary_cache(const std::string& path);

std::string comparison_report_json(const ComparisonReport& rep, double horizon, double dt,
                                   std::size_t n_paths);

}  // namespace debtceil
