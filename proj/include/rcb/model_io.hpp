#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcb/gibbs.hpp"

namespace rcb {

/// Graph description: {"n": N, "bonds": [[v, ...], ...]}, {"grid": "WxH",
/// "periodic": bool}, {"path": N} or {"tree": "DEPTHxBRANCH"}.
Hypergraph graph_from_json(const nlohmann::json& j);
Hypergraph load_graph(const std::filesystem::path& file);

/// Model description. Keys:
///   graph     graph description (not needed for example1)
///   model     "ising" (J or couplings), "ea_pm_j" (J, seed, realization),
///             "hardcore" (a), "example1" (J12, J23) or "table"
///   alphabet  spin values, table models only
///   tables    per-bond potentials phi (weight e^phi) or "forbidden", local
///             index mixed radix over sorted vertices, first least significant
///   region    vertex list; default every vertex not in the boundary
///   boundary  {"vertex": spin value}
GibbsSpec<double> spec_from_json(const nlohmann::json& j);
GibbsSpec<double> load_spec(const std::filesystem::path& file);

/// "0,3,5-7" -> {0, 3, 5, 6, 7}.
Region parse_region(const std::string& text);
/// Comma-separated integers, signs allowed.
std::vector<int> parse_int_list(const std::string& text);
/// "v=value,..." with spin values; replaces the spec's boundary and drops
/// those vertices from the region.
void apply_boundary(GibbsSpec<double>& spec, const std::string& text);
/// Restricts the region; vertices must not carry a boundary value.
void apply_region(GibbsSpec<double>& spec, const Region& region);

}  // namespace rcb
