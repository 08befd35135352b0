#include "rcb/model_io.hpp"

#include <fstream>
#include <sstream>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"

namespace rcb {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::Io, "cannot open '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, "'" + file.string() + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::InvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T need(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
  return get<T>(j, key, T{});
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), "expected an integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

Hypergraph graph_from_json(const json& j) {
  require(j.is_object(), "graph must be an object");
  if (j.contains("grid")) {
    const auto [w, h] = parse_dims(need<std::string>(j, "grid"));
    require(w >= 1 && h >= 1, "grid sides must be positive");
    return build_grid(w, h, get<bool>(j, "periodic", false));
  }
  if (j.contains("path")) return build_path(need<int>(j, "path"));
  if (j.contains("tree")) {
    const auto [depth, branching] = parse_dims(need<std::string>(j, "tree"));
    return build_cayley_tree(depth, branching);
  }
  const int n = need<int>(j, "n");
  require(n >= 1, "graph needs at least one vertex");
  std::vector<Hyperbond> bonds;
  for (const auto& b : need<json>(j, "bonds")) {
    std::vector<Vertex> vs;
    try {
      vs = b.get<std::vector<Vertex>>();
    } catch (const json::exception&) {
      fail(ErrorKind::InvalidArgument, "each bond must be a list of vertex ids");
    }
    for (Vertex v : vs) require(v >= 0 && v < n, "bond vertex " + std::to_string(v) + " out of range");
    bonds.push_back(make_bond(std::move(vs)));
  }
  return Hypergraph(n, std::move(bonds));
}

Hypergraph load_graph(const std::filesystem::path& file) { return graph_from_json(read_json(file)); }

GibbsSpec<double> spec_from_json(const json& j) {
  require(j.is_object(), "model must be an object");
  const auto model = need<std::string>(j, "model");
  GibbsSpec<double> spec;
  if (model == "example1") {
    spec = example1_spec(get<double>(j, "J12", 1.0), get<double>(j, "J23", 1.0));
  } else {
    const Hypergraph g = graph_from_json(need<json>(j, "graph"));
    if (model == "ising") {
      if (j.contains("couplings")) {
        const auto J = need<std::vector<double>>(j, "couplings");
        require(J.size() == g.num_bonds(), "need one coupling per bond");
        spec = ising_spec(g, J);
      } else {
        spec = ising_spec(g, get<double>(j, "J", 1.0));
      }
    } else if (model == "ea_pm_j") {
      spec = ising_spec(g, quenched_couplings(g, get<double>(j, "J", 1.0), get<std::uint64_t>(j, "seed", 1),
                                              get<std::uint64_t>(j, "realization", 0))
                               .J);
    } else if (model == "hardcore") {
      spec = hardcore_spec(g, get<double>(j, "a", 1.0));
    } else if (model == "table") {
      spec.graph = g;
      spec.alphabet = make_alphabet(need<std::vector<int>>(j, "alphabet"));
      const auto& tables = need<json>(j, "tables");
      require(tables.is_array() && tables.size() == g.num_bonds(), "need one table per bond");
      std::vector<std::vector<Potential>> pots;
      for (const auto& t : tables) {
        require(t.is_array(), "each table must be a list");
        auto& row = pots.emplace_back();
        for (const auto& e : t) {
          if (e.is_string() && e.get<std::string>() == "forbidden")
            row.push_back(Potential::forbidden());
          else if (e.is_number())
            row.push_back(Potential::finite(e.get<double>()));
          else
            fail(ErrorKind::InvalidArgument, "table entries are numbers or \"forbidden\"");
        }
      }
      spec.interaction = from_potentials(pots);
      spec.region = all_vertices(g);
    } else {
      fail(ErrorKind::InvalidArgument,
           "unknown model '" + model + "' (expected ising, ea_pm_j, hardcore, example1 or table)");
    }
  }
  if (j.contains("boundary")) {
    const auto& bc = need<json>(j, "boundary");
    require(bc.is_object(), "boundary must map vertex ids to spin values");
    std::string text;
    for (const auto& [v, value] : bc.items()) {
      require(value.is_number_integer(), "boundary values must be integers");
      text += v + "=" + std::to_string(value.get<int>()) + ",";
    }
    apply_boundary(spec, text);
  }
  if (j.contains("region")) apply_region(spec, make_region(need<std::vector<int>>(j, "region")));
  validate(spec);
  return spec;
}

GibbsSpec<double> load_spec(const std::filesystem::path& file) { return spec_from_json(read_json(file)); }

Region parse_region(const std::string& text) {
  std::vector<Vertex> out;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_int(item));
    } else {
      const int lo = parse_int(item.substr(0, dash)), hi = parse_int(item.substr(dash + 1));
      require(lo <= hi, "empty range '" + item + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  require(!out.empty(), "empty vertex list");
  return make_region(out);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int(item));
  return out;
}

void apply_boundary(GibbsSpec<double>& spec, const std::string& text) {
  spec.boundary.clear();
  Region fixed;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    require(eq != std::string::npos, "boundary entries look like vertex=value, got '" + item + "'");
    const int v = parse_int(item.substr(0, eq));
    const int value = parse_int(item.substr(eq + 1));
    require(v >= 0 && v < spec.graph.num_vertices(), "boundary vertex " + std::to_string(v) + " out of range");
    const int idx = spec.alphabet.index_of(value);
    require(idx >= 0, "boundary value " + std::to_string(value) + " is not in the alphabet");
    spec.boundary[v] = idx;
    fixed.push_back(v);
  }
  spec.region = region_difference(spec.region, make_region(fixed));
  spec.domains.clear();
}

void apply_region(GibbsSpec<double>& spec, const Region& region) {
  for (Vertex v : region) {
    require(v >= 0 && v < spec.graph.num_vertices(), "region vertex " + std::to_string(v) + " out of range");
    require(!spec.boundary.count(v), "region vertex " + std::to_string(v) + " carries a boundary value");
  }
  spec.region = region;
  spec.domains.clear();
}

}  // namespace rcb
