#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rcb/experiments.hpp"
#include "rcb/model_io.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "rcb/rcr.hpp"
#include "rcb/typed_rcr.hpp"

using namespace rcb;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kCap = 3 };

struct Globals {
  int threads = 0;
  std::string out = ".";
  std::string format = "json";
  std::optional<double> tolerance;
};

struct ModelSource {
  std::string file;
  std::string grid;
  std::string tree;
  std::string graph;
  bool periodic = false;
  std::string kind = "ising";
  double J = 1.0;
  double a = 1.0;
  std::uint64_t seed = 1;
  std::string lambda;
  std::string bc;

  void add_to(CLI::App* app) {
    app->add_option("--model", file, "model file (JSON)");
    app->add_option("--grid", grid, "grid WxH instead of a model file");
    app->add_option("--tree", tree, "Cayley tree DEPTHxBRANCH");
    app->add_option("--graph", graph, "graph file {\"n\": N, \"bonds\": [...]}");
    app->add_flag("--periodic", periodic, "periodic grid");
    app->add_option("--template", kind, "template for --grid/--tree/--graph")
        ->check(CLI::IsMember({"ising", "hardcore", "ea_pm_j"}));
    app->add_option("--J", J, "coupling for ising and ea_pm_j");
    app->add_option("--a", a, "hard-core activity");
    app->add_option("--disorder-seed", seed, "seed of the ea_pm_j couplings");
    app->add_option("--lambda", lambda, "region, e.g. 0,2,4-6");
    app->add_option("--bc", bc, "boundary spins, e.g. 0=1,5=-1");
  }

  GibbsSpec<double> load() const {
    const int sources = !file.empty() + !grid.empty() + !tree.empty() + !graph.empty();
    if (sources != 1) throw CLI::ValidationError("model", "give exactly one of --model, --grid, --tree, --graph");
    GibbsSpec<double> spec;
    if (!file.empty()) {
      spec = load_spec(file);
    } else {
      nlohmann::json j;
      if (!grid.empty()) j["graph"] = {{"grid", grid}, {"periodic", periodic}};
      if (!tree.empty()) j["graph"] = {{"tree", tree}};
      if (!graph.empty()) j["graph"] = nlohmann::json::parse(std::ifstream(graph), nullptr, false);
      if (j["graph"].is_discarded()) fail(ErrorKind::InvalidArgument, "cannot read graph file '" + graph + "'");
      j["model"] = kind;
      j["J"] = J;
      j["a"] = a;
      j["seed"] = seed;
      spec = spec_from_json(j);
    }
    if (!bc.empty()) apply_boundary(spec, bc);
    if (!lambda.empty()) apply_region(spec, parse_region(lambda));
    validate(spec);
    return spec;
  }

  nlohmann::json describe() const {
    nlohmann::json j{{"model", file}, {"grid", grid}, {"tree", tree}, {"graph", graph}, {"periodic", periodic},
                     {"template", kind}, {"J", J}, {"a", a}, {"disorder_seed", seed}, {"lambda", lambda}, {"bc", bc}};
    return j;
  }
};

std::vector<double> site_values_row(const std::vector<int>& values, double tail) {
  std::vector<double> row(values.begin(), values.end());
  row.push_back(tail);
  return row;
}

std::vector<std::string> site_columns(const std::vector<int>& keys, const std::string& prefix, const std::string& tail) {
  std::vector<std::string> c;
  for (int k : keys) c.push_back(prefix + std::to_string(k));
  c.push_back(tail);
  return c;
}

RunResult gibbs_eval(const ModelSource& src) {
  const auto spec = src.load();
  RunResult r;
  r.experiment = "gibbs_eval";
  r.config = src.describe();
  const auto m = compile(spec);
  const auto w = configuration_weights(m);
  const double Z = w.sum();
  if (!(Z > 0.0)) fail(ErrorKind::AllForbidden, "every configuration is forbidden");
  const auto mu = FiniteDistribution<double>::normalized(m.space, w);
  r.exact("sites", double(m.space.dim()));
  r.exact("states", double(m.space.size()));
  r.exact("log_partition_function", std::log(Z));
  std::size_t support = 0;
  for (std::uint64_t c = 0; c < mu.size(); ++c) support += mu[c] > 0.0;
  r.exact("support", double(support));
  Table t{"marginals", {"vertex", "value", "probability"}, {}};
  std::vector<int> digits(m.space.dim());
  std::vector<std::vector<double>> marg(m.space.dim());
  for (std::size_t i = 0; i < marg.size(); ++i) marg[i].assign(m.space.radix(i), 0.0);
  for (std::uint64_t c = 0; c < mu.size(); ++c, m.space.next(digits))
    for (std::size_t i = 0; i < marg.size(); ++i) marg[i][digits[i]] += mu[c];
  for (std::size_t i = 0; i < marg.size(); ++i)
    for (int d = 0; d < m.space.radix(i); ++d)
      t.rows.push_back({double(m.space.keys()[i]), double(m.space.label(i, d)), marg[i][d]});
  r.tables.push_back(std::move(t));
  return r;
}

RunResult twocopy_rho(const ModelSource& src) {
  const auto spec = src.load();
  RunResult r;
  r.experiment = "twocopy_rho";
  r.config = src.describe();
  const auto tc = prepare_two_copy(spec);
  const auto rho = overlap_distribution(tc);
  Table t{"rho", site_columns(rho.space().keys(), "sigma_", "rho"), {}};
  for (std::uint64_t c : overlap_support(rho)) t.rows.push_back(site_values_row(rho.space().labels_of(c), rho[c]));
  r.exact("support", double(t.rows.size()));
  r.exact("total", rho.total());
  r.tables.push_back(std::move(t));
  return r;
}

RunResult twocopy_slice(const ModelSource& src, const std::string& sigma_text) {
  const auto spec = src.load();
  RunResult r;
  r.experiment = "twocopy_slice";
  r.config = src.describe();
  r.config["sigma"] = sigma_text;
  const auto tc = prepare_two_copy(spec);
  const auto sigma = parse_int_list(sigma_text);
  if (sigma.size() != spec.region.size())
    fail(ErrorKind::InvalidArgument, "--sigma needs " + std::to_string(spec.region.size()) + " values, one per site");
  const auto s = make_slice(tc, sigma);
  const auto law = nonoverlap_distribution(tc, s);
  const auto w = slice_weights(tc, s);
  r.exact("rho", w.sum());
  r.exact("overlap_sites", double(s.overlap_region.size()));
  r.exact("nonoverlap_sites", double(s.nonoverlap_region.size()));
  Table t{"nonoverlap", site_columns(law.space().keys(), "omega_", "probability"), {}};
  double asym = 0.0;
  std::vector<int> digits(law.space().dim()), mirror(digits.size());
  for (std::uint64_t c = 0; c < law.size(); ++c, law.space().next(digits)) {
    for (std::size_t i = 0; i < digits.size(); ++i) mirror[i] = s.reflection[i][digits[i]];
    asym = std::max(asym, std::abs(law[c] - law[law.space().encode(mirror)]));
    if (law[c] > 0.0) t.rows.push_back(site_values_row(law.space().labels_of(c), law[c]));
  }
  r.check_le("sigma_symmetry_defect", asym, 0.0, 1e-12);
  r.tables.push_back(std::move(t));
  return r;
}

std::vector<std::vector<LocalSet>> read_subsets(const std::string& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::Io, "cannot open '" + file + "'");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("bonds")) fail(ErrorKind::InvalidArgument, "subset file needs {\"bonds\": [[mask, ...], ...]}");
  try {
    return j.at("bonds").get<std::vector<std::vector<LocalSet>>>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::InvalidArgument, "subset masks must be nonnegative integers");
  }
}

RunResult rcr_solve(const ModelSource& src, const std::string& subsets, double tol) {
  const auto spec = src.load();
  RunResult r;
  r.experiment = "rcr_solve";
  r.config = src.describe();
  r.config["subsets"] = subsets;
  const auto m = compile(spec);
  bool degenerate = false;
  const auto base = subsets.empty() ? monotone_base(m) : subset_base(m, read_subsets(subsets), &degenerate);
  Table t{"base", {"bond", "subset", "probability", "active"}, {}};
  for (const auto& rb : base.bonds)
    for (const auto& o : rb.options) t.rows.push_back({double(rb.bond), double(o.subset), o.probability, double(rb.is_active(o.subset))});
  r.tables.push_back(std::move(t));
  r.exact("bonds", double(base.bonds.size()));
  r.claim("non_unique_solution", degenerate);
  if (m.space.fits(EnumerationLimits{}.max_states)) {
    const double err = max_abs_difference(reconstruct(base), gibbs_measure(m));
    r.check_le("reconstruction_error", err, tol);
  }
  return r;
}

RunResult rcr_check(const ModelSource& src, double tol) {
  const auto spec = src.load();
  RunResult r;
  r.experiment = "rcr_check";
  r.config = src.describe();
  const auto m = compile(spec);
  const auto mu = gibbs_measure(m);
  r.check_le("monotone_roundtrip", max_abs_difference(reconstruct(monotone_base(m)), mu), tol);
  bool pairs = true;
  for (const auto& b : spec.graph.bonds()) pairs = pairs && b.size() == 2;
  if (pairs && 2 * m.space.dim() <= 24) {
    const auto doubled = compile(doubled_spec(spec));
    try {
      const auto typed = mns_base(doubled);
      const auto product = gibbs_measure(doubled);
      r.check_le("blue_red_roundtrip", max_abs_difference(reconstruct_typed(typed), product), tol);
      r.check_le("blue_red_equals_monotone", max_abs_difference(reconstruct_typed(typed), reconstruct(monotone_base(doubled))), tol);
    } catch (const Error& e) {
      r.warnings.push_back(std::string("blue/red base skipped: ") + e.what());
    }
  }
  return r;
}

RunResult perc_ibar(const ModelSource& src, const std::string& A_text, const std::string& B_text,
                    std::optional<std::uint64_t> mc, std::optional<std::uint64_t> seed, int tasks, int burn_in) {
  const auto spec = src.load();
  const Region A = parse_region(A_text), B = parse_region(B_text);
  RunResult r;
  r.experiment = "perc_ibar";
  r.config = src.describe();
  r.config["A"] = A_text;
  r.config["B"] = B_text;
  if (mc) {
    r.config["mc"] = *mc;
    r.config["seed"] = *seed;
    r.config["tasks"] = tasks;
    r.config["burn_in"] = burn_in;
    McOptions opt;
    opt.samples = *mc;
    opt.seed = *seed;
    opt.tasks = tasks;
    opt.burn_in = burn_in;
    const auto est = integrated_connection_mc(spec, A, B, opt);
    r.estimate("integrated_connection", est.value, est.standard_error);
    r.exact("samples", double(est.samples));
    r.exact("max_tau", est.max_tau);
    if (est.max_tau * 100.0 > double(est.samples) / tasks)
      r.warnings.push_back("autocorrelation time is large against the per-task sample count");
    return r;
  }
  const auto s = support_pair_bound(spec, A, B);
  r.exact("integrated_connection", s.connection);
  r.exact("worst_event", s.worst_event);
  r.exact("worst_covariance", s.worst_covariance);
  r.exact("covariance_bound", s.covariance_bound);
  r.check_le("event_bound", s.worst_event, s.connection, 1e-12);
  r.check_le("covariance_bound", s.worst_covariance, s.covariance_bound, 1e-12);
  return r;
}

std::vector<double> parse_range(const std::string& text) {
  // a:b:c
  std::vector<double> v;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ':');) v.push_back(std::stod(item));
  if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0]) throw CLI::ValidationError("--J-grid", "expected min:max:step");
  return v;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) v.push_back(std::stod(item));
  return v;
}

void report(const RunResult& r, const Globals& g) {
  for (const auto& v : r.verdicts)
    std::cerr << (v.bound ? "bound " : "claim ") << v.name << ": " << (v.holds ? "holds" : "FAILS") << " ("
              << format_number(v.lhs) << " vs " << format_number(v.rhs) << ")\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (g.out == "-") {
    if (g.format != "json") throw CLI::ValidationError("--out", "'-' writes JSON only");
    std::cout << to_json_text(r) << "\n";
    return;
  }
  for (const auto& p : emit(r, g.out, g.format == "csv" ? OutputFormat::Csv : OutputFormat::Json))
    std::cerr << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-cluster bounds for Gibbs fields and their two-copy decompositions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config; command-line flags override it");
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "output directory, or - for JSON on stdout");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tolerance", g.tolerance, "override the check tolerance");

  std::function<RunResult()> job;
  ModelSource src;

  auto* gibbs = app.add_subcommand("gibbs", "single-copy Gibbs measure")->require_subcommand(1);
  auto* eval = gibbs->add_subcommand("eval", "partition function and marginals");
  src.add_to(eval);
  eval->callback([&] { job = [&] { return gibbs_eval(src); }; });

  auto* twocopy = app.add_subcommand("twocopy", "two-copy overlap decomposition")->require_subcommand(1);
  auto* rho = twocopy->add_subcommand("rho", "overlap law");
  src.add_to(rho);
  rho->callback([&] { job = [&] { return twocopy_rho(src); }; });
  auto* slice = twocopy->add_subcommand("slice", "non-overlap law of one slice");
  src.add_to(slice);
  std::string sigma;
  slice->add_option("--sigma", sigma, "per-site spin sums, e.g. 0,2,-2")->required();
  slice->callback([&] { job = [&] { return twocopy_slice(src, sigma); }; });

  auto* rcr = app.add_subcommand("rcr", "random-cluster representations")->require_subcommand(1);
  auto* solve = rcr->add_subcommand("solve", "base dump");
  src.add_to(solve);
  std::string subsets;
  bool monotone = false;
  auto* mono_flag = solve->add_flag("--monotone", monotone, "monotone base (default)");
  solve->add_option("--subsets", subsets, "candidate subsets file {\"bonds\": [[mask, ...], ...]}")->excludes(mono_flag);
  solve->callback([&] { job = [&] { return rcr_solve(src, subsets, g.tolerance.value_or(1e-10)); }; });
  auto* check = rcr->add_subcommand("check", "reconstruct the target measure");
  src.add_to(check);
  bool roundtrip = true;
  check->add_flag("--roundtrip", roundtrip, "round-trip check (default)");
  check->callback([&] { job = [&] { return rcr_check(src, g.tolerance.value_or(1e-10)); }; });

  auto* perc = app.add_subcommand("perc", "integrated connection probability")->require_subcommand(1);
  auto* ibar = perc->add_subcommand("ibar", "integrated P(A <-> B)");
  src.add_to(ibar);
  std::string A, B;
  std::optional<std::uint64_t> mc, mc_seed;
  int tasks = 32, burn_in = 500;
  bool exact = false;
  ibar->add_option("--A", A, "first site set")->required();
  ibar->add_option("--B", B, "second site set")->required();
  auto* exact_flag = ibar->add_flag("--exact", exact, "exact enumeration (default)");
  ibar->add_option("--mc", mc, "Monte Carlo with N samples")->excludes(exact_flag);
  ibar->add_option("--seed", mc_seed, "master seed (required with --mc)");
  ibar->add_option("--tasks", tasks, "independent Monte Carlo tasks")->check(CLI::Range(2, 1 << 20));
  ibar->add_option("--burn-in", burn_in, "sweeps before sampling")->check(CLI::NonNegativeNumber);
  ibar->callback([&] {
    if (mc && !mc_seed) throw CLI::ValidationError("--seed", "--mc needs an explicit --seed");
    job = [&] { return perc_ibar(src, A, B, mc, mc_seed, tasks, burn_in); };
  });

  auto* exp = app.add_subcommand("exp", "reference experiments")->require_subcommand(1);
  double J12 = 1.0, J23 = 1.0;
  for (const char* name : {"example1", "example2"}) {
    auto* e = exp->add_subcommand(name, name == std::string("example1") ? "three-spin counterexample"
                                                                         : "its two-copy version");
    e->add_option("--J12", J12, "first coupling");
    e->add_option("--J23", J23, "second coupling");
    const bool first = name == std::string("example1");
    e->callback([&, first] { job = [&, first] { return first ? run_example1(J12, J23) : run_example2(J12, J23); }; });
  }

  SweepOptions sw;
  auto* sweep = exp->add_subcommand("sweep", "covariance bound on random models");
  sweep->add_option("--n", sw.models, "number of models")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sw.seed, "master seed");
  sweep->add_option("--max-sites", sw.max_sites, "largest region")->check(CLI::Range(1, 8));
  sweep->add_option("--potential-bound", sw.potential_bound, "|phi| bound");
  sweep->callback([&] {
    if (g.tolerance) sw.tolerance = *g.tolerance;
    job = [&] { return covariance_sweep(sw); };
  });

  SymmetrySuiteOptions sym;
  auto* symmetry = exp->add_subcommand("symmetry", "exact slice symmetry suite");
  symmetry->add_option("--n", sym.instances, "instances")->check(CLI::PositiveNumber);
  symmetry->add_option("--seed", sym.seed, "master seed");
  symmetry->add_option("--max-sites", sym.max_sites, "largest region")->check(CLI::Range(1, 12));
  symmetry->callback([&] { job = [&] { return symmetry_suite(sym); }; });

  double rt_J = 0.8;
  std::uint64_t rt_seed = 5;
  auto* rt = exp->add_subcommand("roundtrip", "representation round trips");
  rt->add_option("--J", rt_J, "EA coupling");
  rt->add_option("--seed", rt_seed, "disorder seed");
  rt->callback([&] { job = [&] { return rcr_roundtrips(rt_J, rt_seed); }; });

  int fk_spins = 10;
  auto* fk = exp->add_subcommand("fk", "FK identity on chains and grids");
  fk->add_option("--max-spins", fk_spins, "largest graph")->check(CLI::Range(2, 16));
  fk->callback([&] { job = [&] { return fk_identity(fk_spins); }; });

  CayleyOptions cy;
  std::string J_grid;
  auto* cayley = exp->add_subcommand("cayley", "binary tree fixed points and bound");
  cayley->add_option("--J-grid", J_grid, "min:max:step");
  cayley->callback([&] {
    if (!J_grid.empty()) {
      const auto v = parse_range(J_grid);
      cy.J_min = v[0];
      cy.J_max = v[1];
      cy.J_step = v[2];
    }
    job = [&] { return run_cayley(cy); };
  });

  HardcoreOptions hc;
  std::string hc_grid, hc_scan, hc_scan_grid;
  auto* hardcore = exp->add_subcommand("hardcore", "disagreement equivalence");
  hardcore->add_option("--a", hc.a, "activity")->check(CLI::NonNegativeNumber);
  hardcore->add_option("--grid", hc_grid, "interior WxH for the framed comparison");
  hardcore->add_option("--scan", hc_scan, "activities for the threshold table, comma separated");
  hardcore->add_option("--scan-grid", hc_scan_grid, "interior WxH of the scan");
  hardcore->callback([&] {
    if (!hc_grid.empty()) std::tie(hc.width, hc.height) = parse_dims(hc_grid);
    if (!hc_scan_grid.empty()) std::tie(hc.scan_width, hc.scan_height) = parse_dims(hc_scan_grid);
    if (!hc_scan.empty()) hc.scan = parse_doubles(hc_scan);
    job = [&] { return hardcore_disagreement(hc); };
  });

  EaOptions ea;
  auto* eacmd = exp->add_subcommand("ea", "two-copy EA blue/red bonds");
  eacmd->add_option("--L", ea.L, "side")->check(CLI::Range(2, 4096));
  eacmd->add_option("--J", ea.J, "coupling magnitude");
  eacmd->add_option("--beta", ea.beta, "inverse temperature");
  eacmd->add_option("--seeds", ea.realizations, "disorder realizations")->check(CLI::PositiveNumber);
  eacmd->add_option("--seed", ea.seed, "master seed");
  eacmd->add_option("--burn-in", ea.burn_in, "sweeps")->check(CLI::NonNegativeNumber);
  eacmd->add_option("--samples", ea.samples, "samples per realization")->check(CLI::Range(32, 1 << 28));
  eacmd->add_option("--gap", ea.gap, "sweeps between samples (0 = auto)")->check(CLI::NonNegativeNumber);
  eacmd->add_flag("--periodic", ea.periodic, "periodic boundary");
  eacmd->callback([&] { job = [&] { return ea_mns_percolation(ea); }; });

  EaCrossCheckOptions xc;
  auto* cross = exp->add_subcommand("ea-check", "2x2 sampled blue/red law against the exact one");
  cross->add_option("--J", xc.J, "coupling magnitude");
  cross->add_option("--samples", xc.samples, "total samples")->check(CLI::PositiveNumber);
  cross->add_option("--seed", xc.seed, "master seed");
  cross->add_option("--tasks", xc.tasks, "independent tasks")->check(CLI::Range(2, 1 << 16));
  cross->callback([&] { job = [&] { return ea_cross_check(xc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (g.threads > 0) set_num_threads(g.threads);
    const RunResult r = job();
    report(r, g);
    return r.bounds_hold() ? kOk : kViolation;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::TooLarge ? kCap : kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
    return kUsage;
  }
}
