#include <bit>
#include <cmath>
#include <limits>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"
#include "rcb/random_models.hpp"

namespace rcb {

double worst_event_value(const Eigen::MatrixXd& D) {
  const Eigen::MatrixXd M = D.rows() <= D.cols() ? D : Eigen::MatrixXd(D.transpose());
  const auto rows = static_cast<int>(M.rows());
  require(rows <= 24, "event enumeration limited to 24 outcomes on the smaller side");
  Eigen::VectorXd col = Eigen::VectorXd::Zero(M.cols());
  double best = 0.0;
  // Gray-code walk over row subsets: one row enters or leaves per step
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << rows); ++k) {
    const int bit = std::countr_zero(k);
    const std::uint64_t gray = k ^ (k >> 1);
    if ((gray >> bit) & 1u)
      col += M.row(bit).transpose();
    else
      col -= M.row(bit).transpose();
    best = std::max(best, col.cwiseMax(0.0).sum());
  }
  return best;
}

namespace {

// Two-copy data shared by every support pair of one spec.
class PairBounds {
 public:
  explicit PairBounds(const GibbsSpec<double>& spec)
      : tc_(prepare_two_copy(spec)), letters_(static_cast<double>(spec.alphabet.size())) {
    const auto irc = integrated_rc(tc_);
    const auto& space = tc_.model.space;
    n_ = space.dim();
    require(n_ <= 20, "support pairs limited to 20 sites");
    coord_.assign(static_cast<std::size_t>(std::max(irc.geometry.num_vertices, spec.graph.num_vertices())), -1);
    for (std::size_t i = 0; i < n_; ++i) coord_[space.keys()[i]] = static_cast<int>(i);
    // cluster masks (region coordinates) of every pattern with positive mass
    for (std::uint64_t code = 0; code < irc.patterns.size(); ++code) {
      const double p = irc.patterns[code];
      if (p == 0.0) continue;
      const auto c = clusters(irc.geometry, unpack_pattern(code, irc.geometry.size()));
      std::vector<std::uint32_t> by_root(c.root.size(), 0);
      for (std::size_t v = 0; v < c.root.size(); ++v)
        if (c.root[v] >= 0 && coord_[v] >= 0) by_root[c.root[v]] |= std::uint32_t{1} << coord_[v];
      Pattern pc{p, {}};
      for (auto m : by_root)
        if (m) pc.masks.push_back(m);
      patterns_.push_back(std::move(pc));
    }
    digits_.assign(tc_.mu.size(), std::vector<int>(n_));
    for (std::uint64_t c = 0; c < tc_.mu.size(); ++c) space.decode(c, digits_[c]);
  }

  std::size_t sites() const { return n_; }

  std::uint32_t mask_of(const Region& r) const {
    std::uint32_t m = 0;
    for (Vertex v : r) {
      require(v >= 0 && static_cast<std::size_t>(v) < coord_.size() && coord_[v] >= 0,
              "vertex " + std::to_string(v) + " is not in the region");
      m |= std::uint32_t{1} << coord_[v];
    }
    return m;
  }

  SupportPairBound bound(std::uint32_t A, std::uint32_t B) const {
    require(A != 0 && B != 0 && (A & B) == 0, "supports must be nonempty and disjoint");
    const auto& space = tc_.model.space;
    auto index_of = [&](const std::vector<int>& d, std::uint32_t support) {
      std::size_t idx = 0, stride = 1;
      for (std::size_t i = 0; i < n_; ++i)
        if ((support >> i) & 1u) {
          idx += static_cast<std::size_t>(d[i]) * stride;
          stride *= static_cast<std::size_t>(space.radix(i));
        }
      return static_cast<Eigen::Index>(idx);
    };
    auto outcomes = [&](std::uint32_t support) {
      std::size_t count = 1;
      for (std::size_t i = 0; i < n_; ++i)
        if ((support >> i) & 1u) count *= static_cast<std::size_t>(space.radix(i));
      return static_cast<Eigen::Index>(count);
    };
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(outcomes(A), outcomes(B));
    for (std::uint64_t c = 0; c < tc_.mu.size(); ++c)
      if (tc_.mu[c] != 0.0) joint(index_of(digits_[c], A), index_of(digits_[c], B)) += tc_.mu[c];
    const Eigen::VectorXd pa = joint.rowwise().sum();
    const Eigen::VectorXd pb = joint.colwise().sum().transpose();

    SupportPairBound s;
    s.support_a = A;
    s.support_b = B;
    s.worst_event = worst_event_value(joint - pa * pb.transpose());
    s.worst_covariance = 4.0 * s.worst_event;
    for (const auto& pc : patterns_)
      for (auto m : pc.masks)
        if ((m & A) && (m & B)) {
          s.connection += pc.p;
          break;
        }
    s.covariance_bound = std::pow(letters_, std::popcount(A) + std::popcount(B)) * s.connection;
    return s;
  }

 private:
  struct Pattern {
    double p;
    std::vector<std::uint32_t> masks;
  };
  TwoCopyModel<double> tc_;
  double letters_;
  std::size_t n_ = 0;
  std::vector<int> coord_;
  std::vector<Pattern> patterns_;
  std::vector<std::vector<int>> digits_;
};

}  // namespace

std::vector<SupportPairBound> support_pair_bounds(const GibbsSpec<double>& spec) {
  const PairBounds pb(spec);
  std::vector<SupportPairBound> out;
  const std::uint32_t full = (std::uint32_t{1} << pb.sites()) - 1;
  for (std::uint32_t A = 1; A <= full; ++A)
    for (std::uint32_t B = A + 1; B <= full; ++B)
      if (!(A & B)) out.push_back(pb.bound(A, B));
  return out;
}

SupportPairBound support_pair_bound(const GibbsSpec<double>& spec, const Region& A, const Region& B) {
  const PairBounds pb(spec);
  return pb.bound(pb.mask_of(A), pb.mask_of(B));
}

RunResult covariance_sweep(const SweepOptions& opt) {
  RunResult r;
  r.experiment = "sweep";
  r.config = {{"models", opt.models},
              {"seed", opt.seed},
              {"max_sites", opt.max_sites},
              {"potential_bound", opt.potential_bound},
              {"tolerance", opt.tolerance}};
  RandomModelOptions ropt;
  ropt.max_sites = opt.max_sites;
  ropt.forbidden_probability = 0.0;

  struct ModelRow {
    int sites = 0, letters = 0, bonds = 0;
    std::size_t pairs = 0, event_violations = 0, covariance_violations = 0;
    double event_slack = std::numeric_limits<double>::infinity();
    double covariance_slack = std::numeric_limits<double>::infinity();
    double max_event = 0.0, max_connection = 0.0;
  };
  std::vector<ModelRow> rows(static_cast<std::size_t>(opt.models));
  parallel_for(rows.size(), [&](std::size_t k) {
    Philox4x32 rng = task_stream(opt.seed, k);
    GibbsSpec<double> spec;
    if (k == 0) {
      spec = example1_spec(1.0, 1.0);
    } else {
      spec = random_spec<double>(rng, ropt, exp_uniform_factor(opt.potential_bound));
      if (k == 1)
        for (auto& t : spec.interaction.factors) std::fill(t.begin(), t.end(), 1.0);
    }
    auto& row = rows[k];
    row.sites = static_cast<int>(spec.region.size());
    row.letters = static_cast<int>(spec.alphabet.size());
    row.bonds = static_cast<int>(spec.graph.num_bonds());
    for (const auto& s : support_pair_bounds(spec)) {
      ++row.pairs;
      if (s.worst_event > s.connection + opt.tolerance) ++row.event_violations;
      if (s.worst_covariance > s.covariance_bound + opt.tolerance) ++row.covariance_violations;
      row.event_slack = std::min(row.event_slack, s.connection - s.worst_event);
      row.covariance_slack = std::min(row.covariance_slack, s.covariance_bound - s.worst_covariance);
      row.max_event = std::max(row.max_event, s.worst_event);
      row.max_connection = std::max(row.max_connection, s.connection);
    }
  });

  Table t{"models",
          {"model", "sites", "letters", "bonds", "pairs", "event_violations", "covariance_violations", "event_slack",
           "covariance_slack", "max_event", "max_connection"},
          {}};
  std::size_t pairs = 0, ev = 0, cv = 0;
  double event_slack = std::numeric_limits<double>::infinity(), cov_slack = event_slack;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    pairs += row.pairs;
    ev += row.event_violations;
    cv += row.covariance_violations;
    event_slack = std::min(event_slack, row.event_slack);
    cov_slack = std::min(cov_slack, row.covariance_slack);
    t.rows.push_back({double(k), double(row.sites), double(row.letters), double(row.bonds), double(row.pairs),
                      double(row.event_violations), double(row.covariance_violations), row.event_slack,
                      row.covariance_slack, row.max_event, row.max_connection});
  }
  r.tables.push_back(std::move(t));
  r.exact("models", double(rows.size()));
  r.exact("support_pairs", double(pairs));
  r.exact("worst_event_slack", event_slack);
  r.exact("worst_covariance_slack", cov_slack);
  r.check_le("event_bound_violations", double(ev), 0.0);
  r.check_le("covariance_bound_violations", double(cv), 0.0);
  if (rows.size() > 1)
    r.claim("zero_interaction_fixture_vanishes", rows[1].max_event < 1e-15 && rows[1].max_connection == 0.0,
            rows[1].max_event, rows[1].max_connection);
  return r;
}

}  // namespace rcb
