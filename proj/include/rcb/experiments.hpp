#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rcb/gibbs.hpp"
#include "rcb/lattice.hpp"
#include "rcb/report.hpp"

namespace rcb {

// ---- worked examples -------------------------------------------------------

/// Three spins on a path, one restricted configuration per bond: the
/// single-copy activity cannot bound the 1-3 correlation.
RunResult run_example1(double J12 = 1.0, double J23 = 1.0);

/// The same model as two copies: every overlap slice, the integrated
/// connection probability and both covariance bounds.
RunResult run_example2(double J12 = 1.0, double J23 = 1.0);

// ---- covariance bound sweep ------------------------------------------------

struct SweepOptions {
  int models = 500;
  std::uint64_t seed = 7;
  int max_sites = 6;
  double potential_bound = 3.0;
  double tolerance = 1e-9;
};

/// Worst case of one support pair. Supports are bitmasks over region
/// coordinates.
struct SupportPairBound {
  std::uint32_t support_a = 0;
  std::uint32_t support_b = 0;
  double worst_event = 0.0;       // sup over events of |mu(A and B) - mu(A) mu(B)|
  double worst_covariance = 0.0;  // sup over |X|, |Y| <= 1
  double connection = 0.0;        // integrated P(support_a <-> support_b)
  double covariance_bound = 0.0;  // |F|^(|S_A| + |S_B|) * connection
};

/// Every pair of disjoint nonempty supports of the region (unordered).
std::vector<SupportPairBound> support_pair_bounds(const GibbsSpec<double>& spec);
/// One pair of region site sets.
SupportPairBound support_pair_bound(const GibbsSpec<double>& spec, const Region& A, const Region& B);

/// Exhaustive sup over events for a joint table D(a, b) = P(a, b) - P(a) P(b):
/// max over row subsets of sum_b (sum_{a in subset} D(a, b))_+.
double worst_event_value(const Eigen::MatrixXd& D);

RunResult covariance_sweep(const SweepOptions& opt = {});

// ---- slice symmetry suite and representation round trips ------------------

struct SymmetrySuiteOptions {
  int instances = 200;
  std::uint64_t seed = 11;
  int max_sites = 10;
  /// Regions up to this size check every slice; larger ones a sample.
  int all_slices_up_to = 6;
  int sampled_slices = 8;
};

/// Exact (rational) check that every non-overlap law is sigma-symmetric and
/// equals the Gibbs measure of its symmetrized spec.
RunResult symmetry_suite(const SymmetrySuiteOptions& opt = {});

/// Monotone and blue/red representations against their target measures.
RunResult rcr_roundtrips(double J = 0.8, std::uint64_t seed = 5);

/// FK identity: spin correlation vs connection probability on ferromagnetic
/// chains and grids, exact rational.
RunResult fk_identity(int max_spins = 10);

// ---- binary Cayley tree ---------------------------------------------------

/// Two-state chain along the tree with transition rows
/// (e^{J-t}, e^{t-J}) / 2cosh(J-t) and (e^{-J-t}, e^{t+J}) / 2cosh(J+t).
struct CayleyChain {
  double J = 0.0;
  double h = 0.0;
  double t = 0.0;
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();

  double det() const { return A.determinant(); }
};

CayleyChain cayley_chain(double J, double h, double t);

/// Roots of t = h + log(cosh(t+J)/cosh(t-J)) by bisection between sign
/// changes on a grid over |t| <= 10J + |h| + 5, deduplicated at 1e-9.
std::vector<double> cayley_fixed_points(double J, double h);
double cayley_residual(double J, double h, double t);

struct CayleyPbar {
  double det = 0.0;          // a00 a11 - a10 a01
  double with_tanh4J = 0.0;  // det * tanh 4J, the published expression
  double with_tanh2J = 0.0;  // det * tanh 2J, from the symmetrized slice coupling
  double p_single = 0.0;     // tanh 2J
};

CayleyPbar cayley_pbar(double J, double h, double t);

/// max over t >= 0 of log(cosh(t+J)/cosh(t-J)) - t and its argmax.
struct FieldBound {
  double h = 0.0;
  double t = 0.0;
};
FieldBound cayley_field_bound(double J);

struct CayleyOptions {
  double J_min = 0.1;
  double J_max = 2.0;
  double J_step = 0.05;
  double crossing_tolerance = 1e-10;
};

RunResult run_cayley(const CayleyOptions& opt = {});

// ---- hard-core model ------------------------------------------------------

struct HardcoreOptions {
  double a = 1.0;
  int width = 2;
  int height = 3;
  /// Activities for the threshold table; empty skips the scan.
  std::vector<double> scan;
  int scan_width = 4;
  int scan_height = 4;
};

/// Hard-core gas on the width x height interior of a grid with a one-site
/// frame. `parity` 0 occupies frame sites with even x + y, 1 the odd ones; -1
/// leaves the frame empty.
GibbsSpec<double> framed_hardcore(int width, int height, double a, int parity);

struct HardcoreEquivalence {
  std::size_t slices = 0;
  std::size_t pairs_checked = 0;
  std::size_t mismatches = 0;
  std::size_t support_mismatches = 0;  // slices whose support is not 2^components
};

/// For every overlap slice and every pair of region sites: the slice
/// probability of an active connection equals the indicator of a path of
/// disagreement sites. Throws InvalidArgument for non-bipartite graphs.
HardcoreEquivalence hardcore_equivalence(const GibbsSpec<double>& spec);

/// Probabilities that `A` and `B` are joined, under the product of the two
/// specs' Gibbs measures, by (disagreement) a path of sites where the copies
/// differ and (active) active bonds of the product slice representations.
struct DisagreementComparison {
  double disagreement = 0.0;
  double active = 0.0;
  std::size_t pairs = 0;
};
DisagreementComparison disagreement_comparison(const GibbsSpec<double>& first, const GibbsSpec<double>& second,
                                               const Region& A, const Region& B);

RunResult hardcore_disagreement(const HardcoreOptions& opt = {});

// ---- Edwards-Anderson two-copy Monte Carlo --------------------------------

/// +-J couplings, one Philox stream per (seed, realization).
struct QuenchedCouplings {
  std::vector<double> J;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
};
QuenchedCouplings quenched_couplings(const Hypergraph& g, double J, std::uint64_t seed, std::uint64_t realization);

/// Blue bonds: both copies satisfy the coupling, kept with probability
/// 1 - e^{-4|J|}. Red bonds: exactly one copy satisfies it, kept with
/// probability 1 - e^{-2|J|}.
struct MnsSample {
  std::vector<int> first;
  std::vector<int> second;
  std::vector<std::uint8_t> blue;
  std::vector<std::uint8_t> red;
  std::vector<std::uint8_t> blue_admissible;
  std::vector<std::uint8_t> red_admissible;
  std::vector<std::uint8_t> nonoverlap;  // first_i == -second_i
};

template <class Rng>
void draw_mns_bonds(const Hypergraph& g, const std::vector<double>& J, MnsSample& s, Rng& rng) {
  const std::size_t m = g.num_bonds();
  s.blue.assign(m, 0);
  s.red.assign(m, 0);
  s.blue_admissible.assign(m, 0);
  s.red_admissible.assign(m, 0);
  for (std::size_t b = 0; b < m; ++b) {
    const auto& v = g.bond(b).vertices;
    const bool one = J[b] * s.first[v[0]] * s.first[v[1]] > 0;
    const bool two = J[b] * s.second[v[0]] * s.second[v[1]] > 0;
    if (one && two) {
      s.blue_admissible[b] = 1;
      s.blue[b] = rng.bernoulli(1.0 - std::exp(-4.0 * std::abs(J[b])));
    } else if (one != two) {
      s.red_admissible[b] = 1;
      s.red[b] = rng.bernoulli(1.0 - std::exp(-2.0 * std::abs(J[b])));
    }
  }
  s.nonoverlap.assign(s.first.size(), 0);
  for (std::size_t i = 0; i < s.first.size(); ++i) s.nonoverlap[i] = s.first[i] == -s.second[i];
}

struct EaOptions {
  int L = 32;
  double J = 1.0;
  double beta = 1.0;  // couplings are beta * (+-J)
  bool periodic = false;
  std::uint64_t seed = 1;
  int realizations = 1;
  int burn_in = 1000;
  int samples = 400;
  int gap = 0;  // sweeps between samples; 0 picks 2 tau_int from a pilot run
};

RunResult ea_mns_percolation(const EaOptions& opt = {});

struct EaCrossCheckOptions {
  double J = 0.5;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 3;
  int tasks = 64;
  int burn_in = 200;
};

/// 2x2 open grid: sampled blue/red outcome law against the exact typed law.
RunResult ea_cross_check(const EaCrossCheckOptions& opt = {});

// ---- integrated connection by Monte Carlo ---------------------------------

struct McOptions {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  int tasks = 32;
  int burn_in = 500;
};

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  double max_tau = 0.0;
};

/// Two heat-bath copies give sigma and the non-overlap configuration; each
/// bond is then activated with its monotone slice probability
/// 1 - w'_min / w'(x), w' the symmetrized factor on the slice.
McEstimate integrated_connection_mc(const GibbsSpec<double>& spec, const Region& A, const Region& B,
                                   const McOptions& opt);

}  // namespace rcb
