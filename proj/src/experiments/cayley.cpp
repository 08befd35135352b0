#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>

#include "rcb/experiments.hpp"
#include "rcb/models.hpp"
#include "rcb/percolation.hpp"

namespace rcb {

namespace {

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// h + log(cosh(t+J)/cosh(t-J)) - t
double fixed_point_gap(double J, double h, double t) { return h + log_cosh(t + J) - log_cosh(t - J) - t; }

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// marginal activity of pattern position `bond` from (code, p) pairs
struct Marginal {
  double active = 0.0, total = 0.0;
  double value() const { return active / total; }
};

}  // namespace

CayleyChain cayley_chain(double J, double h, double t) {
  CayleyChain c{J, h, t, Eigen::Matrix2d::Zero()};
  c.A(0, 0) = logistic(2.0 * (J - t));
  c.A(0, 1) = 1.0 - c.A(0, 0);
  c.A(1, 1) = logistic(2.0 * (J + t));
  c.A(1, 0) = 1.0 - c.A(1, 1);
  return c;
}

double cayley_residual(double J, double h, double t) { return std::abs(fixed_point_gap(J, h, t)); }

std::vector<double> cayley_fixed_points(double J, double h) {
  require(J >= 0.0, "coupling must be nonnegative");
  const double T = 10.0 * J + std::abs(h) + 5.0;
  const int K = 20000;
  const double step = T / K;
  auto f = [&](double t) { return fixed_point_gap(J, h, t); };
  std::vector<double> roots;
  auto add = [&](double t) {
    for (double r : roots)
      if (std::abs(r - t) < 1e-9) return;
    roots.push_back(t);
  };
  // nodes -K..K include t = 0 exactly
  double prev_t = -K * step, prev_f = f(prev_t);
  if (prev_f == 0.0) add(prev_t);
  for (int k = -K + 1; k <= K; ++k) {
    const double t = k * step;
    const double ft = f(t);
    if (ft == 0.0) {
      add(t);
    } else if (prev_f != 0.0 && (ft < 0) != (prev_f < 0)) {
      add(bisect(f, prev_t, t, 1e-15));
    }
    prev_t = t;
    prev_f = ft;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

CayleyPbar cayley_pbar(double J, double h, double t) {
  const auto c = cayley_chain(J, h, t);
  CayleyPbar p;
  p.det = c.det();
  p.with_tanh4J = p.det * std::tanh(4.0 * J);
  p.with_tanh2J = p.det * std::tanh(2.0 * J);
  p.p_single = std::tanh(2.0 * J);
  return p;
}

FieldBound cayley_field_bound(double J) {
  // derivative tanh(t+J) - tanh(t-J) - 1 decreases on t >= 0
  auto slope = [J](double t) { return std::tanh(t + J) - std::tanh(t - J) - 1.0; };
  if (slope(0.0) <= 0.0) return {0.0, 0.0};
  const double t = bisect(slope, 0.0, J + 40.0, 1e-15);
  return {log_cosh(t + J) - log_cosh(t - J) - t, t};
}

RunResult run_cayley(const CayleyOptions& opt) {
  RunResult r;
  r.experiment = "cayley";
  r.config = {{"J_min", opt.J_min}, {"J_max", opt.J_max}, {"J_step", opt.J_step},
              {"crossing_tolerance", opt.crossing_tolerance}};
  const double threshold = 0.5 * std::log(3.0);

  // fixed points
  const auto weak = cayley_fixed_points(0.3, 0.0);
  const auto strong = cayley_fixed_points(1.0, 0.0);
  const auto free_field = cayley_fixed_points(0.0, 0.7);
  r.exact("roots_J0.3", double(weak.size()));
  r.exact("roots_J1", double(strong.size()));
  if (strong.size() == 3) r.exact("positive_root_J1", strong[2]);
  r.claim("unique_root_below_threshold", weak.size() == 1 && std::abs(weak[0]) < 1e-12, double(weak.size()), 1.0);
  r.claim("three_roots_at_J1", strong.size() == 3, double(strong.size()), 3.0);
  r.claim("zero_coupling_root_is_field", free_field.size() == 1 && std::abs(free_field[0] - 0.7) < 1e-12);
  double residual = 0.0, row_error = 0.0;
  for (double J : {0.3, 1.0})
    for (double t : cayley_fixed_points(J, 0.0)) {
      residual = std::max(residual, cayley_residual(J, 0.0, t));
      const auto c = cayley_chain(J, 0.0, t);
      row_error = std::max(row_error, (c.A.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
  r.check_le("fixed_point_residual", residual, 1e-12);
  r.check_le("transition_row_sums", row_error, 1e-15);

  // p-bar of the free chain (h = 0, t = 0), where det = tanh J
  auto free_chain = [&](double J, int variant) {
    const auto p = cayley_pbar(J, 0.0, 0.0);
    return variant == 0 ? p.with_tanh4J : variant == 1 ? p.with_tanh2J : p.det;
  };

  Table grid{"grid", {"J", "h_bound", "t_bound", "det_bound", "pbar_tanh4J_bound", "pbar_free_tanh4J",
                      "pbar_free_tanh2J", "roots_h0"}, {}};
  std::vector<double> Js;
  for (int k = 0;; ++k) {
    const double J = opt.J_min + k * opt.J_step;
    if (J > opt.J_max + 1e-12) break;
    Js.push_back(J);
  }
  double boundary_det_defect = 0.0, boundary_pbar_max = 0.0;
  for (double J : Js) {
    const FieldBound fb = cayley_field_bound(J);
    const auto p = cayley_pbar(J, fb.h, fb.t);
    grid.rows.push_back({J, fb.h, fb.t, p.det, p.with_tanh4J, free_chain(J, 0), free_chain(J, 1),
                         double(cayley_fixed_points(J, 0.0).size())});
    if (J > threshold) boundary_det_defect = std::max(boundary_det_defect, std::abs(p.det - 0.5));
    boundary_pbar_max = std::max(boundary_pbar_max, p.with_tanh4J);
  }
  r.tables.push_back(std::move(grid));
  r.claim("boundary_det_is_half", boundary_det_defect < 1e-12, boundary_det_defect, 0.0);
  r.claim("boundary_pbar_below_half", boundary_pbar_max < 0.5, boundary_pbar_max, 0.5);

  const char* names[] = {"tanh4J", "tanh2J", "det"};
  for (int variant = 0; variant < 3; ++variant) {
    double crossing = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k + 1 < Js.size(); ++k) {
      const double a = free_chain(Js[k], variant) - 0.5, b = free_chain(Js[k + 1], variant) - 0.5;
      if (a == 0.0) {
        crossing = Js[k];
        break;
      }
      if ((a < 0) != (b < 0)) {
        crossing =
            bisect([&](double J) { return free_chain(J, variant) - 0.5; }, Js[k], Js[k + 1], opt.crossing_tolerance);
        break;
      }
    }
    const std::string n = names[variant];
    if (std::isnan(crossing)) r.warnings.push_back("no crossing of 1/2 on the grid for variant " + n);
    r.exact("crossing_" + n, crossing);
    r.exact("gap_to_threshold_" + n, crossing - threshold);
    r.exact("crossing_residual_" + n, std::abs(free_chain(crossing, variant) - 0.5));
  }
  r.exact("threshold_log3_over_2", threshold, ValueMode::ClosedForm);
  r.exact("free_extremality_threshold", std::atanh(1.0 / std::sqrt(2.0)), ValueMode::ClosedForm);
  r.exact("pbar_tanh4J_at_threshold", free_chain(threshold, 0));
  r.exact("pbar_tanh2J_at_threshold", free_chain(threshold, 1));

  // exact enumeration on a depth-2 binary tree: single-copy and sigma = 0 slice activity
  const double J = 0.4;
  const auto spec = ising_spec(build_cayley_tree(2, 2), J);
  const auto base = monotone_base(spec);
  const auto law = activity_distribution(base, gibbs_measure(spec));
  Marginal single;
  for (std::uint64_t c = 0; c < law.size(); ++c) {
    single.total += law[c];
    if (c & 1u) single.active += law[c];
  }
  const auto tc = prepare_two_copy(spec);
  const auto d = slice_data(tc, make_slice(tc, std::vector<int>(7, 0)), monotone_family<double>());
  Marginal slice;
  accumulate_patterns(d.base, d.weights, [&](std::uint64_t code, double p) {
    slice.total += p;
    if (code & 1u) slice.active += p;
  });
  r.exact("tree_single_copy_activity", single.value());
  r.exact("tree_zero_slice_activity", slice.value());
  r.claim("single_copy_activity_is_tanhJ", std::abs(single.value() - std::tanh(J)) < 1e-12, single.value(), std::tanh(J));
  r.claim("zero_slice_activity_is_tanh2J", std::abs(slice.value() - std::tanh(2 * J)) < 1e-12, slice.value(),
          std::tanh(2 * J));
  r.claim("single_copy_activity_is_published_tanh2J", std::abs(single.value() - std::tanh(2 * J)) < 1e-12,
          single.value(), std::tanh(2 * J));
  return r;
}

}  // namespace rcb
