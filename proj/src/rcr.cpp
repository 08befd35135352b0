#include <cmath>

#include "rcb/rcr.hpp"
#include "rcb/typed_rcr.hpp"

namespace rcb {

std::vector<double> monotone_rcr_potentials(const std::vector<double>& phi) {
  require(!phi.empty(), "monotone_rcr: no levels");
  std::vector<double> levels(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    require(i == 0 || phi[i] < phi[i - 1], "monotone_rcr: levels must be strictly decreasing");
    levels[i] = std::exp(phi[i] - phi[0]);
  }
  return monotone_rcr(levels);
}

namespace {

bool is_column(const Eigen::MatrixXd& A, Eigen::Index j, std::initializer_list<double> v) {
  Eigen::Index i = 0;
  for (double x : v)
    if (A(i++, j) != x) return false;
  return true;
}

// Index pair (subset column, full column) when A is {one level, all} on three
// levels, with the single level at `row`.
bool single_level_pattern(const Eigen::MatrixXd& A, int row, Eigen::Index* single, Eigen::Index* full) {
  if (A.rows() != 3 || A.cols() != 2) return false;
  for (Eigen::Index j = 0; j < 2; ++j) {
    const Eigen::Index other = 1 - j;
    const bool lone = row == 0 ? is_column(A, j, {1, 0, 0}) : is_column(A, j, {0, 1, 0});
    if (lone && is_column(A, other, {1, 1, 1})) {
      *single = j;
      *full = other;
      return true;
    }
  }
  return false;
}

Eigen::MatrixXd masked(const Eigen::MatrixXd& A, const std::vector<bool>& allowed) {
  Eigen::MatrixXd out = A;
  for (std::size_t j = 0; j < allowed.size(); ++j)
    if (!allowed[j]) out.col(static_cast<Eigen::Index>(j)).setZero();
  return out;
}

// One half-step: fix the other type's masses u, fit p >= 0 with
// diag(u) A p proportional to w, normalized to sum 1.
bool half_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& u, const Eigen::VectorXd& w, Eigen::VectorXd* p) {
  const Eigen::MatrixXd M = u.asDiagonal() * A;
  const NnlsResult r = nnls(M, w);
  const double total = r.x.sum();
  if (!(total > 0)) return false;
  *p = r.x / total;
  return true;
}

double product_residual(const TypedLevelSystem& sys, const Eigen::VectorXd& w, const Eigen::VectorXd& pa,
                        const Eigen::VectorXd& pb, double* c) {
  const Eigen::VectorXd prod = (sys.alpha * pa).cwiseProduct(sys.beta * pb);
  *c = prod.dot(w) / w.squaredNorm();
  return (prod - *c * w).cwiseAbs().maxCoeff();
}

}  // namespace

TypedSolution solve_typed_rcr(const TypedLevelSystem& sys, double tolerance, int iterations) {
  const auto k = static_cast<Eigen::Index>(sys.levels.size());
  require(k >= 1 && sys.alpha.rows() == k && sys.beta.rows() == k, "typed level system shape mismatch");
  require(sys.alpha_allowed.empty() || sys.alpha_allowed.size() == static_cast<std::size_t>(sys.alpha.cols()),
          "alpha mask size mismatch");
  require(sys.beta_allowed.empty() || sys.beta_allowed.size() == static_cast<std::size_t>(sys.beta.cols()),
          "beta mask size mismatch");
  Eigen::VectorXd w(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    w[i] = sys.levels[static_cast<std::size_t>(i)];
    require(w[i] > 0, "typed levels must be positive");
    require(i == 0 || w[i] < w[i - 1], "typed levels must be strictly decreasing");
  }
  w /= w[0];

  TypedSolution out;
  Eigen::Index sa = 0, fa = 0, sb = 0, fb = 0;
  const bool masks_open = std::all_of(sys.alpha_allowed.begin(), sys.alpha_allowed.end(), [](bool b) { return b; }) &&
                          std::all_of(sys.beta_allowed.begin(), sys.beta_allowed.end(), [](bool b) { return b; });
  if (masks_open && single_level_pattern(sys.alpha, 0, &sa, &fa) && single_level_pattern(sys.beta, 1, &sb, &fb)) {
    out.p_alpha = Eigen::VectorXd::Zero(2);
    out.p_beta = Eigen::VectorXd::Zero(2);
    out.p_alpha[fa] = w[2] / w[0];
    out.p_alpha[sa] = 1.0 - out.p_alpha[fa];
    out.p_beta[fb] = w[2] / w[1];
    out.p_beta[sb] = 1.0 - out.p_beta[fb];
    out.closed_form = true;
    out.residual = product_residual(sys, w, out.p_alpha, out.p_beta, &out.c);
    return out;
  }

  const Eigen::MatrixXd A = masked(sys.alpha, sys.alpha_allowed);
  const Eigen::MatrixXd B = masked(sys.beta, sys.beta_allowed);
  const Eigen::Index nb = B.cols();
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t lcg = 0x9e3779b97f4a7c15ull;
  for (int restart = 0; restart < 8; ++restart) {
    Eigen::VectorXd pb(nb);
    if (restart == 0) {
      pb.setConstant(1.0 / static_cast<double>(nb));
    } else {
      for (Eigen::Index j = 0; j < nb; ++j) {
        lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
        pb[j] = static_cast<double>(lcg >> 11) * 0x1.0p-53 + 1e-3;
      }
      pb /= pb.sum();
    }
    for (Eigen::Index j = 0; j < nb; ++j)
      if (!sys.beta_allowed.empty() && !sys.beta_allowed[static_cast<std::size_t>(j)]) pb[j] = 0.0;
    if (!(pb.sum() > 0)) break;
    pb /= pb.sum();
    Eigen::VectorXd pa;
    for (int it = 0; it < iterations; ++it) {
      if (!half_step(A, B * pb, w, &pa) || !half_step(B, A * pa, w, &pb)) break;
      double c = 0.0;
      const double res = product_residual(sys, w, pa, pb, &c);
      if (res < best) {
        best = res;
        out.p_alpha = pa;
        out.p_beta = pb;
        out.c = c;
        out.residual = res;
      }
      if (res <= tolerance) break;
    }
    if (best <= tolerance) break;
  }
  if (!(best <= tolerance)) fail(ErrorKind::Infeasible, "typed level system has no solution within tolerance");
  // Generic bilinear systems leave a scaling freedom between the two types
  // whenever both families share the full subset; flag anything not pinned.
  Eigen::MatrixXd J(k, A.cols() + B.cols());
  J << (B * out.p_beta).asDiagonal() * A, (A * out.p_alpha).asDiagonal() * B;
  out.non_unique = J.completeOrthogonalDecomposition().rank() < A.cols() + B.cols() - 1;
  return out;
}

}  // namespace rcb
