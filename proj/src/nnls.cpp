#include "rcb/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rcb {

namespace {

// Least squares restricted to the passive columns; other entries are zero.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<char>& passive) {
  std::vector<int> cols;
  for (int j = 0; j < static_cast<int>(passive.size()); ++j)
    if (passive[j]) cols.push_back(j);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  if (cols.empty()) return z;
  Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
  const Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zp[static_cast<Eigen::Index>(k)];
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations, double tolerance) {
  const auto n = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 10);
  NnlsResult r;
  r.x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(n, 0);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());

  while (r.iterations < max_iterations) {
    const Eigen::VectorXd grad = A.transpose() * (b - A * r.x);
    int best = -1;
    double best_value = tolerance * scale;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && grad[j] > best_value) {
        best = static_cast<int>(j);
        best_value = grad[j];
      }
    if (best < 0) {
      r.converged = true;
      break;
    }
    passive[best] = 1;
    ++r.iterations;

    for (;;) {
      const Eigen::VectorXd z = passive_solve(A, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0) feasible = false;
      if (feasible) {
        r.x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0 && r.x[j] - z[j] > 0) alpha = std::min(alpha, r.x[j] / (r.x[j] - z[j]));
      if (!std::isfinite(alpha)) alpha = 0.0;
      r.x += alpha * (z - r.x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && r.x[j] <= tolerance) {
          passive[j] = 0;
          r.x[j] = 0.0;
        }
    }
  }
  r.residual = (A * r.x - b).norm();
  return r;
}

}  // namespace rcb
