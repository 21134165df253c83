#include "cosite/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cosite/linprog.hpp"

namespace cosite {

double channel_metric(double beta2, const Eigen::RowVectorXd& alpha2_row,
                      const Eigen::VectorXd& mu2,
                      const Eigen::RowVectorXd& lambda_row, int n_elements) {
  const double n2 = static_cast<double>(n_elements) * n_elements;
  double h = beta2;
  for (Eigen::Index j = 0; j < mu2.size(); ++j) {
    h += alpha2_row[j] * mu2[j] * lambda_row[j] * lambda_row[j] * n2;
  }
  return h;
}

double metric_lower_bound(double beta2, const Eigen::RowVectorXd& alpha2_row,
                          const Eigen::VectorXd& mu2,
                          const Eigen::RowVectorXd& lambda_row,
                          const Eigen::RowVectorXd& anchor_row,
                          int n_elements) {
  const double n2 = static_cast<double>(n_elements) * n_elements;
  double h = beta2;
  for (Eigen::Index j = 0; j < mu2.size(); ++j) {
    const double a = anchor_row[j];
    h += alpha2_row[j] * mu2[j] * (2.0 * a * lambda_row[j] - a * a) * n2;
  }
  return h;
}

namespace {

// One SCA round: maximize the worst tangent minorant over the per-surface
// load simplices. Variables are the K*J loads (user-major) plus the level
// value; all metric rows are rescaled to order one before pivoting.
Eigen::MatrixXd solve_load_lp(const LargeScaleGains& g,
                              const Eigen::MatrixXd& anchor, int n_elements) {
  const int K = static_cast<int>(g.beta2.size());
  const int J = static_cast<int>(g.mu2.size());
  const double n2 = static_cast<double>(n_elements) * n_elements;
  const int nv = K * J + 1;
  const int level = K * J;
  const int rows = 2 * J + K;

  Eigen::MatrixXd gain(K, J);
  Eigen::VectorXd offset(K);
  double scale = 0.0;
  for (int k = 0; k < K; ++k) {
    double c = g.beta2[k];
    for (int j = 0; j < J; ++j) {
      const double a = anchor(k, j);
      const double q = g.alpha2(k, j) * g.mu2[j] * n2;
      gain(k, j) = 2.0 * q * a;
      c -= q * a * a;
      scale = std::max(scale, gain(k, j));
    }
    offset[k] = c;
    scale = std::max(scale, std::fabs(c));
  }
  if (scale <= 0.0) scale = 1.0;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, nv);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  c[level] = 1.0;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) {
      A(2 * j, k * J + j) = 1.0;
      A(2 * j + 1, k * J + j) = -1.0;
    }
    b[2 * j] = 1.0;
    b[2 * j + 1] = -1.0;
  }
  for (int k = 0; k < K; ++k) {
    const int r = 2 * J + k;
    A(r, level) = 1.0;
    for (int j = 0; j < J; ++j) A(r, k * J + j) = -gain(k, j) / scale;
    b[r] = offset[k] / scale;
  }

  const LpSolution sol = lp_solve(A, b, c);
  if (sol.status != LpStatus::kOptimal) {
    throw std::runtime_error("sca_solve: association LP was reported " +
                             std::string(sol.status == LpStatus::kInfeasible
                                             ? "infeasible"
                                             : "unbounded"));
  }
  Eigen::MatrixXd lambda(K, J);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j) lambda(k, j) = sol.x[k * J + j];
  return lambda;
}

double worst_metric(const LargeScaleGains& g, const Eigen::MatrixXd& lambda,
                    int n_elements) {
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < g.beta2.size(); ++k) {
    worst = std::min(worst, channel_metric(g.beta2[k], g.alpha2.row(k), g.mu2,
                                           lambda.row(k), n_elements));
  }
  return worst;
}

}  // namespace

AssociationResult sca_solve(const LargeScaleGains& gains,
                            const SystemConfig& cfg) {
  const int K = static_cast<int>(gains.beta2.size());
  const int J = static_cast<int>(gains.mu2.size());

  // Gain-proportional starting loads on each surface's simplex.
  Eigen::MatrixXd lambda(K, J);
  for (int j = 0; j < J; ++j) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) total += gains.alpha2(k, j) * gains.mu2[j];
    for (int k = 0; k < K; ++k) {
      lambda(k, j) =
          total > 0.0 ? gains.alpha2(k, j) * gains.mu2[j] / total : 1.0 / K;
    }
  }

  std::vector<double> trace{worst_metric(gains, lambda, cfg.N)};
  int it = 0;
  while (it < cfg.sca_iter_cap) {
    ++it;
    lambda = solve_load_lp(gains, lambda, cfg.N);
    const double value = worst_metric(gains, lambda, cfg.N);
    const double prev = trace.back();
    trace.push_back(value);
    if (value - prev <= cfg.eps1 * std::max(prev, 1e-300)) break;
  }

  AssociationResult res;
  res.lambda = std::move(lambda);
  res.trace = Eigen::Map<Eigen::VectorXd>(trace.data(),
                                          static_cast<Eigen::Index>(trace.size()));
  res.iterations = it;
  return res;
}

Eigen::MatrixXi select_associations(const Eigen::MatrixXd& lambda, int zeta) {
  const int K = static_cast<int>(lambda.rows());
  const int J = static_cast<int>(lambda.cols());
  std::vector<std::tuple<double, int, int>> order;
  order.reserve(static_cast<std::size_t>(K) * J);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j) order.emplace_back(-lambda(k, j), k, j);
  std::sort(order.begin(), order.end());

  Eigen::MatrixXi delta = Eigen::MatrixXi::Zero(K, J);
  const int take = std::clamp(zeta, 0, K * J);
  for (int i = 0; i < take; ++i) {
    delta(std::get<1>(order[i]), std::get<2>(order[i])) = 1;
  }
  return delta;
}

}  // namespace cosite
