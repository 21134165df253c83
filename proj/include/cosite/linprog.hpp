#pragma once

#include <Eigen/Dense>

namespace cosite {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// Dense two-phase simplex for max c'x subject to Ax <= b, x >= 0, with
// Bland-style index tie-breaking so pivots are deterministic. Callers are
// expected to scale their data to order one; the pivot tolerance is 1e-8.
LpSolution lp_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c);

}  // namespace cosite
