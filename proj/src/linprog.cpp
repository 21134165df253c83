#include "cosite/linprog.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace cosite {

namespace {

// Two-phase simplex after the KACTL codebook solver: a dense tableau with
// pair-comparison (value, index) pivot selection, which both breaks ties
// deterministically and avoids cycling in practice.
struct Simplex {
  static constexpr double kEps = 1e-8;
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  int m, n;
  std::vector<int> N, B;
  std::vector<std::vector<double>> D;

  Simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
          const Eigen::VectorXd& c)
      : m(static_cast<int>(b.size())),
        n(static_cast<int>(c.size())),
        N(n + 1),
        B(m),
        D(m + 2, std::vector<double>(n + 2, 0.0)) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) D[i][j] = A(i, j);
    for (int i = 0; i < m; ++i) {
      B[i] = n + i;
      D[i][n] = -1.0;
      D[i][n + 1] = b[i];
    }
    for (int j = 0; j < n; ++j) {
      N[j] = j;
      D[m][j] = -c[j];
    }
    N[n] = -1;
    D[m + 1][n] = 1.0;
  }

  void pivot(int r, int s) {
    double* a = D[r].data();
    const double inv = 1.0 / a[s];
    for (int i = 0; i < m + 2; ++i) {
      if (i != r && std::fabs(D[i][s]) > kEps) {
        double* bb = D[i].data();
        const double inv2 = bb[s] * inv;
        for (int j = 0; j < n + 2; ++j) bb[j] -= a[j] * inv2;
        bb[s] = a[s] * inv2;
      }
    }
    for (int j = 0; j < n + 2; ++j)
      if (j != s) D[r][j] *= inv;
    for (int i = 0; i < m + 2; ++i)
      if (i != r) D[i][s] *= -inv;
    D[r][s] = inv;
    std::swap(B[r], N[s]);
  }

  bool iterate(int phase) {
    const int x = m + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j < n + 1; ++j) {
        if (N[j] == -phase) continue;
        if (s == -1 ||
            std::make_pair(D[x][j], N[j]) < std::make_pair(D[x][s], N[s]))
          s = j;
      }
      if (D[x][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m; ++i) {
        if (D[i][s] <= kEps) continue;
        if (r == -1 || std::make_pair(D[i][n + 1] / D[i][s], B[i]) <
                           std::make_pair(D[r][n + 1] / D[r][s], B[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  double solve(Eigen::VectorXd& x) {
    int r = 0;
    for (int i = 1; i < m; ++i)
      if (D[i][n + 1] < D[r][n + 1]) r = i;
    if (D[r][n + 1] < -kEps) {
      pivot(r, n);
      if (!iterate(2) || D[m + 1][n + 1] < -kEps) return -kInf;
      for (int i = 0; i < m; ++i) {
        if (B[i] == -1) {
          int s = 0;
          for (int j = 1; j < n + 1; ++j) {
            if (std::make_pair(D[i][j], N[j]) < std::make_pair(D[i][s], N[s]))
              s = j;
          }
          pivot(i, s);
        }
      }
    }
    const bool ok = iterate(1);
    x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
      if (B[i] < n) x[B[i]] = D[i][n + 1];
    return ok ? D[m][n + 1] : kInf;
  }
};

}  // namespace

LpSolution lp_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c) {
  if (A.rows() != b.size() || A.cols() != c.size() || b.size() == 0 ||
      c.size() == 0) {
    throw std::invalid_argument("lp_solve: inconsistent dimensions");
  }
  Simplex solver(A, b, c);
  LpSolution sol;
  const double value = solver.solve(sol.x);
  if (value == -Simplex::kInf) {
    sol.status = LpStatus::kInfeasible;
  } else if (value == Simplex::kInf) {
    sol.status = LpStatus::kUnbounded;
  } else {
    sol.status = LpStatus::kOptimal;
    sol.objective = value;
  }
  return sol;
}

}  // namespace cosite
