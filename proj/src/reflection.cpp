#include "cosite/reflection.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cosite {

namespace {

using Cplx = std::complex<double>;

// Numerator and denominator of the surrogate SINR. Gt_theta caches
// Gt[q] * theta for all q.
struct Quadratics {
  Eigen::VectorXd signal;        // p |w' Gt_k theta|^2 + p w' A_k w per user
  Eigen::VectorXd interference;  // sum over q != k plus noise
};

Quadratics eval_quadratics(const SinrModel& model,
                           const std::vector<Eigen::VectorXcd>& Gt_theta,
                           const Eigen::VectorXcd& w) {
  const int K = model.k_users;
  Eigen::VectorXd parts(K);
  for (int q = 0; q < K; ++q) {
    const Cplx s = w.dot(Gt_theta[q]);  // conjugate-linear in w
    double v = std::norm(s);
    if (model.A[q].size() > 0) {
      v += std::real(w.dot(model.A[q] * w));
    }
    parts[q] = model.p * v;
  }
  const double total = parts.sum();
  const double noise = model.sigma2 * w.squaredNorm();
  Quadratics out;
  out.signal = parts;
  out.interference.resize(K);
  for (int k = 0; k < K; ++k) out.interference[k] = total - parts[k] + noise;
  return out;
}

std::vector<Eigen::VectorXcd> apply_theta(const SinrModel& model,
                                          const Eigen::VectorXcd& theta) {
  std::vector<Eigen::VectorXcd> out(model.k_users);
  for (int q = 0; q < model.k_users; ++q) out[q] = model.Gt[q] * theta;
  return out;
}

void check_theta(const SinrModel& model, const Eigen::VectorXcd& theta) {
  if (theta.size() != model.d + 1) {
    throw std::invalid_argument("reflection: theta must have d + 1 entries");
  }
}

}  // namespace

SinrModel build_sinr_model(const SystemConfig& cfg, const CsiState& csi,
                           const std::vector<Eigen::VectorXcd>& l_bs,
                           const Eigen::MatrixXi& delta) {
  SinrModel model;
  model.p = cfg.p_user_w;
  model.sigma2 = cfg.noise_w;
  model.m = cfg.M;
  model.k_users = cfg.K;
  model.d = cfg.N1 * cfg.J;
  model.Gt.resize(cfg.K);
  model.A.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    Eigen::MatrixXcd gt = Eigen::MatrixXcd::Zero(cfg.M, model.d + 1);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cfg.M, cfg.M);
    for (int j = 0; j < cfg.J; ++j) {
      if (delta(k, j)) {
        const Eigen::MatrixXcd& est = csi.G_hat[k][j];
        if (est.size() == 0) {
          throw std::invalid_argument(
              "build_sinr_model: scheduled cascade lacks an estimate");
        }
        gt.middleCols(j * cfg.N1, cfg.N1) = est;
      } else {
        // Unestimated cascade: average reflected power through the static
        // LoS response, independent of the applied reflection.
        const double power =
            cfg.N * csi.mu2_hat[j] * csi.alpha2_hat(k, j);
        a.noalias() += power * (l_bs[j] * l_bs[j].adjoint());
      }
    }
    if (csi.h_d_hat[k].size() != cfg.M) {
      throw std::invalid_argument("build_sinr_model: missing direct estimate");
    }
    gt.col(model.d) = csi.h_d_hat[k];
    model.Gt[k] = std::move(gt);
    model.A[k] = std::move(a);
  }
  return model;
}

SinrModel build_perfect_model(const SystemConfig& cfg,
                              const StaticChannels& stat,
                              const UserChannels& user) {
  SinrModel model;
  model.p = cfg.p_user_w;
  model.sigma2 = cfg.noise_w;
  model.m = cfg.M;
  model.k_users = cfg.K;
  model.d = cfg.N * cfg.J;
  model.Gt.resize(cfg.K);
  model.A.assign(cfg.K, Eigen::MatrixXcd());
  for (int k = 0; k < cfg.K; ++k) {
    Eigen::MatrixXcd gt(cfg.M, model.d + 1);
    for (int j = 0; j < cfg.J; ++j) {
      gt.middleCols(j * cfg.N, cfg.N) = cascade(stat.F[j], user.t[k][j]);
    }
    gt.col(model.d) = user.h_d[k];
    model.Gt[k] = std::move(gt);
  }
  return model;
}

double sinr_lb(const SinrModel& model, const Eigen::VectorXcd& w,
               const Eigen::VectorXcd& theta, int k) {
  check_theta(model, theta);
  const auto Gt_theta = apply_theta(model, theta);
  const Quadratics q = eval_quadratics(model, Gt_theta, w);
  return q.signal[k] / q.interference[k];
}

double worst_sinr_lb(const SinrModel& model,
                     const std::vector<Eigen::VectorXcd>& W,
                     const Eigen::VectorXcd& theta) {
  check_theta(model, theta);
  const auto Gt_theta = apply_theta(model, theta);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.k_users; ++k) {
    const Quadratics q = eval_quadratics(model, Gt_theta, W[k]);
    worst = std::min(worst, q.signal[k] / q.interference[k]);
  }
  return worst;
}

Eigen::VectorXcd project_theta(const Eigen::VectorXcd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) throw std::invalid_argument("project_theta: empty vector");
  Eigen::VectorXcd out(n);
  const Cplx ref = x[n - 1];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    // arg(x_i / x_last) via x_i * conj(x_last); the positive factor |x_last|
    // does not move the angle.
    const Cplx z = x[i] * std::conj(ref);
    if (z == Cplx(0.0, 0.0)) {
      out[i] = Cplx(1.0, 0.0);
    } else {
      out[i] = std::polar(1.0, std::arg(z));
    }
  }
  out[n - 1] = Cplx(1.0, 0.0);
  return out;
}

Eigen::VectorXcd subgradient_xi(const SinrModel& model,
                                const std::vector<Eigen::VectorXcd>& W,
                                const Eigen::VectorXcd& theta, double t) {
  check_theta(model, theta);
  const auto Gt_theta = apply_theta(model, theta);

  // Worst user at the current point; ties resolve to the smallest index.
  int k0 = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.k_users; ++k) {
    const Quadratics q = eval_quadratics(model, Gt_theta, W[k]);
    const double f = q.signal[k] - t * q.interference[k];
    if (f < worst) {
      worst = f;
      k0 = k;
    }
  }

  const Eigen::VectorXcd& w = W[k0];
  Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(model.d + 1);
  for (int q = 0; q < model.k_users; ++q) {
    const Cplx s = w.dot(Gt_theta[q]);  // w' Gt_q theta
    const double coef = (q == k0) ? 1.0 : -t;
    // Gradient of |w' Gt theta|^2 treated over real coordinates: 2 Gt' w w' Gt theta.
    xi.noalias() +=
        (2.0 * model.p * coef * s) * (model.Gt[q].adjoint() * w);
  }
  return xi;
}

GpmResult gpm_solve(const SinrModel& model,
                    const std::vector<Eigen::VectorXcd>& W,
                    const Eigen::VectorXcd& theta0, double t,
                    const SystemConfig& cfg) {
  check_theta(model, theta0);
  auto level_value = [&](const Eigen::VectorXcd& th) {
    const auto Gt_theta = apply_theta(model, th);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < model.k_users; ++k) {
      const Quadratics q = eval_quadratics(model, Gt_theta, W[k]);
      worst = std::min(worst, q.signal[k] - t * q.interference[k]);
    }
    return worst;
  };

  Eigen::VectorXcd theta = project_theta(theta0);
  double best_value = level_value(theta);
  Eigen::VectorXcd best_theta = theta;
  std::vector<double> trace{best_value};

  int it = 0;
  while (it < cfg.gpm_iter_cap) {
    ++it;
    const Eigen::VectorXcd xi = subgradient_xi(model, W, theta, t);
    const double norm = xi.norm();
    if (!(norm > 0.0)) break;
    theta = project_theta(theta + (cfg.rho / norm) * xi);
    const double value = level_value(theta);
    trace.push_back(value);
    const double prev_best = best_value;
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
    }
    // Convergence is judged on the best feasible value: with a fixed
    // normalized step the raw objective oscillates near a maximizer, and the
    // plateau of the running best is the usable stop signal.
    if (best_value - prev_best <=
        cfg.eps2 * std::max(std::fabs(prev_best), 1e-300)) {
      break;
    }
  }

  GpmResult res;
  res.theta = std::move(best_theta);
  res.trace = Eigen::Map<Eigen::VectorXd>(trace.data(),
                                          static_cast<Eigen::Index>(trace.size()));
  res.iterations = it;
  return res;
}

EigenPair dominant_generalized(const Eigen::MatrixXcd& C,
                               const Eigen::MatrixXcd& D, int power_cap) {
  if (C.rows() != C.cols() || D.rows() != D.cols() || C.rows() != D.rows()) {
    throw std::invalid_argument("dominant_generalized: square matrices required");
  }
  const Eigen::Index n = C.rows();
  Eigen::LLT<Eigen::MatrixXcd> llt(D);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "dominant_generalized: denominator matrix is not positive definite");
  }
  const auto& L = llt.matrixL();
  // Whitened matrix S = L^-1 C L^-H, made exactly Hermitian.
  Eigen::MatrixXcd S = L.solve(C);
  S = L.solve(S.adjoint()).adjoint().eval();
  S = (0.5 * (S + S.adjoint())).eval();

  const double scale = S.norm();
  EigenPair out;
  if (!(scale > 0.0)) {
    // Zero numerator: every direction is equally (un)good.
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v[0] = 1.0;
    out.vector = llt.matrixU().solve(v).normalized();
    out.value = 0.0;
    out.power_converged = true;
    return out;
  }

  // Start from the strongest column, which always overlaps the top
  // eigenspace of a PSD matrix.
  Eigen::Index j_max = 0;
  double best = -1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cn = S.col(j).norm();
    if (cn > best) {
      best = cn;
      j_max = j;
    }
  }
  Eigen::VectorXcd v = S.col(j_max).normalized();

  double value = 0.0;
  bool converged = false;
  for (int it = 0; it < power_cap; ++it) {
    Eigen::VectorXcd sv = S * v;
    value = std::real(v.dot(sv));
    const double residual = (sv - value * v).norm();
    if (residual <= 1e-9 * std::max(value, 1e-30 * scale)) {
      converged = true;
      break;
    }
    const double nn = sv.norm();
    if (!(nn > 0.0)) break;
    v = sv / nn;
  }
  if (!converged) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("dominant_generalized: dense fallback failed");
    }
    v = es.eigenvectors().col(n - 1);
    value = es.eigenvalues()[n - 1];
  }

  out.vector = llt.matrixU().solve(v).normalized();
  out.value = value;
  out.power_converged = converged;
  return out;
}

Eigen::VectorXcd combining_weights(const SinrModel& model,
                                   const Eigen::VectorXcd& theta, int k,
                                   const SystemConfig& cfg) {
  check_theta(model, theta);
  const auto Gt_theta = apply_theta(model, theta);
  const Eigen::Index M = model.m;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, M);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(M, M);
  for (int q = 0; q < model.k_users; ++q) {
    Eigen::MatrixXcd part = Gt_theta[q] * Gt_theta[q].adjoint();
    if (model.A[q].size() > 0) part += model.A[q];
    if (q == k) {
      C = model.p * part;
    } else {
      D += model.p * part;
    }
  }
  D += model.sigma2 * Eigen::MatrixXcd::Identity(M, M);
  return dominant_generalized(C, D, cfg.power_iter_cap).vector;
}

AoResult ao_solve(const SinrModel& model, const SystemConfig& cfg,
                  std::mt19937_64& init_rng) {
  const Eigen::Index dim = model.d + 1;
  Eigen::VectorXcd theta(dim);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) theta[i] = random_phase(init_rng);
  theta[dim - 1] = Cplx(1.0, 0.0);

  std::vector<Eigen::VectorXcd> W(model.k_users);
  for (int k = 0; k < model.k_users; ++k) {
    W[k] = combining_weights(model, theta, k, cfg);
  }

  std::vector<double> trace{worst_sinr_lb(model, W, theta)};
  int it = 0;
  while (it < cfg.ao_iter_cap) {
    ++it;
    const double t = trace.back();
    theta = gpm_solve(model, W, theta, t, cfg).theta;
    for (int k = 0; k < model.k_users; ++k) {
      Eigen::VectorXcd w_new = combining_weights(model, theta, k, cfg);
      // The refit maximizes this user's surrogate SINR; keep the old
      // combiner on the rare numerical regression.
      if (sinr_lb(model, w_new, theta, k) >= sinr_lb(model, W[k], theta, k)) {
        W[k] = std::move(w_new);
      }
    }
    const double value = worst_sinr_lb(model, W, theta);
    trace.push_back(value);
    if (value - t <= cfg.eps3 * std::max(t, 1e-300)) break;
  }

  AoResult res;
  res.theta = std::move(theta);
  res.W = std::move(W);
  res.trace = Eigen::Map<Eigen::VectorXd>(trace.data(),
                                          static_cast<Eigen::Index>(trace.size()));
  res.iterations = it;
  return res;
}

}  // namespace cosite
