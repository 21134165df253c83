#include "cosite/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cosite {

CsiState stage1_long_term(const SystemConfig& cfg, const StaticChannels& stat,
                          const LargeScaleGains& gains) {
  CsiState csi;
  csi.G_ctrl_hat.resize(cfg.J);
  csi.mu2_hat.resize(cfg.J);
  for (int j = 0; j < cfg.J; ++j) {
    csi.G_ctrl_hat[j] = cascade(stat.F[j], stat.t_ctrl[j]);
    const double g = csi.G_ctrl_hat[j].squaredNorm() /
                     static_cast<double>(cfg.M * cfg.N);
    csi.mu2_hat[j] = g / gains.alpha2_ctrl[j];
  }
  csi.beta2_hat = gains.beta2;
  csi.alpha2_hat = gains.alpha2;
  csi.alpha2_ctrl_hat = gains.alpha2_ctrl;
  csi.h_d_hat.resize(cfg.K);
  csi.G_hat.assign(cfg.K, std::vector<Eigen::MatrixXcd>(cfg.J));
  csi.delta = Eigen::MatrixXi::Zero(cfg.K, cfg.J);
  return csi;
}

void stage2_estimates(const SystemConfig& cfg, const StaticChannels& stat,
                      const UserChannels& user, const Eigen::MatrixXi& delta,
                      EstimationMode mode, CsiState& csi,
                      const RngFactory& streams, int block,
                      const Eigen::MatrixXd* eps_scale) {
  if (delta.rows() != cfg.K || delta.cols() != cfg.J) {
    throw std::invalid_argument("stage2_estimates: delta must be K x J");
  }
  const int scheduled = delta.sum();
  const int zeta = compute_budget(cfg).zeta;
  if (scheduled > zeta) {
    throw std::invalid_argument(
        "stage2_estimates: schedule of " + std::to_string(scheduled) +
        " cascades exceeds the Phase II budget of " + std::to_string(zeta));
  }

  csi.delta = delta;
  for (int k = 0; k < cfg.K; ++k) {
    csi.h_d_hat[k] = user.h_d[k];
    for (int j = 0; j < cfg.J; ++j) {
      if (!delta(k, j)) {
        csi.G_hat[k][j].resize(0, 0);
        continue;
      }
      Eigen::MatrixXcd g =
          group_channels(cascade(stat.F[j], user.t[k][j]), cfg.N1);
      if (mode == EstimationMode::kNoisy && cfg.eps_est > 0.0) {
        double var = cfg.eps_est * cfg.noise_w / cfg.p_user_w;
        if (eps_scale != nullptr) var *= (*eps_scale)(k, j);
        const double sd = std::sqrt(var);
        auto rng = streams.make(Stream::kEstimationNoise, block, k, j);
        for (Eigen::Index col = 0; col < g.cols(); ++col)
          for (Eigen::Index row = 0; row < g.rows(); ++row)
            g(row, col) += sd * complex_gaussian(rng);
      }
      csi.G_hat[k][j] = std::move(g);
    }
  }
}

std::vector<Eigen::VectorXcd> phase3_overall(
    const SystemConfig& cfg, const StaticChannels& stat,
    const UserChannels& user, const Eigen::VectorXcd& theta_elements) {
  std::vector<Eigen::VectorXcd> h(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    h[k] = overall_channel(user.h_d[k], stat.F, user.t[k], theta_elements);
  }
  return h;
}

}  // namespace cosite
