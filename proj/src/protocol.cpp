#include "cosite/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace cosite {

Eigen::VectorXcd mmse_combiner(const std::vector<Eigen::VectorXcd>& h,
                               double p, double sigma2, int k) {
  const Eigen::Index M = h.at(k).size();
  Eigen::MatrixXcd R = sigma2 * Eigen::MatrixXcd::Identity(M, M);
  for (const auto& hq : h) R.noalias() += p * (hq * hq.adjoint());
  Eigen::VectorXcd w = R.ldlt().solve(h[k]);
  const double n = w.norm();
  if (!(n > 0.0)) {
    throw std::runtime_error("mmse_combiner: degenerate channel produced a zero combiner");
  }
  return w / n;
}

double sinr(const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXcd& w,
            double p, double sigma2, int k) {
  const double signal = p * std::norm(w.dot(h.at(k)));
  double interference = sigma2 * w.squaredNorm();
  for (int q = 0; q < static_cast<int>(h.size()); ++q) {
    if (q != k) interference += p * std::norm(w.dot(h[q]));
  }
  return signal / interference;
}

double achievable_rate(double sinr_value, int T_u, int tau, double gamma_lin) {
  if (tau < 0 || T_u <= 0) {
    throw std::invalid_argument("achievable_rate: bad training or block length");
  }
  if (tau >= T_u) return 0.0;
  const double prelog = static_cast<double>(T_u - tau) / T_u;
  return prelog * std::log2(1.0 + sinr_value / gamma_lin);
}

std::vector<Eigen::Vector3d> place_users(const SystemConfig& cfg,
                                         const Geometry& geom,
                                         const RngFactory& streams) {
  auto rng = streams.make(Stream::kPlacement);
  std::vector<Eigen::Vector3d> users(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    for (int d = 0; d < 3; ++d) {
      const double lo = geom.region_lo[d];
      const double hi = geom.region_hi[d];
      users[k][d] = lo + (hi - lo) * uniform01(rng);
    }
  }
  return users;
}

FrameResult run_frame(const Scenario& sc, std::uint64_t trial_seed,
                      const FrameOptions& opts) {
  const SystemConfig& cfg = sc.cfg;
  const RngFactory streams(trial_seed);

  Geometry geom = sc.geometry;
  if (geom.users.empty()) geom.users = place_users(cfg, geom, streams);

  const Eigen::ArrayXXi inside = half_space_matrix(geom);
  const LargeScaleGains gains = large_scale_gains(cfg, geom, sc.table, inside);
  const StaticChannels stat = draw_static_channels(cfg, geom, sc.table, streams);
  const TrainingBudget budget = compute_budget(cfg);

  FrameResult out;
  out.zeta = budget.zeta;

  CsiState csi;
  if (opts.perfect_csi) {
    out.delta = Eigen::MatrixXi::Ones(cfg.K, cfg.J);
    out.tau_used = opts.tau_override >= 0 ? opts.tau_override : 0;
  } else {
    csi = stage1_long_term(cfg, stat, gains);
    if (opts.delta_provider) {
      out.delta = opts.delta_provider(csi, budget.zeta, streams);
    } else {
      LargeScaleGains hats;
      hats.beta2 = csi.beta2_hat;
      hats.alpha2 = csi.alpha2_hat;
      hats.mu2 = csi.mu2_hat;
      hats.alpha2_ctrl = csi.alpha2_ctrl_hat;
      const AssociationResult assoc = sca_solve(hats, cfg);
      out.association_trace = assoc.trace;
      out.delta = select_associations(assoc.lambda, budget.zeta);
    }
    out.tau_used = opts.tau_override >= 0 ? opts.tau_override : cfg.tau;
  }

  out.rates.resize(cfg.L, cfg.K);
  out.sinrs.resize(cfg.L, cfg.K);
  out.ao_traces.reserve(cfg.L);

  const int group_size = cfg.N / cfg.N1;
  for (int block = 0; block < cfg.L; ++block) {
    const UserChannels user =
        draw_user_channels(cfg, geom, sc.table, streams, block, inside);

    SinrModel model;
    if (opts.perfect_csi) {
      model = build_perfect_model(cfg, stat, user);
    } else {
      stage2_estimates(cfg, stat, user, out.delta, opts.estimation, csi,
                       streams, block, opts.eps_scale);
      model = build_sinr_model(cfg, csi, stat.l_bs, out.delta);
    }

    auto init_rng = streams.make(Stream::kAoInit, block);
    const AoResult ao = ao_solve(model, cfg, init_rng);
    out.ao_traces.push_back(ao.trace);

    // Apply the optimized reflection at element resolution and evaluate the
    // exact overall channels it produces.
    Eigen::VectorXcd theta_elements(cfg.N * cfg.J);
    if (opts.perfect_csi) {
      theta_elements = ao.theta.head(cfg.N * cfg.J);
    } else {
      for (int j = 0; j < cfg.J; ++j) {
        theta_elements.segment(j * cfg.N, cfg.N) = replicate_groups(
            ao.theta.segment(j * cfg.N1, cfg.N1), group_size);
      }
    }
    const std::vector<Eigen::VectorXcd> h =
        phase3_overall(cfg, stat, user, theta_elements);

    for (int k = 0; k < cfg.K; ++k) {
      const Eigen::VectorXcd w = mmse_combiner(h, cfg.p_user_w, cfg.noise_w, k);
      const double s = sinr(h, w, cfg.p_user_w, cfg.noise_w, k);
      out.sinrs(block, k) = s;
      out.rates(block, k) =
          achievable_rate(s, cfg.T_u, out.tau_used, cfg.gamma_lin);
    }
  }

  out.min_rate = out.rates.rowwise().minCoeff().mean();
  out.mean_rate = out.rates.mean();
  return out;
}

}  // namespace cosite
