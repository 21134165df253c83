#include "cosite/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace cosite {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kProposed: return "Proposed";
    case Scheme::kGreedyAssoc: return "GreedyAssoc";
    case Scheme::kRandomAssoc: return "RandomAssoc";
    case Scheme::kUserSideProtocol: return "UserSideProtocol";
    case Scheme::kPerfectCsi: return "PerfectCsi";
    case Scheme::kNoIrs: return "NoIrs";
  }
  throw std::logic_error("scheme_name: unhandled scheme");
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::kProposed, Scheme::kGreedyAssoc, Scheme::kRandomAssoc,
                   Scheme::kUserSideProtocol, Scheme::kPerfectCsi, Scheme::kNoIrs}) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme \"" + name + "\"");
}

Eigen::MatrixXi greedy_association(const Eigen::MatrixXd& alpha2_hat,
                                   const Eigen::VectorXd& mu2_hat, int zeta) {
  const int K = static_cast<int>(alpha2_hat.rows());
  const int J = static_cast<int>(alpha2_hat.cols());
  std::vector<std::tuple<double, int, int>> order;
  order.reserve(static_cast<std::size_t>(K) * J);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j)
      order.emplace_back(-mu2_hat[j] * alpha2_hat(k, j), k, j);
  std::sort(order.begin(), order.end());
  Eigen::MatrixXi delta = Eigen::MatrixXi::Zero(K, J);
  const int take = std::clamp(zeta, 0, K * J);
  for (int i = 0; i < take; ++i)
    delta(std::get<1>(order[i]), std::get<2>(order[i])) = 1;
  return delta;
}

Eigen::MatrixXi random_association(int K, int J, int zeta,
                                   std::mt19937_64& rng) {
  const int n = K * J;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  const int take = std::clamp(zeta, 0, n);
  for (int i = 0; i < take; ++i) {
    // Partial Fisher-Yates with a fixed draw count per slot.
    const int pick = i + static_cast<int>(uniform01(rng) * (n - i));
    std::swap(idx[i], idx[std::min(pick, n - 1)]);
  }
  Eigen::MatrixXi delta = Eigen::MatrixXi::Zero(K, J);
  for (int i = 0; i < take; ++i) delta(idx[i] / J, idx[i] % J) = 1;
  return delta;
}

namespace {

EstimationMode mode_of(const SystemConfig& cfg) {
  return cfg.eps_est > 0.0 ? EstimationMode::kNoisy : EstimationMode::kPerfect;
}

FrameResult zero_rate_result(const SystemConfig& cfg, int tau_used) {
  FrameResult out;
  out.rates = Eigen::MatrixXd::Zero(cfg.L, cfg.K);
  out.sinrs = Eigen::MatrixXd::Zero(cfg.L, cfg.K);
  out.delta = Eigen::MatrixXi::Ones(cfg.K, cfg.J);
  out.zeta = cfg.K * cfg.J;
  out.tau_used = tau_used;
  return out;
}

}  // namespace

FrameResult proposed_run(const Scenario& sc, std::uint64_t trial_seed) {
  FrameOptions opts;
  opts.estimation = mode_of(sc.cfg);
  return run_frame(sc, trial_seed, opts);
}

FrameResult greedy_run(const Scenario& sc, std::uint64_t trial_seed) {
  FrameOptions opts;
  opts.estimation = mode_of(sc.cfg);
  opts.delta_provider = [](const CsiState& csi, int zeta, const RngFactory&) {
    return greedy_association(csi.alpha2_hat, csi.mu2_hat, zeta);
  };
  return run_frame(sc, trial_seed, opts);
}

FrameResult random_run(const Scenario& sc, std::uint64_t trial_seed) {
  FrameOptions opts;
  opts.estimation = mode_of(sc.cfg);
  opts.delta_provider = [](const CsiState& csi, int zeta,
                           const RngFactory& streams) {
    auto rng = streams.make(Stream::kAssociation);
    return random_association(static_cast<int>(csi.beta2_hat.size()),
                              static_cast<int>(csi.mu2_hat.size()), zeta, rng);
  };
  return run_frame(sc, trial_seed, opts);
}

FrameResult perfect_csi_run(const Scenario& sc, std::uint64_t trial_seed) {
  FrameOptions opts;
  opts.perfect_csi = true;
  return run_frame(sc, trial_seed, opts);
}

FrameResult no_irs_run(const Scenario& sc, std::uint64_t trial_seed,
                       int m_override) {
  SystemConfig cfg = sc.cfg;
  if (m_override > 0) cfg.M = m_override;
  const RngFactory streams(trial_seed);

  Geometry geom = sc.geometry;
  if (geom.users.empty()) geom.users = place_users(cfg, geom, streams);
  const Eigen::ArrayXXi inside = half_space_matrix(geom);

  FrameResult out;
  out.delta = Eigen::MatrixXi::Zero(cfg.K, cfg.J);
  out.zeta = 0;
  out.tau_used = cfg.tau1;
  out.rates.resize(cfg.L, cfg.K);
  out.sinrs.resize(cfg.L, cfg.K);
  for (int block = 0; block < cfg.L; ++block) {
    const UserChannels user =
        draw_user_channels(cfg, geom, sc.table, streams, block, inside);
    for (int k = 0; k < cfg.K; ++k) {
      const Eigen::VectorXcd w =
          mmse_combiner(user.h_d, cfg.p_user_w, cfg.noise_w, k);
      const double s = sinr(user.h_d, w, cfg.p_user_w, cfg.noise_w, k);
      out.sinrs(block, k) = s;
      out.rates(block, k) =
          achievable_rate(s, cfg.T_u, out.tau_used, cfg.gamma_lin);
    }
  }
  out.min_rate = out.rates.rowwise().minCoeff().mean();
  out.mean_rate = out.rates.mean();
  return out;
}

FrameResult userside_protocol_run(const Scenario& sc,
                                  std::uint64_t trial_seed) {
  const SystemConfig& cfg = sc.cfg;
  if (cfg.J > cfg.K) {
    throw std::invalid_argument(
        "userside_protocol_run: needs J <= K (one surface near each of the "
        "first J users)");
  }
  const RngFactory streams(trial_seed);

  Geometry geom = sc.geometry;
  if (geom.users.empty()) geom.users = place_users(cfg, geom, streams);

  // Re-deploy surface j five meters behind user j on its BS line, facing the
  // BS, so both the user and the BS sit in the reflection half-space.
  Geometry ug = geom;
  for (int j = 0; j < cfg.J; ++j) {
    const Eigen::Vector3d toward_bs =
        (geom.bs_position - geom.users[j]).normalized();
    Geometry::Irs s = make_irs(geom.users[j] - 5.0 * toward_bs, toward_bs);
    ug.controllers[j] = s.position + s.axis1;
    ug.irs[j] = std::move(s);
  }

  const int tau_us = userside_block_training(cfg);
  if (tau_us >= cfg.T_u) {
    // Training alone fills the block; nothing is left for payload.
    return zero_rate_result(cfg, tau_us);
  }

  // The nearby fading row applies only to a surface's own user.
  Eigen::ArrayXXi nearby = Eigen::ArrayXXi::Zero(cfg.K, cfg.J);
  for (int j = 0; j < cfg.J; ++j) nearby(j, j) = 1;

  const LargeScaleGains gains = large_scale_gains(cfg, ug, sc.userside, nearby);
  const StaticChannels stat = draw_static_channels(cfg, ug, sc.userside, streams);

  // This architecture re-estimates every cascade every block, so its
  // internal budget must admit all K*J links regardless of the co-site tau;
  // the charged training length is tau_us. The error level knob also
  // switches to the user-side one.
  SystemConfig cfg_us = cfg;
  cfg_us.eps_est = cfg.eps_est_userside;
  cfg_us.tau = cfg.tau1 + cfg.tau3 + (cfg.K * cfg.J * cfg.N1 + cfg.M - 1) / cfg.M * cfg.M / cfg.M * cfg.N1;  // placeholder, fixed below

  // Simpler and exact: lift the budget directly.
  cfg_us.tau = cfg.tau1 + cfg.tau3 + cfg.K * cfg.J * cfg.N1 / cfg.M +
               ((cfg.K * cfg.J * cfg.N1) % cfg.M != 0 ? 1 : 0);

  CsiState csi;
  csi.mu2_hat = gains.mu2;
  csi.beta2_hat = gains.beta2;
  csi.alpha2_hat = gains.alpha2;
  csi.alpha2_ctrl_hat = gains.alpha2_ctrl;
  csi.h_d_hat.resize(cfg.K);
  csi.G_hat.assign(cfg.K, std::vector<Eigen::MatrixXcd>(cfg.J));
  const Eigen::MatrixXi delta = Eigen::MatrixXi::Ones(cfg.K, cfg.J);

  FrameResult out;
  out.delta = delta;
  out.zeta = cfg.K * cfg.J;
  out.tau_used = tau_us;
  out.rates.resize(cfg.L, cfg.K);
  out.sinrs.resize(cfg.L, cfg.K);

  const int group_size = cfg.N / cfg.N1;
  for (int block = 0; block < cfg.L; ++block) {
    const UserChannels user =
        draw_user_channels(cfg, ug, sc.userside, streams, block, nearby);

    // Per-surface reference pick: uniform among users inside the reflection
    // half-space, else the nearest user. Estimation error for everyone else
    // scales with how much weaker the reference's link is.
    Eigen::MatrixXd eps_scale(cfg.K, cfg.J);
    for (int j = 0; j < cfg.J; ++j) {
      std::vector<int> candidates;
      for (int k = 0; k < cfg.K; ++k) {
        if (half_space_test(ug.irs[j], geom.users[k])) candidates.push_back(k);
      }
      int ref;
      auto rng = streams.make(Stream::kReferencePick, block, j);
      if (!candidates.empty()) {
        const int pick = static_cast<int>(uniform01(rng) * candidates.size());
        ref = candidates[std::min(pick, static_cast<int>(candidates.size()) - 1)];
      } else {
        ref = 0;
        double best = (geom.users[0] - ug.irs[j].position).norm();
        for (int k = 1; k < cfg.K; ++k) {
          const double d = (geom.users[k] - ug.irs[j].position).norm();
          if (d < best) {
            best = d;
            ref = k;
          }
        }
      }
      const double ref_gain = std::max(gains.alpha2(ref, j), 1e-300);
      for (int k = 0; k < cfg.K; ++k) {
        eps_scale(k, j) =
            k == ref ? 1.0 : 1.0 + gains.alpha2(k, j) / ref_gain;
      }
    }

    stage2_estimates(cfg_us, stat, user, delta, EstimationMode::kNoisy, csi,
                     streams, block, &eps_scale);
    const SinrModel model = build_sinr_model(cfg_us, csi, stat.l_bs, delta);

    auto init_rng = streams.make(Stream::kAoInit, block);
    const AoResult ao = ao_solve(model, cfg_us, init_rng);

    Eigen::VectorXcd theta_elements(cfg.N * cfg.J);
    for (int j = 0; j < cfg.J; ++j) {
      theta_elements.segment(j * cfg.N, cfg.N) =
          replicate_groups(ao.theta.segment(j * cfg.N1, cfg.N1), group_size);
    }
    const std::vector<Eigen::VectorXcd> h =
        phase3_overall(cfg, stat, user, theta_elements);

    for (int k = 0; k < cfg.K; ++k) {
      const Eigen::VectorXcd w = mmse_combiner(h, cfg.p_user_w, cfg.noise_w, k);
      const double s = sinr(h, w, cfg.p_user_w, cfg.noise_w, k);
      out.sinrs(block, k) = s;
      out.rates(block, k) = achievable_rate(s, cfg.T_u, tau_us, cfg.gamma_lin);
    }
  }
  out.min_rate = out.rates.rowwise().minCoeff().mean();
  out.mean_rate = out.rates.mean();
  return out;
}

FrameResult run_scheme(const Scenario& sc, Scheme scheme,
                       std::uint64_t trial_seed, int noirs_m_override) {
  switch (scheme) {
    case Scheme::kProposed: return proposed_run(sc, trial_seed);
    case Scheme::kGreedyAssoc: return greedy_run(sc, trial_seed);
    case Scheme::kRandomAssoc: return random_run(sc, trial_seed);
    case Scheme::kUserSideProtocol: return userside_protocol_run(sc, trial_seed);
    case Scheme::kPerfectCsi: return perfect_csi_run(sc, trial_seed);
    case Scheme::kNoIrs: return no_irs_run(sc, trial_seed, noirs_m_override);
  }
  throw std::logic_error("run_scheme: unhandled scheme");
}

namespace {

std::string format_value(double v) {
  char buf[32];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

}  // namespace

std::vector<ResultRow> monte_carlo(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  if (spec.schemes.empty()) throw std::invalid_argument("monte_carlo: no schemes");
  if (!spec.sweep_key.empty() && spec.sweep_values.empty())
    throw std::invalid_argument("monte_carlo: sweep key without values");
  if (spec.sweep_key == "base_seed")
    throw std::invalid_argument("monte_carlo: sweeping base_seed is not supported");

  std::vector<Scenario> grid;
  std::vector<double> values;
  if (spec.sweep_key.empty()) {
    grid.push_back(spec.scenario);
    values.push_back(0.0);
  } else {
    for (double v : spec.sweep_values) {
      grid.push_back(scenario_with_overrides(
          spec.scenario, {{spec.sweep_key, format_value(v)}}));
      values.push_back(v);
    }
  }

  const std::size_t S = spec.schemes.size();
  const std::size_t T = static_cast<std::size_t>(spec.trials);
  const std::size_t total = grid.size() * S * T;
  std::vector<ResultRow> rows(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t g = i / (S * T);
      const std::size_t s = (i / T) % S;
      const std::size_t t = i % T;
      const Scenario& scn = grid[g];
      const std::uint64_t seed = scn.cfg.base_seed + t;
      const FrameResult fr =
          run_scheme(scn, spec.schemes[s], seed, spec.noirs_m_override);
      ResultRow& row = rows[i];
      row.scheme = scheme_name(spec.schemes[s]);
      row.swept_param = spec.sweep_key.empty() ? "none" : spec.sweep_key;
      row.value = values[g];
      row.trial = static_cast<int>(t);
      row.min_rate = fr.min_rate;
      row.mean_user_rate = fr.mean_rate;
      row.tau_used = fr.tau_used;
      row.zeta = fr.zeta;
      row.seed = seed;
    }
  };

  const int threads = std::max(1, std::min<int>(spec.threads,
                                                static_cast<int>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> samples;
  for (const auto& r : rows) {
    int idx = -1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].scheme == r.scheme && out[i].swept_param == r.swept_param &&
          out[i].value == r.value) {
        idx = static_cast<int>(i);
        break;
      }
    }
    if (idx < 0) {
      out.push_back({r.scheme, r.swept_param, r.value, 0, 0.0, 0.0, 0.0});
      samples.emplace_back();
      idx = static_cast<int>(out.size()) - 1;
    }
    out[idx].trials += 1;
    out[idx].min_rate_mean += r.min_rate;
    out[idx].mean_user_rate_mean += r.mean_user_rate;
    samples[idx].push_back(r.min_rate);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int n = out[i].trials;
    out[i].min_rate_mean /= n;
    out[i].mean_user_rate_mean /= n;
    double ss = 0.0;
    for (double v : samples[i]) {
      const double d = v - out[i].min_rate_mean;
      ss += d * d;
    }
    out[i].min_rate_stderr =
        n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
  }
  return out;
}

namespace {

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_header(std::ostream& out, const Scenario& sc) {
  out << "# " << kArtifactVersion << "\n";
  out << "# config_hash=" << config_hash(sc) << "\n";
}

}  // namespace

void write_table(std::ostream& out, const Scenario& sc,
                 const std::vector<ResultRow>& rows) {
  write_header(out, sc);
  out << "scheme,swept_param,value,trial,min_rate,mean_user_rate,tau_used,zeta,seed\n";
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.swept_param << ',' << format_value(r.value)
        << ',' << r.trial << ',' << format_rate(r.min_rate) << ','
        << format_rate(r.mean_user_rate) << ',' << r.tau_used << ',' << r.zeta
        << ',' << r.seed << '\n';
  }
}

void write_summary(std::ostream& out, const Scenario& sc,
                   const std::vector<SummaryRow>& rows) {
  write_header(out, sc);
  out << "scheme,swept_param,value,trials,min_rate_mean,min_rate_stderr,"
         "mean_user_rate_mean\n";
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.swept_param << ',' << format_value(r.value)
        << ',' << r.trials << ',' << format_rate(r.min_rate_mean) << ','
        << format_rate(r.min_rate_stderr) << ','
        << format_rate(r.mean_user_rate_mean) << '\n';
  }
}

void write_jsonl(std::ostream& out, const Scenario& sc,
                 const std::vector<ResultRow>& rows,
                 const std::vector<SummaryRow>& summary) {
  nlohmann::json meta = {{"kind", "meta"},
                         {"artifact", kArtifactVersion},
                         {"config_hash", config_hash(sc)}};
  out << meta.dump() << '\n';
  for (const auto& r : rows) {
    nlohmann::json row = {{"kind", "result"},
                          {"scheme", r.scheme},
                          {"swept_param", r.swept_param},
                          {"value", r.value},
                          {"trial", r.trial},
                          {"min_rate", r.min_rate},
                          {"mean_user_rate", r.mean_user_rate},
                          {"tau_used", r.tau_used},
                          {"zeta", r.zeta},
                          {"seed", r.seed}};
    out << row.dump() << '\n';
  }
  for (const auto& r : summary) {
    nlohmann::json row = {{"kind", "summary"},
                          {"scheme", r.scheme},
                          {"swept_param", r.swept_param},
                          {"value", r.value},
                          {"trials", r.trials},
                          {"min_rate_mean", r.min_rate_mean},
                          {"min_rate_stderr", r.min_rate_stderr},
                          {"mean_user_rate_mean", r.mean_user_rate_mean}};
    out << row.dump() << '\n';
  }
}

}  // namespace cosite
