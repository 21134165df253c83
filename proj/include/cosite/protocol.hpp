#pragma once

#include <functional>
#include <vector>

#include "cosite/association.hpp"
#include "cosite/channel.hpp"
#include "cosite/config.hpp"
#include "cosite/estimation.hpp"
#include "cosite/reflection.hpp"
#include "cosite/scenario.hpp"

namespace cosite {

// Linear MMSE combiner for user k from the overall channels of all users
// (unit norm).
Eigen::VectorXcd mmse_combiner(const std::vector<Eigen::VectorXcd>& h,
                               double p, double sigma2, int k);

// Uplink SINR of user k under combiner w.
double sinr(const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXcd& w,
            double p, double sigma2, int k);

// Effective rate: training-overhead prelog times the gap-adjusted capacity.
// A training length reaching the block length yields zero.
double achievable_rate(double sinr_value, int T_u, int tau, double gamma_lin);

// Pluggable cascade scheduler; the default is the load-balancing
// association. Benchmarks provide their own (top-gain, random, all-on).
using DeltaProvider = std::function<Eigen::MatrixXi(
    const CsiState& csi, int zeta, const RngFactory& streams)>;

struct FrameOptions {
  DeltaProvider delta_provider;        // empty = load-balancing association
  EstimationMode estimation = EstimationMode::kPerfect;
  const Eigen::MatrixXd* eps_scale = nullptr;
  bool perfect_csi = false;  // genie benchmark: element-level true-CSI model
  int tau_override = -1;     // charged training length, -1 = cfg.tau
};

struct FrameResult {
  Eigen::MatrixXd rates;  // L x K
  Eigen::MatrixXd sinrs;  // L x K
  double min_rate = 0.0;   // worst-user rate averaged over blocks
  double mean_rate = 0.0;  // mean user rate averaged over blocks
  Eigen::MatrixXi delta;
  int zeta = 0;
  int tau_used = 0;
  Eigen::VectorXd association_trace;
  std::vector<Eigen::VectorXd> ao_traces;  // one per fading block
};

// One protocol frame: static draws and the long-term reference stage,
// association against the training budget, then per fading block the pilot
// phases, joint reflection/combining optimization, and rate evaluation with
// MMSE receive combining on the exact overall channels. Draws user positions
// from the configured region when the scenario leaves them empty.
FrameResult run_frame(const Scenario& sc, std::uint64_t trial_seed,
                      const FrameOptions& opts = {});

// Places users uniformly in the scenario region using the placement stream.
std::vector<Eigen::Vector3d> place_users(const SystemConfig& cfg,
                                         const Geometry& geom,
                                         const RngFactory& streams);

}  // namespace cosite
