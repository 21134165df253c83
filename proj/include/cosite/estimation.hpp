#pragma once

#include <vector>

#include "cosite/channel.hpp"
#include "cosite/config.hpp"
#include "cosite/rng.hpp"

namespace cosite {

enum class EstimationMode { kPerfect, kNoisy };

// Everything the receiver knows about the channels. Long-term quantities
// come from the one-off reference stage; per-block estimates are filled in
// by the per-frame pilot phases.
struct CsiState {
  // Reference cascaded matrices through each surface's own controller,
  // kept at element resolution (M x N).
  std::vector<Eigen::MatrixXcd> G_ctrl_hat;

  // Statistical CSI.
  Eigen::VectorXd mu2_hat;               // J
  Eigen::VectorXd beta2_hat;             // K
  Eigen::MatrixXd alpha2_hat;            // K x J
  Eigen::VectorXd alpha2_ctrl_hat;       // J

  // Per-block estimates: direct channels and, where scheduled, cascaded
  // matrices grouped to N1 columns. Unscheduled entries stay empty.
  std::vector<Eigen::VectorXcd> h_d_hat;             // K
  std::vector<std::vector<Eigen::MatrixXcd>> G_hat;  // K x J
  Eigen::MatrixXi delta;                             // K x J schedule
};

// Long-term reference stage: controller-anchored cascades plus statistical
// CSI. The surface-BS gain estimate divides the mean squared magnitude of
// the reference cascade by the known controller-surface gain.
CsiState stage1_long_term(const SystemConfig& cfg, const StaticChannels& stat,
                          const LargeScaleGains& gains);

// Per-block pilot phases: direct estimates for all users, then cascaded
// estimates for the scheduled (user, surface) pairs. In noisy mode each
// cascaded entry picks up CN(0, eps_est * noise/p) error; eps_scale, when
// given, multiplies that variance per pair (used by benchmarks that model
// error accumulation through weak reference users). Throws if the schedule
// exceeds the Phase II budget.
void stage2_estimates(const SystemConfig& cfg, const StaticChannels& stat,
                      const UserChannels& user, const Eigen::MatrixXi& delta,
                      EstimationMode mode, CsiState& csi,
                      const RngFactory& streams, int block,
                      const Eigen::MatrixXd* eps_scale = nullptr);

// Overall-channel pilots: exact effective channels under the applied
// per-element reflection values (length N*J).
std::vector<Eigen::VectorXcd> phase3_overall(
    const SystemConfig& cfg, const StaticChannels& stat,
    const UserChannels& user, const Eigen::VectorXcd& theta_elements);

}  // namespace cosite
