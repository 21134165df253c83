#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace cosite {

// dB helpers. Decibel values live only at the config boundary; everything
// internal is linear scale.
double db_to_linear(double db);
double linear_to_db(double lin);  // throws std::domain_error for lin <= 0
double dbm_to_watt(double dbm);

// System-level simulation parameters. Field names double as config file keys.
struct SystemConfig {
  int M = 10;    // BS antennas
  int N = 200;   // reflecting elements per surface
  int J = 4;     // surfaces co-located with the BS
  int K = 6;     // single-antenna uplink users
  int N1 = 50;   // element groups per surface (group size N/N1)
  int L = 1;     // fading blocks per frame
  int T_u = 5000;  // symbols per fading block

  // Per-frame training split: tau1 direct pilots, tau3 overall-channel
  // pilots, and whatever tau leaves for cascaded estimation in between.
  int tau1 = 12;
  int tau3 = 12;
  int tau = 144;

  double p_user_dbm = 30.0;
  double p_ctrl_dbm = 43.0;
  double noise_dbm = -80.0;
  double gamma_db = 8.0;  // SINR gap to capacity
  double c0_db = -30.0;   // reference pathloss gain at 1 m

  double rho = 0.01;    // projected-subgradient step scale
  double eps1 = 1e-5;   // association convergence threshold
  double eps2 = 1e-3;   // reflection inner-loop threshold
  double eps3 = 1e-3;   // alternating-optimization threshold

  // Estimation error knobs: 0 means perfect estimates. eps_est scales the
  // per-entry error variance of cascaded estimates in the proposed protocol;
  // eps_est_userside plays the same role for the user-side benchmark, whose
  // errors additionally grow with weak reference users.
  double eps_est = 0.0;
  double eps_est_userside = 1.0;

  int sca_iter_cap = 50;
  int ao_iter_cap = 100;
  int gpm_iter_cap = 500;
  int power_iter_cap = 10000;

  std::uint64_t base_seed = 1;

  // Linear-scale values derived once by finalize().
  double p_user_w = 0.0;
  double p_ctrl_w = 0.0;
  double noise_w = 0.0;
  double gamma_lin = 0.0;
  double c0_lin = 0.0;

  // Converts dB fields and validates. Throws std::invalid_argument with the
  // offending field named. Idempotent, so overrides may be applied and the
  // config re-finalized.
  void finalize();
};

// Derived per-frame training arithmetic.
struct TrainingBudget {
  int zeta;              // cascaded links estimable within tau
  int tau2;              // pilot symbols those links actually consume
  int tau2_max;          // cascaded-phase length covering all K*J links
  int tau_max;           // training length with full cascaded CSI
  int tau_userside_min;  // per-block floor for a user-side anchored scheme
};

TrainingBudget compute_budget(const SystemConfig& cfg);

// Per-block training length of the user-side benchmark protocol: direct and
// overall pilots, full estimation of one reference cascade per surface, and
// scaled re-estimation for every other user on every surface.
int userside_block_training(const SystemConfig& cfg);

// Deployment geometry. Array element spacing is half a wavelength
// everywhere, so positions only enter through direction cosines and
// distances.
struct Geometry {
  Eigen::Vector3d bs_position{0.0, 0.0, 10.0};
  Eigen::Vector3d bs_axis{1.0, 0.0, 0.0};  // ULA axis, unit norm

  struct Irs {
    Eigen::Vector3d position;
    Eigen::Vector3d normal;  // reflection half-space is dot(x - position, normal) > 0
    Eigen::Vector3d axis1;   // in-plane grid axes, unit, mutually orthogonal
    Eigen::Vector3d axis2;
  };
  std::vector<Irs> irs;
  std::vector<Eigen::Vector3d> controllers;  // one control unit per surface
  std::vector<Eigen::Vector3d> users;        // may stay empty until placement

  // Axis-aligned user drop region.
  Eigen::Vector3d region_lo{-100.0, -100.0, 1.5};
  Eigen::Vector3d region_hi{100.0, 100.0, 1.5};
};

// Builds a surface record with grid axes derived from the facing direction.
Geometry::Irs make_irs(const Eigen::Vector3d& position,
                       const Eigen::Vector3d& normal);

// Reference deployment: J surfaces on a 5 m ring around the BS, each facing
// it, with a control unit 1 m off the surface center along the grid.
Geometry default_geometry(const SystemConfig& cfg);

// Throws std::invalid_argument when sizes or axes are inconsistent with cfg.
void validate_geometry(const SystemConfig& cfg, const Geometry& geom);

}  // namespace cosite
