#pragma once

#include <utility>
#include <vector>

#include "cosite/config.hpp"
#include "cosite/rng.hpp"

namespace cosite {

// One fading table row. rician_k_db = -inf selects Rayleigh fading and
// +inf a deterministic pure-LoS link.
struct LinkModel {
  double pathloss_exponent = 2.0;
  double rician_k_db = 0.0;
};

// Per-link-class fading parameters.
struct ChannelTable {
  LinkModel user_bs;
  LinkModel irs_bs;
  LinkModel user_irs_outside;  // user beyond the reflection half-space
  LinkModel user_irs_inside;
  LinkModel ctrl_irs;
};

// Co-site deployment rows: strong static IRS-BS and controller links,
// users Rician when inside a reflection half-space and Rayleigh otherwise.
ChannelTable cosite_table();

// User-side deployment rows: each surface sits next to one user, so the
// inside class models that nearby user and the outside class the rest.
ChannelTable userside_table();

// Distance power law c0 * d^-exponent with c0 the gain at 1 m.
double pathloss_gain(double c0_lin, double distance_m, double exponent);

// Uniform linear array response at half-wavelength spacing: entry m equals
// exp(i*pi*m*cos_angle).
Eigen::VectorXcd steering_ula(int count, double cos_angle);

// Planar response as the Kronecker product of two linear factors; entry
// i2*n1 + i1 equals exp(i*pi*(i1*cos1 + i2*cos2)).
Eigen::VectorXcd steering_upa(int n1, int n2, double cos1, double cos2);

// Grid factorization used for reflecting surfaces: first factor is the
// largest divisor of count not exceeding sqrt(count).
std::pair<int, int> upa_factors(int count);

// Reflection half-space membership; points on the boundary count as outside.
bool half_space_test(const Geometry::Irs& irs, const Eigen::Vector3d& point);

// K x J membership matrix for the configured users.
Eigen::ArrayXXi half_space_matrix(const Geometry& geom);

// Geometry-derived large-scale power gains.
struct LargeScaleGains {
  Eigen::VectorXd beta2;        // K, user-BS
  Eigen::MatrixXd alpha2;       // K x J, user-surface
  Eigen::VectorXd mu2;          // J, surface-BS
  Eigen::VectorXd alpha2_ctrl;  // J, controller-surface
};

LargeScaleGains large_scale_gains(const SystemConfig& cfg, const Geometry& geom,
                                  const ChannelTable& table,
                                  const Eigen::ArrayXXi& inside);

// Frame-static links: surface-BS matrices and controller-surface vectors,
// plus the LoS array responses of each surface seen from the BS and toward
// it (the rank-one factors of the static links).
struct StaticChannels {
  std::vector<Eigen::MatrixXcd> F;       // J entries, M x N
  std::vector<Eigen::VectorXcd> t_ctrl;  // J entries, N
  std::vector<Eigen::VectorXcd> l_bs;    // J entries, M
  std::vector<Eigen::VectorXcd> l_irs;   // J entries, N
};

// Per-block user links.
struct UserChannels {
  std::vector<Eigen::VectorXcd> h_d;             // K entries, M
  std::vector<std::vector<Eigen::VectorXcd>> t;  // K x J entries, N
};

struct ChannelSet {
  LargeScaleGains gains;
  Eigen::ArrayXXi inside;  // K x J
  StaticChannels stat;
  UserChannels user;
};

StaticChannels draw_static_channels(const SystemConfig& cfg,
                                    const Geometry& geom,
                                    const ChannelTable& table,
                                    const RngFactory& streams);

UserChannels draw_user_channels(const SystemConfig& cfg, const Geometry& geom,
                                const ChannelTable& table,
                                const RngFactory& streams, int block,
                                const Eigen::ArrayXXi& inside);

// Full draw for one fading block (block 0), mainly for tests and one-shot
// experiments. Requires geom.users to be populated.
ChannelSet draw_channels(const SystemConfig& cfg, const Geometry& geom,
                         const ChannelTable& table, const RngFactory& streams);

// Cascaded matrix F * diag(t).
Eigen::MatrixXcd cascade(const Eigen::MatrixXcd& F, const Eigen::VectorXcd& t);

// h_d + sum_j F_j diag(t_j) theta_j with per-element reflection values
// stacked surface by surface (length N*J).
Eigen::VectorXcd overall_channel(const Eigen::VectorXcd& h_d,
                                 const std::vector<Eigen::MatrixXcd>& F,
                                 const std::vector<Eigen::VectorXcd>& t,
                                 const Eigen::VectorXcd& theta_elements);

// Column-block sums: adjacent groups of N/n_groups elements share one
// reflection coefficient, so their columns add.
Eigen::MatrixXcd group_channels(const Eigen::MatrixXcd& G, int n_groups);

// Expands per-group values to per-element values (each repeated group_size
// times).
Eigen::VectorXcd replicate_groups(const Eigen::VectorXcd& group_values,
                                  int group_size);

}  // namespace cosite
