#include "cosite/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cosite {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Direction cosine pair of a remote point seen from a surface grid.
std::pair<double, double> grid_cosines(const Geometry::Irs& s,
                                       const Eigen::Vector3d& remote) {
  Eigen::Vector3d d = (remote - s.position).normalized();
  return {d.dot(s.axis1), d.dot(s.axis2)};
}

Eigen::VectorXcd surface_response(const Geometry::Irs& s, int count,
                                  const Eigen::Vector3d& remote) {
  auto [n1, n2] = upa_factors(count);
  auto [c1, c2] = grid_cosines(s, remote);
  return steering_upa(n1, n2, c1, c2);
}

// Mixes a deterministic unit-modulus component with an i.i.d. Gaussian one
// according to the Rician factor, scaled to per-entry power `gain`.
// Sentinels: kappa_db = +inf keeps only the first term, -inf only the second.
struct RicianMix {
  double los_amp;   // multiplies the unit-modulus component
  double nlos_amp;  // multiplies CN(0,1) entries
  bool draw;        // whether Gaussian draws are needed at all

  RicianMix(double gain, double kappa_db) {
    const double amp = std::sqrt(gain);
    if (kappa_db == kInf) {
      los_amp = amp;
      nlos_amp = 0.0;
      draw = false;
    } else if (kappa_db == -kInf) {
      los_amp = 0.0;
      nlos_amp = amp;
      draw = true;
    } else {
      const double kappa = db_to_linear(kappa_db);
      los_amp = amp * std::sqrt(kappa / (1.0 + kappa));
      nlos_amp = amp * std::sqrt(1.0 / (1.0 + kappa));
      draw = true;
    }
  }
};

Eigen::VectorXcd draw_vector(const Eigen::VectorXcd& los_unit,
                             const RicianMix& mix, std::mt19937_64& rng) {
  const int n = static_cast<int>(los_unit.size());
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> v = mix.los_amp * los_unit[i];
    if (mix.draw) v += mix.nlos_amp * complex_gaussian(rng);
    out[i] = v;
  }
  return out;
}

}  // namespace

ChannelTable cosite_table() {
  ChannelTable t;
  t.user_bs = {3.5, 3.0};
  t.irs_bs = {2.1, 30.0};
  t.user_irs_outside = {4.8, -kInf};
  t.user_irs_inside = {3.0, 3.0};
  t.ctrl_irs = {2.1, 30.0};
  return t;
}

ChannelTable userside_table() {
  ChannelTable t;
  t.user_bs = {3.5, 3.0};
  t.irs_bs = {3.0, 3.0};
  t.user_irs_outside = {4.8, -kInf};
  t.user_irs_inside = {2.1, 30.0};
  t.ctrl_irs = {2.1, 30.0};
  return t;
}

double pathloss_gain(double c0_lin, double distance_m, double exponent) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("pathloss_gain: distance must be positive");
  }
  return c0_lin * std::pow(distance_m, -exponent);
}

Eigen::VectorXcd steering_ula(int count, double cos_angle) {
  Eigen::VectorXcd a(count);
  for (int m = 0; m < count; ++m) {
    a[m] = std::polar(1.0, M_PI * m * cos_angle);
  }
  return a;
}

Eigen::VectorXcd steering_upa(int n1, int n2, double cos1, double cos2) {
  Eigen::VectorXcd a(n1 * n2);
  for (int i2 = 0; i2 < n2; ++i2) {
    for (int i1 = 0; i1 < n1; ++i1) {
      a[i2 * n1 + i1] = std::polar(1.0, M_PI * (i1 * cos1 + i2 * cos2));
    }
  }
  return a;
}

std::pair<int, int> upa_factors(int count) {
  if (count < 1) throw std::invalid_argument("upa_factors: count must be >= 1");
  int d = static_cast<int>(std::sqrt(static_cast<double>(count)));
  while (d > 1 && count % d != 0) --d;
  return {d, count / d};
}

bool half_space_test(const Geometry::Irs& irs, const Eigen::Vector3d& point) {
  return (point - irs.position).dot(irs.normal) > 0.0;
}

Eigen::ArrayXXi half_space_matrix(const Geometry& geom) {
  const int K = static_cast<int>(geom.users.size());
  const int J = static_cast<int>(geom.irs.size());
  Eigen::ArrayXXi inside(K, J);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < J; ++j) {
      inside(k, j) = half_space_test(geom.irs[j], geom.users[k]) ? 1 : 0;
    }
  }
  return inside;
}

LargeScaleGains large_scale_gains(const SystemConfig& cfg, const Geometry& geom,
                                  const ChannelTable& table,
                                  const Eigen::ArrayXXi& inside) {
  LargeScaleGains g;
  g.beta2.resize(cfg.K);
  g.alpha2.resize(cfg.K, cfg.J);
  g.mu2.resize(cfg.J);
  g.alpha2_ctrl.resize(cfg.J);
  for (int k = 0; k < cfg.K; ++k) {
    g.beta2[k] = pathloss_gain(cfg.c0_lin,
                               (geom.users[k] - geom.bs_position).norm(),
                               table.user_bs.pathloss_exponent);
    for (int j = 0; j < cfg.J; ++j) {
      const LinkModel& row =
          inside(k, j) ? table.user_irs_inside : table.user_irs_outside;
      g.alpha2(k, j) =
          pathloss_gain(cfg.c0_lin, (geom.users[k] - geom.irs[j].position).norm(),
                        row.pathloss_exponent);
    }
  }
  for (int j = 0; j < cfg.J; ++j) {
    g.mu2[j] = pathloss_gain(cfg.c0_lin,
                             (geom.irs[j].position - geom.bs_position).norm(),
                             table.irs_bs.pathloss_exponent);
    g.alpha2_ctrl[j] = pathloss_gain(
        cfg.c0_lin, (geom.controllers[j] - geom.irs[j].position).norm(),
        table.ctrl_irs.pathloss_exponent);
  }
  return g;
}

StaticChannels draw_static_channels(const SystemConfig& cfg,
                                    const Geometry& geom,
                                    const ChannelTable& table,
                                    const RngFactory& streams) {
  StaticChannels sc;
  sc.F.resize(cfg.J);
  sc.t_ctrl.resize(cfg.J);
  sc.l_bs.resize(cfg.J);
  sc.l_irs.resize(cfg.J);
  for (int j = 0; j < cfg.J; ++j) {
    const auto& s = geom.irs[j];
    const double mu2 = pathloss_gain(
        cfg.c0_lin, (s.position - geom.bs_position).norm(),
        table.irs_bs.pathloss_exponent);
    const double cosb =
        ((s.position - geom.bs_position).normalized()).dot(geom.bs_axis);
    sc.l_bs[j] = steering_ula(cfg.M, cosb);
    sc.l_irs[j] = surface_response(s, cfg.N, geom.bs_position);

    RicianMix mix(mu2, table.irs_bs.rician_k_db);
    auto rng = streams.make(Stream::kIrsBsFading, j);
    Eigen::MatrixXcd F(cfg.M, cfg.N);
    for (int n = 0; n < cfg.N; ++n) {
      const std::complex<double> los_col = std::conj(sc.l_irs[j][n]);
      for (int m = 0; m < cfg.M; ++m) {
        std::complex<double> v = mix.los_amp * sc.l_bs[j][m] * los_col;
        if (mix.draw) v += mix.nlos_amp * complex_gaussian(rng);
        F(m, n) = v;
      }
    }
    sc.F[j] = std::move(F);

    const double a2c = pathloss_gain(
        cfg.c0_lin, (geom.controllers[j] - s.position).norm(),
        table.ctrl_irs.pathloss_exponent);
    RicianMix cmix(a2c, table.ctrl_irs.rician_k_db);
    auto crng = streams.make(Stream::kCtrlFading, j);
    sc.t_ctrl[j] =
        draw_vector(surface_response(s, cfg.N, geom.controllers[j]), cmix, crng);
  }
  return sc;
}

UserChannels draw_user_channels(const SystemConfig& cfg, const Geometry& geom,
                                const ChannelTable& table,
                                const RngFactory& streams, int block,
                                const Eigen::ArrayXXi& inside) {
  UserChannels uc;
  uc.h_d.resize(cfg.K);
  uc.t.assign(cfg.K, std::vector<Eigen::VectorXcd>(cfg.J));
  for (int k = 0; k < cfg.K; ++k) {
    const Eigen::Vector3d& u = geom.users[k];
    const double beta2 = pathloss_gain(cfg.c0_lin, (u - geom.bs_position).norm(),
                                       table.user_bs.pathloss_exponent);
    const double cosb = ((u - geom.bs_position).normalized()).dot(geom.bs_axis);
    RicianMix dmix(beta2, table.user_bs.rician_k_db);
    auto drng = streams.make(Stream::kDirectFading, block, k);
    uc.h_d[k] = draw_vector(steering_ula(cfg.M, cosb), dmix, drng);

    for (int j = 0; j < cfg.J; ++j) {
      const auto& s = geom.irs[j];
      const LinkModel& row =
          inside(k, j) ? table.user_irs_inside : table.user_irs_outside;
      const double a2 = pathloss_gain(cfg.c0_lin, (u - s.position).norm(),
                                      row.pathloss_exponent);
      RicianMix mix(a2, row.rician_k_db);
      auto rng = streams.make(Stream::kUserIrsFading, block, k, j);
      uc.t[k][j] = draw_vector(surface_response(s, cfg.N, u), mix, rng);
    }
  }
  return uc;
}

ChannelSet draw_channels(const SystemConfig& cfg, const Geometry& geom,
                         const ChannelTable& table, const RngFactory& streams) {
  if (geom.users.empty()) {
    throw std::invalid_argument("draw_channels: geometry has no user positions");
  }
  ChannelSet cs;
  cs.inside = half_space_matrix(geom);
  cs.gains = large_scale_gains(cfg, geom, table, cs.inside);
  cs.stat = draw_static_channels(cfg, geom, table, streams);
  cs.user = draw_user_channels(cfg, geom, table, streams, 0, cs.inside);
  return cs;
}

Eigen::MatrixXcd cascade(const Eigen::MatrixXcd& F, const Eigen::VectorXcd& t) {
  if (F.cols() != t.size()) {
    throw std::invalid_argument("cascade: dimension mismatch");
  }
  return F * t.asDiagonal();
}

Eigen::VectorXcd overall_channel(const Eigen::VectorXcd& h_d,
                                 const std::vector<Eigen::MatrixXcd>& F,
                                 const std::vector<Eigen::VectorXcd>& t,
                                 const Eigen::VectorXcd& theta_elements) {
  Eigen::VectorXcd h = h_d;
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < F.size(); ++j) {
    const Eigen::Index n = F[j].cols();
    if (t[j].size() != n || offset + n > theta_elements.size()) {
      throw std::invalid_argument("overall_channel: dimension mismatch");
    }
    h.noalias() +=
        F[j] * t[j].cwiseProduct(theta_elements.segment(offset, n));
    offset += n;
  }
  if (offset != theta_elements.size()) {
    throw std::invalid_argument("overall_channel: reflection length mismatch");
  }
  return h;
}

Eigen::MatrixXcd group_channels(const Eigen::MatrixXcd& G, int n_groups) {
  if (n_groups < 1 || G.cols() % n_groups != 0) {
    throw std::invalid_argument("group_channels: group count must divide columns");
  }
  const Eigen::Index gs = G.cols() / n_groups;
  Eigen::MatrixXcd out(G.rows(), n_groups);
  for (int g = 0; g < n_groups; ++g) {
    out.col(g) = G.middleCols(g * gs, gs).rowwise().sum();
  }
  return out;
}

Eigen::VectorXcd replicate_groups(const Eigen::VectorXcd& group_values,
                                  int group_size) {
  if (group_size < 1) {
    throw std::invalid_argument("replicate_groups: group size must be >= 1");
  }
  Eigen::VectorXcd out(group_values.size() * group_size);
  for (Eigen::Index g = 0; g < group_values.size(); ++g) {
    out.segment(g * group_size, group_size).setConstant(group_values[g]);
  }
  return out;
}

}  // namespace cosite
