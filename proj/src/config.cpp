#include "cosite/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cosite {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) {
  if (!(lin > 0.0)) {
    throw std::domain_error("linear_to_db: value must be positive, got " +
                            std::to_string(lin));
  }
  return 10.0 * std::log10(lin);
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SystemConfig: ") + what);
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

void SystemConfig::finalize() {
  require(M >= 1, "M must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(J >= 1, "J must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(N1 >= 1, "N1 must be >= 1");
  require(N % N1 == 0, "N1 must divide N");
  require(L >= 1, "L must be >= 1");
  require(T_u >= 1, "T_u must be >= 1");
  require(tau1 >= K, "tau1 must be >= K (one pilot per user)");
  require(tau3 >= K, "tau3 must be >= K (one pilot per user)");
  require(tau >= tau1 + tau3, "tau must cover tau1 + tau3");
  require(tau <= T_u, "tau must not exceed the block length T_u");
  require(rho > 0.0, "rho must be positive");
  require(eps1 > 0.0, "eps1 must be positive");
  require(eps2 > 0.0, "eps2 must be positive");
  require(eps3 > 0.0, "eps3 must be positive");
  require(eps_est >= 0.0, "eps_est must be nonnegative");
  require(eps_est_userside >= 0.0, "eps_est_userside must be nonnegative");
  require(sca_iter_cap >= 1, "sca_iter_cap must be >= 1");
  require(ao_iter_cap >= 1, "ao_iter_cap must be >= 1");
  require(gpm_iter_cap >= 1, "gpm_iter_cap must be >= 1");
  require(power_iter_cap >= 1, "power_iter_cap must be >= 1");

  p_user_w = dbm_to_watt(p_user_dbm);
  p_ctrl_w = dbm_to_watt(p_ctrl_dbm);
  noise_w = dbm_to_watt(noise_dbm);
  gamma_lin = db_to_linear(gamma_db);
  c0_lin = db_to_linear(c0_db);
}

TrainingBudget compute_budget(const SystemConfig& cfg) {
  TrainingBudget b{};
  // Each estimated cascade costs N1/M pilot symbols, so the leftover budget
  // tau - tau1 - tau3 admits floor(leftover * M / N1) cascades, clamped to
  // the K*J links that exist.
  const int leftover = cfg.tau - cfg.tau1 - cfg.tau3;
  long long zeta = static_cast<long long>(leftover) * cfg.M / cfg.N1;
  if (zeta < 0) zeta = 0;
  const long long all = static_cast<long long>(cfg.K) * cfg.J;
  if (zeta > all) zeta = all;
  b.zeta = static_cast<int>(zeta);
  b.tau2 = ceil_div(b.zeta * cfg.N1, cfg.M);
  b.tau2_max = ceil_div(cfg.K * cfg.J * cfg.N1, cfg.M);
  b.tau_max = cfg.tau1 + b.tau2_max + cfg.tau3;
  // User-side anchored schemes must re-estimate every block: one reference
  // cascade per surface in full, plus the remaining K - J users somewhere.
  const int extra = cfg.K > cfg.J ? ceil_div((cfg.K - cfg.J) * cfg.N1, cfg.M) : 0;
  b.tau_userside_min = cfg.tau1 + cfg.tau3 + cfg.N1 * cfg.J + extra;
  return b;
}

int userside_block_training(const SystemConfig& cfg) {
  return cfg.tau1 + cfg.tau3 + cfg.N1 * cfg.J +
         ceil_div(cfg.J * (cfg.K - 1) * cfg.N1, cfg.M);
}

Geometry::Irs make_irs(const Eigen::Vector3d& position,
                       const Eigen::Vector3d& normal) {
  Geometry::Irs s;
  s.position = position;
  const double len = normal.norm();
  if (!(len > 0.0)) {
    throw std::invalid_argument("make_irs: zero-length surface normal");
  }
  s.normal = normal / len;
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d a1 = up.cross(s.normal);
  if (a1.norm() < 1e-9) {
    // Facing straight up or down; any horizontal axis works.
    a1 = Eigen::Vector3d(1.0, 0.0, 0.0);
  }
  s.axis1 = a1.normalized();
  s.axis2 = s.normal.cross(s.axis1).normalized();
  return s;
}

Geometry default_geometry(const SystemConfig& cfg) {
  Geometry g;
  g.irs.reserve(cfg.J);
  g.controllers.reserve(cfg.J);
  const double radius = 5.0;
  for (int j = 0; j < cfg.J; ++j) {
    // Offset by 45 degrees so no surface sits on the BS array axis.
    const double phi = M_PI / 4.0 + 2.0 * M_PI * j / cfg.J;
    Eigen::Vector3d pos = g.bs_position +
        radius * Eigen::Vector3d(std::cos(phi), std::sin(phi), 0.0);
    Eigen::Vector3d n = (g.bs_position - pos).normalized();
    Geometry::Irs s = make_irs(pos, n);
    g.controllers.push_back(pos + 1.0 * s.axis1);
    g.irs.push_back(std::move(s));
  }
  return g;
}

void validate_geometry(const SystemConfig& cfg, const Geometry& geom) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("Geometry: " + what);
  };
  if (static_cast<int>(geom.irs.size()) != cfg.J)
    fail("expected J=" + std::to_string(cfg.J) + " surfaces, got " +
         std::to_string(geom.irs.size()));
  if (geom.controllers.size() != geom.irs.size())
    fail("one controller per surface required");
  if (!geom.users.empty() && static_cast<int>(geom.users.size()) != cfg.K)
    fail("user list must be empty or have K entries");
  if (std::abs(geom.bs_axis.norm() - 1.0) > 1e-9) fail("bs_axis must be unit");
  for (const auto& s : geom.irs) {
    if (std::abs(s.normal.norm() - 1.0) > 1e-9) fail("surface normal must be unit");
    if (std::abs(s.axis1.norm() - 1.0) > 1e-9 ||
        std::abs(s.axis2.norm() - 1.0) > 1e-9)
      fail("surface grid axes must be unit");
    if (std::abs(s.axis1.dot(s.axis2)) > 1e-9 ||
        std::abs(s.axis1.dot(s.normal)) > 1e-9 ||
        std::abs(s.axis2.dot(s.normal)) > 1e-9)
      fail("surface axes must be mutually orthogonal");
  }
  for (int d = 0; d < 3; ++d) {
    if (geom.region_lo[d] > geom.region_hi[d]) fail("user region is empty");
  }
}

}  // namespace cosite
