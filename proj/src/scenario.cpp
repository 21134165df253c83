#include "cosite/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <stdexcept>

namespace cosite {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("scenario: " + what);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  if (!obj.is_object()) fail(ctx + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown key \"" + item.key() + "\" in " + ctx);
  }
}

double read_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + " must be a number");
  return v.get<double>();
}

int read_int(const json& v, const std::string& ctx) {
  const double d = read_number(v, ctx);
  if (std::floor(d) != d || std::fabs(d) > 2147483647.0)
    fail(ctx + " must be an integer");
  return static_cast<int>(d);
}

std::uint64_t read_seed(const json& v, const std::string& ctx) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<std::uint64_t>(v.get<long long>());
  fail(ctx + " must be a nonnegative integer");
}

Eigen::Vector3d read_vec3(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 3) fail(ctx + " must be a 3-element array");
  return {read_number(v[0], ctx), read_number(v[1], ctx), read_number(v[2], ctx)};
}

json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v[0], v[1], v[2]});
}

double read_rician(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(ctx + ": only \"inf\" and \"-inf\" are accepted as strings");
  }
  return read_number(v, ctx);
}

json rician_to_json(double k_db) {
  if (k_db == kInf) return "inf";
  if (k_db == -kInf) return "-inf";
  return k_db;
}

LinkModel link_from_json(const json& v, const std::string& ctx) {
  reject_unknown(v, {"pathloss_exponent", "rician_k_db"}, ctx);
  if (!v.contains("pathloss_exponent") || !v.contains("rician_k_db"))
    fail(ctx + " needs pathloss_exponent and rician_k_db");
  LinkModel m;
  m.pathloss_exponent = read_number(v["pathloss_exponent"], ctx + ".pathloss_exponent");
  m.rician_k_db = read_rician(v["rician_k_db"], ctx + ".rician_k_db");
  return m;
}

json link_to_json(const LinkModel& m) {
  return {{"pathloss_exponent", m.pathloss_exponent},
          {"rician_k_db", rician_to_json(m.rician_k_db)}};
}

ChannelTable table_from_json(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "co-site") return cosite_table();
    if (name == "user-side") return userside_table();
    fail(ctx + ": unknown table preset \"" + name + "\"");
  }
  reject_unknown(v,
                 {"user_bs", "irs_bs", "user_irs_outside", "user_irs_inside",
                  "ctrl_irs"},
                 ctx);
  ChannelTable t = cosite_table();
  if (v.contains("user_bs")) t.user_bs = link_from_json(v["user_bs"], ctx + ".user_bs");
  if (v.contains("irs_bs")) t.irs_bs = link_from_json(v["irs_bs"], ctx + ".irs_bs");
  if (v.contains("user_irs_outside"))
    t.user_irs_outside = link_from_json(v["user_irs_outside"], ctx + ".user_irs_outside");
  if (v.contains("user_irs_inside"))
    t.user_irs_inside = link_from_json(v["user_irs_inside"], ctx + ".user_irs_inside");
  if (v.contains("ctrl_irs")) t.ctrl_irs = link_from_json(v["ctrl_irs"], ctx + ".ctrl_irs");
  return t;
}

json table_to_json(const ChannelTable& t) {
  return {{"user_bs", link_to_json(t.user_bs)},
          {"irs_bs", link_to_json(t.irs_bs)},
          {"user_irs_outside", link_to_json(t.user_irs_outside)},
          {"user_irs_inside", link_to_json(t.user_irs_inside)},
          {"ctrl_irs", link_to_json(t.ctrl_irs)}};
}

SystemConfig config_from_json(const json& v) {
  reject_unknown(v,
                 {"M", "N", "J", "K", "N1", "L", "T_u", "tau1", "tau3", "tau",
                  "p_user_dbm", "p_ctrl_dbm", "noise_dbm", "gamma_db", "c0_db",
                  "rho", "eps1", "eps2", "eps3", "eps_est", "eps_est_userside",
                  "sca_iter_cap", "ao_iter_cap", "gpm_iter_cap",
                  "power_iter_cap", "base_seed"},
                 "config");
  SystemConfig c;
  auto geti = [&](const char* key, int& out) {
    if (v.contains(key)) out = read_int(v[key], std::string("config.") + key);
  };
  auto getd = [&](const char* key, double& out) {
    if (v.contains(key)) out = read_number(v[key], std::string("config.") + key);
  };
  geti("M", c.M);
  geti("N", c.N);
  geti("J", c.J);
  geti("K", c.K);
  geti("N1", c.N1);
  geti("L", c.L);
  geti("T_u", c.T_u);
  geti("tau1", c.tau1);
  geti("tau3", c.tau3);
  geti("tau", c.tau);
  getd("p_user_dbm", c.p_user_dbm);
  getd("p_ctrl_dbm", c.p_ctrl_dbm);
  getd("noise_dbm", c.noise_dbm);
  getd("gamma_db", c.gamma_db);
  getd("c0_db", c.c0_db);
  getd("rho", c.rho);
  getd("eps1", c.eps1);
  getd("eps2", c.eps2);
  getd("eps3", c.eps3);
  getd("eps_est", c.eps_est);
  getd("eps_est_userside", c.eps_est_userside);
  geti("sca_iter_cap", c.sca_iter_cap);
  geti("ao_iter_cap", c.ao_iter_cap);
  geti("gpm_iter_cap", c.gpm_iter_cap);
  geti("power_iter_cap", c.power_iter_cap);
  if (v.contains("base_seed")) c.base_seed = read_seed(v["base_seed"], "config.base_seed");
  return c;
}

json config_to_json(const SystemConfig& c) {
  return {{"M", c.M},
          {"N", c.N},
          {"J", c.J},
          {"K", c.K},
          {"N1", c.N1},
          {"L", c.L},
          {"T_u", c.T_u},
          {"tau1", c.tau1},
          {"tau3", c.tau3},
          {"tau", c.tau},
          {"p_user_dbm", c.p_user_dbm},
          {"p_ctrl_dbm", c.p_ctrl_dbm},
          {"noise_dbm", c.noise_dbm},
          {"gamma_db", c.gamma_db},
          {"c0_db", c.c0_db},
          {"rho", c.rho},
          {"eps1", c.eps1},
          {"eps2", c.eps2},
          {"eps3", c.eps3},
          {"eps_est", c.eps_est},
          {"eps_est_userside", c.eps_est_userside},
          {"sca_iter_cap", c.sca_iter_cap},
          {"ao_iter_cap", c.ao_iter_cap},
          {"gpm_iter_cap", c.gpm_iter_cap},
          {"power_iter_cap", c.power_iter_cap},
          {"base_seed", c.base_seed}};
}

Geometry geometry_from_json(const json& v, const SystemConfig& cfg) {
  reject_unknown(v,
                 {"bs_position", "bs_axis", "irs", "controllers", "users",
                  "user_region"},
                 "geometry");
  Geometry g;
  if (v.contains("bs_position")) g.bs_position = read_vec3(v["bs_position"], "geometry.bs_position");
  if (v.contains("bs_axis"))
    g.bs_axis = read_vec3(v["bs_axis"], "geometry.bs_axis").normalized();
  if (!v.contains("irs")) fail("explicit geometry needs an irs list");
  if (!v["irs"].is_array()) fail("geometry.irs must be an array");
  for (const auto& s : v["irs"]) {
    reject_unknown(s, {"position", "normal"}, "geometry.irs[]");
    if (!s.contains("position") || !s.contains("normal"))
      fail("geometry.irs[] needs position and normal");
    g.irs.push_back(make_irs(read_vec3(s["position"], "geometry.irs[].position"),
                             read_vec3(s["normal"], "geometry.irs[].normal")));
  }
  if (v.contains("controllers")) {
    if (!v["controllers"].is_array()) fail("geometry.controllers must be an array");
    for (const auto& c : v["controllers"])
      g.controllers.push_back(read_vec3(c, "geometry.controllers[]"));
  } else {
    for (const auto& s : g.irs) g.controllers.push_back(s.position + s.axis1);
  }
  if (v.contains("users")) {
    if (!v["users"].is_array()) fail("geometry.users must be an array");
    for (const auto& u : v["users"])
      g.users.push_back(read_vec3(u, "geometry.users[]"));
  }
  if (v.contains("user_region")) {
    reject_unknown(v["user_region"], {"lo", "hi"}, "geometry.user_region");
    g.region_lo = read_vec3(v["user_region"]["lo"], "geometry.user_region.lo");
    g.region_hi = read_vec3(v["user_region"]["hi"], "geometry.user_region.hi");
  }
  validate_geometry(cfg, g);
  return g;
}

json geometry_to_json(const Geometry& g) {
  json irs = json::array();
  for (const auto& s : g.irs)
    irs.push_back({{"position", vec3_to_json(s.position)},
                   {"normal", vec3_to_json(s.normal)}});
  json controllers = json::array();
  for (const auto& c : g.controllers) controllers.push_back(vec3_to_json(c));
  json out = {{"bs_position", vec3_to_json(g.bs_position)},
              {"bs_axis", vec3_to_json(g.bs_axis)},
              {"irs", irs},
              {"controllers", controllers},
              {"user_region",
               {{"lo", vec3_to_json(g.region_lo)},
                {"hi", vec3_to_json(g.region_hi)}}}};
  if (!g.users.empty()) {
    json users = json::array();
    for (const auto& u : g.users) users.push_back(vec3_to_json(u));
    out["users"] = users;
  }
  return out;
}

}  // namespace

Scenario default_scenario() { return load_scenario(json::object()); }

Scenario load_scenario(const json& doc) {
  reject_unknown(doc, {"config", "geometry", "channel_table", "userside_table"},
                 "document");
  Scenario sc;
  sc.cfg = doc.contains("config") ? config_from_json(doc["config"]) : SystemConfig{};
  sc.cfg.finalize();

  sc.table = doc.contains("channel_table")
                 ? table_from_json(doc["channel_table"], "channel_table")
                 : cosite_table();
  sc.userside = doc.contains("userside_table")
                    ? table_from_json(doc["userside_table"], "userside_table")
                    : userside_table();

  if (doc.contains("geometry") && !(doc["geometry"].is_string() &&
                                    doc["geometry"].get<std::string>() == "default")) {
    sc.geometry = geometry_from_json(doc["geometry"], sc.cfg);
    sc.geometry_explicit = true;
  } else {
    sc.geometry = default_geometry(sc.cfg);
    sc.geometry_explicit = false;
  }
  validate_geometry(sc.cfg, sc.geometry);

  json resolved = {{"config", config_to_json(sc.cfg)},
                   {"channel_table", table_to_json(sc.table)},
                   {"userside_table", table_to_json(sc.userside)}};
  resolved["geometry"] =
      sc.geometry_explicit ? geometry_to_json(sc.geometry) : json("default");
  sc.resolved = resolved.dump();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  json doc;
  try {
    // Allow // and /* */ comments in config files.
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail("parse error in " + path + ": " + e.what());
  }
  return load_scenario(doc);
}

Scenario scenario_with_overrides(
    const Scenario& base,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc = json::parse(base.resolved);
  for (const auto& [key, value] : overrides) {
    json literal;
    try {
      literal = json::parse(value);
    } catch (const json::parse_error&) {
      fail("override value for \"" + key + "\" is not a JSON literal: " + value);
    }
    if (!doc["config"].contains(key)) {
      fail("override names unknown config key \"" + key + "\"");
    }
    doc["config"][key] = literal;
  }
  return load_scenario(doc);
}

std::string config_hash(const Scenario& sc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : sc.resolved) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace cosite
