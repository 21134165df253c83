#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cosite/protocol.hpp"
#include "cosite/scenario.hpp"

namespace cosite {

enum class Scheme {
  kProposed,          // load-balancing association, two-stage estimation
  kGreedyAssoc,       // strongest average cascades win the budget
  kRandomAssoc,       // uniformly random cascade subset
  kUserSideProtocol,  // per-user surfaces, full re-estimation every block
  kPerfectCsi,        // genie CSI, element-level reflection, free training
  kNoIrs,             // direct links only
};

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);  // throws on unknown names

// Budget-sized schedules from statistical CSI.
Eigen::MatrixXi greedy_association(const Eigen::MatrixXd& alpha2_hat,
                                   const Eigen::VectorXd& mu2_hat, int zeta);
Eigen::MatrixXi random_association(int K, int J, int zeta,
                                   std::mt19937_64& rng);

// Scheme runners sharing the trial's channel streams, so matched seeds
// compare the same physical realization.
FrameResult proposed_run(const Scenario& sc, std::uint64_t trial_seed);
FrameResult greedy_run(const Scenario& sc, std::uint64_t trial_seed);
FrameResult random_run(const Scenario& sc, std::uint64_t trial_seed);
FrameResult perfect_csi_run(const Scenario& sc, std::uint64_t trial_seed);
FrameResult no_irs_run(const Scenario& sc, std::uint64_t trial_seed,
                       int m_override = 0);

// User-side benchmark: one surface is re-deployed next to each of the first
// J users and every cascade is re-estimated every block through a reference
// user picked per surface, with estimation error growing when the reference
// is weak. Charges the per-block training length of that architecture.
FrameResult userside_protocol_run(const Scenario& sc, std::uint64_t trial_seed);

FrameResult run_scheme(const Scenario& sc, Scheme scheme,
                       std::uint64_t trial_seed, int noirs_m_override = 0);

struct ExperimentSpec {
  Scenario scenario;
  std::vector<Scheme> schemes{Scheme::kProposed};
  int trials = 100;
  std::string sweep_key;             // empty = single grid point
  std::vector<double> sweep_values;  // ignored when sweep_key is empty
  int threads = 1;
  int noirs_m_override = 0;
};

struct ResultRow {
  std::string scheme;
  std::string swept_param;  // "none" when nothing is swept
  double value = 0.0;
  int trial = 0;
  double min_rate = 0.0;
  double mean_user_rate = 0.0;
  int tau_used = 0;
  int zeta = 0;
  std::uint64_t seed = 0;
};

struct SummaryRow {
  std::string scheme;
  std::string swept_param;
  double value = 0.0;
  int trials = 0;
  double min_rate_mean = 0.0;
  double min_rate_stderr = 0.0;
  double mean_user_rate_mean = 0.0;
};

// Runs trials for every (grid value, scheme) pair; trial i uses seed
// base_seed + i. Rows come back in deterministic (value, scheme, trial)
// order regardless of the thread count.
std::vector<ResultRow> monte_carlo(const ExperimentSpec& spec);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// Delimited output with a header naming the artifact version and the
// resolved config hash. The writers are byte-stable given identical inputs.
void write_table(std::ostream& out, const Scenario& sc,
                 const std::vector<ResultRow>& rows);
void write_summary(std::ostream& out, const Scenario& sc,
                   const std::vector<SummaryRow>& rows);
void write_jsonl(std::ostream& out, const Scenario& sc,
                 const std::vector<ResultRow>& rows,
                 const std::vector<SummaryRow>& summary);

}  // namespace cosite
