#pragma once

#include <vector>

#include "cosite/channel.hpp"
#include "cosite/config.hpp"
#include "cosite/estimation.hpp"

namespace cosite {

// Average-SINR surrogate model for one fading block. Each user k has an
// effective matrix Gt[k] = [scheduled cascaded estimates | direct estimate]
// acting on the extended reflection vector theta (last entry pinned to 1),
// plus a covariance surrogate A[k] for the surfaces whose cascade was not
// estimated: those contribute average power through the static LoS response
// at the BS, N * mu2 * alpha2 per surface.
struct SinrModel {
  std::vector<Eigen::MatrixXcd> Gt;  // K entries, M x (d + 1)
  std::vector<Eigen::MatrixXcd> A;   // K entries, M x M, Hermitian PSD
  double p = 0.0;
  double sigma2 = 0.0;
  int m = 0;        // BS antennas
  int k_users = 0;  // users
  int d = 0;        // reflection coefficients (theta has d + 1 entries)
};

// Grouped model from per-block estimates. Unscheduled column blocks are
// zero; their average power appears in A instead.
SinrModel build_sinr_model(const SystemConfig& cfg, const CsiState& csi,
                           const std::vector<Eigen::VectorXcd>& l_bs,
                           const Eigen::MatrixXi& delta);

// Element-resolution model from true channels with no residual term, for
// genie-aided benchmarks.
SinrModel build_perfect_model(const SystemConfig& cfg,
                              const StaticChannels& stat,
                              const UserChannels& user);

// Surrogate SINR of user k under combiner w (any scale) and extended
// reflection theta.
double sinr_lb(const SinrModel& model, const Eigen::VectorXcd& w,
               const Eigen::VectorXcd& theta, int k);

// min over users, each with its own combiner.
double worst_sinr_lb(const SinrModel& model,
                     const std::vector<Eigen::VectorXcd>& W,
                     const Eigen::VectorXcd& theta);

// Phase-only projection onto the unit-modulus set, normalized so the last
// entry is exactly one. Zero entries map to one.
Eigen::VectorXcd project_theta(const Eigen::VectorXcd& x);

// Subgradient of the worst-user level surrogate min_k [signal_k(theta)
// - t * interference_k(theta)] at theta; ties pick the smallest user index.
Eigen::VectorXcd subgradient_xi(const SinrModel& model,
                                const std::vector<Eigen::VectorXcd>& W,
                                const Eigen::VectorXcd& theta, double t);

struct GpmResult {
  Eigen::VectorXcd theta;  // best feasible iterate seen
  Eigen::VectorXd trace;   // level-surrogate value per iteration
  int iterations = 0;
};

// Projected subgradient ascent on the level surrogate with normalized step
// rho. Steps that lower the objective are taken as-is, but the best feasible
// iterate is tracked and returned; the loop stops when the best value's
// fractional improvement drops below eps2.
GpmResult gpm_solve(const SinrModel& model,
                    const std::vector<Eigen::VectorXcd>& W,
                    const Eigen::VectorXcd& theta0, double t,
                    const SystemConfig& cfg);

struct EigenPair {
  Eigen::VectorXcd vector;
  double value = 0.0;
  bool power_converged = false;  // false means the dense fallback was used
};

// Dominant eigenpair of the Hermitian pencil (C, D) with D positive
// definite, via Cholesky congruence and power iteration (relative residual
// 1e-9), falling back to a dense decomposition at the iteration cap.
EigenPair dominant_generalized(const Eigen::MatrixXcd& C,
                               const Eigen::MatrixXcd& D, int power_cap);

// Optimal receive combiner for user k at fixed theta: dominant generalized
// eigenvector of that user's signal and interference-plus-noise matrices.
Eigen::VectorXcd combining_weights(const SinrModel& model,
                                   const Eigen::VectorXcd& theta, int k,
                                   const SystemConfig& cfg);

struct AoResult {
  Eigen::VectorXcd theta;
  std::vector<Eigen::VectorXcd> W;  // per-user unit-norm combiners
  Eigen::VectorXd trace;            // worst-user surrogate SINR per iteration
  int iterations = 0;
};

// Alternating optimization of reflection and combining: each round runs the
// projected subgradient stage at the current worst-user level, then refits
// per-user combiners. The worst-user surrogate SINR never decreases.
AoResult ao_solve(const SinrModel& model, const SystemConfig& cfg,
                  std::mt19937_64& init_rng);

}  // namespace cosite
