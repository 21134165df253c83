#pragma once

#include <Eigen/Dense>

#include "cosite/channel.hpp"
#include "cosite/config.hpp"

namespace cosite {

// Long-term per-user channel power metric under soft surface loads
// lambda_row (one entry per surface): direct power plus the coherent
// per-surface contribution, which grows with the squared load share and the
// squared element count.
double channel_metric(double beta2, const Eigen::RowVectorXd& alpha2_row,
                      const Eigen::VectorXd& mu2,
                      const Eigen::RowVectorXd& lambda_row, int n_elements);

// Tangent minorant of channel_metric at anchor loads; equals the metric at
// the anchor and never exceeds it elsewhere (the load terms are convex).
double metric_lower_bound(double beta2, const Eigen::RowVectorXd& alpha2_row,
                          const Eigen::VectorXd& mu2,
                          const Eigen::RowVectorXd& lambda_row,
                          const Eigen::RowVectorXd& anchor_row, int n_elements);

struct AssociationResult {
  Eigen::MatrixXd lambda;  // K x J soft loads, each column on the simplex
  Eigen::VectorXd trace;   // worst-user metric per iteration; entry 0 is the
                           // initialization
  int iterations = 0;
};

// Maximizes the worst-user metric over soft loads by successive convex
// approximation: each round solves the LP obtained from the tangent
// minorants at the previous loads. Stops once the fractional improvement
// falls below eps1 or the iteration cap is hit.
AssociationResult sca_solve(const LargeScaleGains& gains,
                            const SystemConfig& cfg);

// Hardens soft loads into at most zeta estimated cascades: largest loads
// win, ties go to the smaller user index, then the smaller surface index.
Eigen::MatrixXi select_associations(const Eigen::MatrixXd& lambda, int zeta);

}  // namespace cosite
