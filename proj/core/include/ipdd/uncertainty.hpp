#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ipdd {

/// Shannon entropy (natural log) of a probability vector; 0*ln(0) := 0.
double entropy(const Eigen::VectorXd& probs);

/// Predictive entropy of an ensemble: the entropy of the coordinate-wise
/// mean of the member class distributions. Lies in [0, ln(c)] and captures
/// both per-member spread and inter-member disagreement. Throws on an empty
/// list or on inputs that are not on the probability simplex.
double predictive_entropy(const std::vector<Eigen::VectorXd>& member_probs);

}  // namespace ipdd
