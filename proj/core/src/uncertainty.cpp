#include "ipdd/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

namespace ipdd {

namespace {
constexpr double kSimplexTol = 1e-6;
}

double entropy(const Eigen::VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double predictive_entropy(const std::vector<Eigen::VectorXd>& member_probs) {
  if (member_probs.empty())
    throw std::invalid_argument("predictive_entropy: empty ensemble output");
  const Eigen::Index c = member_probs.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(c);
  for (const auto& p : member_probs) {
    if (p.size() != c)
      throw std::invalid_argument("predictive_entropy: member vector length mismatch");
    if (p.minCoeff() < -kSimplexTol || std::abs(p.sum() - 1.0) > kSimplexTol)
      throw std::invalid_argument("predictive_entropy: input is not a probability vector");
    mean += p;
  }
  mean /= static_cast<double>(member_probs.size());
  return entropy(mean);
}

}  // namespace ipdd
