#include "hapex/perception.hpp"

#include <limits>
#include <stdexcept>

namespace hapex {

MaterialPosterior MaterialPosterior::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("posterior over zero materials");
  return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)),
          0, false};
}

double log_likelihood(const MaterialLibrary& lib, std::size_t i, const HapticSample& s) {
  const auto& m = lib.at(i);
  const double le = normal_log_pdf(s.e, m.mu_E, m.sigma_E);
  const double lc = normal_log_pdf(s.c, m.mu_C, m.sigma_C);
  // A zero density in either feature wins over a point mass in the other.
  if (le == -std::numeric_limits<double>::infinity() || lc == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  return le + lc;
}

double likelihood(const MaterialLibrary& lib, std::size_t i, const HapticSample& s) {
  const double l = log_likelihood(lib, i, s);
  return l < kLogDensityFloor ? 0.0 : std::exp(l);
}

MaterialPosterior update_posterior(const MaterialLibrary& lib, const MaterialPosterior& prior,
                                   const HapticSample& sample) {
  const auto n = static_cast<Eigen::Index>(lib.size());
  if (prior.probs.size() != n) throw std::invalid_argument("prior size does not match library");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd log_post(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double ll = log_likelihood(lib, static_cast<std::size_t>(i), sample);
    if (ll < kLogDensityFloor) ll = -kInf;
    const double p = prior.probs[i];
    log_post[i] = p > 0.0 ? std::log(p) + ll : -kInf;
  }

  MaterialPosterior out{prior.probs, prior.k_count + 1, false};
  const double top = log_post.maxCoeff();
  if (top == -kInf) {
    out.degenerate = true;
    return out;
  }
  if (top == kInf) {
    // Zero-variance models matched exactly: those share all the mass.
    out.probs = (log_post.array() == kInf).cast<double>().matrix();
  } else {
    out.probs = (log_post.array() - top).exp().matrix();
  }
  out.probs /= out.probs.sum();
  return out;
}

std::size_t map_category(const MaterialPosterior& post) {
  return static_cast<std::size_t>(argmax_lowest(post.probs));
}

double normalized_entropy(const MaterialPosterior& post) { return normalized_entropy(post.probs); }

PerceptionMap::PerceptionMap(std::size_t n_materials, std::size_t theta)
    : probs_(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_materials),
                                       static_cast<Eigen::Index>(theta),
                                       1.0 / static_cast<double>(n_materials))),
      counts_(Eigen::VectorXi::Zero(static_cast<Eigen::Index>(theta))) {
  if (n_materials == 0) throw std::invalid_argument("perception map over zero materials");
}

MaterialPosterior PerceptionMap::posterior(std::size_t voxel) const {
  if (voxel >= theta()) throw std::out_of_range("voxel index out of range");
  const auto v = static_cast<Eigen::Index>(voxel);
  return {probs_.col(v), counts_[v], false};
}

bool PerceptionMap::integrate(const MaterialLibrary& lib, std::size_t voxel,
                              const HapticSample& sample) {
  const auto next = update_posterior(lib, posterior(voxel), sample);
  const auto v = static_cast<Eigen::Index>(voxel);
  probs_.col(v) = next.probs;
  counts_[v] = next.k_count;
  return next.degenerate;
}

}  // namespace hapex
