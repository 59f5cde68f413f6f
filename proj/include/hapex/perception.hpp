#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Core>

#include "hapex/grid.hpp"
#include "hapex/materials.hpp"

namespace hapex {

template <typename Scalar>
Scalar normal_log_pdf(Scalar x, Scalar mu, Scalar sigma) {
  using std::log;
  if (sigma == Scalar(0)) {
    return x == mu ? std::numeric_limits<Scalar>::infinity()
                   : -std::numeric_limits<Scalar>::infinity();
  }
  const Scalar z = (x - mu) / sigma;
  return Scalar(-0.5) * z * z - log(sigma) - Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar normal_pdf(Scalar x, Scalar mu, Scalar sigma) {
  using std::exp;
  return exp(normal_log_pdf(x, mu, sigma));
}

/// Shannon entropy of a probability vector divided by log(n), with 0 log 0 = 0.
template <typename Derived>
typename Derived::Scalar normalized_entropy(const Eigen::DenseBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  const Eigen::Index n = p.size();
  if (n < 2) return Scalar(0);
  Scalar h(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar v = p.derived().coeff(i);
    if (v > Scalar(0)) h -= v * log(v);
  }
  const Scalar u = h / log(Scalar(n));
  return u < Scalar(0) ? Scalar(0) : (u > Scalar(1) ? Scalar(1) : u);
}

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Eigen::Index argmax_lowest(const Eigen::DenseBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v.derived().coeff(i) > v.derived().coeff(best)) best = i;
  }
  return best;
}

/// Categorical belief over the library materials for one voxel.
struct MaterialPosterior {
  Eigen::VectorXd probs;
  int k_count = 0;          // samples integrated so far
  bool degenerate = false;  // last update saw all-zero evidence and kept the prior

  static MaterialPosterior uniform(std::size_t n);
};

/// Log-densities below this are treated as exact zeros.
inline constexpr double kLogDensityFloor = -700.0;

/// Joint feature log-density log P(e|M) + log P(c|M).
double log_likelihood(const MaterialLibrary& lib, std::size_t material_index,
                      const HapticSample& sample);
/// Joint feature density P(e|M) P(c|M); may underflow to 0.
double likelihood(const MaterialLibrary& lib, std::size_t material_index,
                  const HapticSample& sample);

/// One recursive Bayes step with `prior` as the prior. Evaluated in log space.
MaterialPosterior update_posterior(const MaterialLibrary& lib, const MaterialPosterior& prior,
                                   const HapticSample& sample);

/// MAP material index; ties go to the lowest index.
std::size_t map_category(const MaterialPosterior& post);

double normalized_entropy(const MaterialPosterior& post);

/// Per-voxel posteriors of a whole workspace. Column v holds the posterior of
/// the voxel with linear index v; every column starts uniform.
class PerceptionMap {
 public:
  PerceptionMap(std::size_t n_materials, std::size_t theta);

  std::size_t n_materials() const { return static_cast<std::size_t>(probs_.rows()); }
  std::size_t theta() const { return static_cast<std::size_t>(probs_.cols()); }

  const Eigen::MatrixXd& probs() const { return probs_; }
  const Eigen::VectorXi& counts() const { return counts_; }

  MaterialPosterior posterior(std::size_t voxel) const;
  /// Integrates `sample` at `voxel`; returns true when the evidence was degenerate.
  bool integrate(const MaterialLibrary& lib, std::size_t voxel, const HapticSample& sample);

  /// Mask of voxels with at least one integrated sample.
  Field<bool> observed() const { return (counts_.array() > 0); }

 private:
  Eigen::MatrixXd probs_;
  Eigen::VectorXi counts_;
};

}  // namespace hapex
