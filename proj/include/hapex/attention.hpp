#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Core>

#include "hapex/grid.hpp"
#include "hapex/perception.hpp"

namespace hapex {

/// The material pair whose shared boundary the explorer searches and follows.
struct TaskSpec {
  std::size_t material_a = 0;
  std::size_t material_b = 1;
};

/// Shape of the inhibition-of-return kernel over normalised distance.
struct InhibitionParams {
  double alpha = 1.01;
  double beta = 9.0;
};

struct BetaFactor {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Evidence factors applied to the inhibition, uncertainty and saliency fields.
struct TargetFactors {
  BetaFactor inhibition{1.0, 2.5};
  BetaFactor uncertainty{4.0, 1.0};
  BetaFactor saliency{3.0, 1.0};
};

/// How the Sobel stencil fills neighbours that are outside the grid or unobserved.
enum class BoundaryPolicy {
  kObservedMean,  // mean of the observed values in the 3x3x3 window
  kNeutral,       // constant 0.5
};

inline constexpr double kBetaClamp = 1e-6;
inline constexpr double kNeutralOmega = 0.5;
/// Largest Sobel response magnitude for values in [0, 1].
inline constexpr double kSobelNorm = 16.0;

// ---------------------------------------------------------------------------
// Inhibition of return

/// Unnormalised kernel d^(alpha-1) (1-d)^(beta-1) on d in [0, 1].
template <typename Scalar>
Scalar inhibition_kernel(Scalar d, const InhibitionParams& p = {}) {
  using std::pow;
  return pow(d, Scalar(p.alpha - 1.0)) * pow(Scalar(1) - d, Scalar(p.beta - 1.0));
}

/// Normalised distance at which the kernel peaks.
inline double inhibition_argmin(const InhibitionParams& p = {}) {
  return (p.alpha - 1.0) / (p.alpha + p.beta - 2.0);
}

/// I(d) = 1 - kernel(d) / max kernel, clamped to [0, 1].
template <typename Scalar>
Scalar inhibition(Scalar d, const InhibitionParams& p = {}) {
  const Scalar norm = Scalar(1) / inhibition_kernel(Scalar(inhibition_argmin(p)), p);
  return std::clamp(Scalar(1) - norm * inhibition_kernel(d, p), Scalar(0), Scalar(1));
}

/// Inhibition field centred on `current`. A single-voxel grid is fully inhibited.
template <typename Scalar = double>
Field<Scalar> inhibition_field(const WorkspaceGrid& grid, const VoxelIndex& current,
                               const InhibitionParams& p = {}) {
  grid.check(current);
  const Scalar d_max = Scalar(grid.max_distance());
  Field<Scalar> out(static_cast<Eigen::Index>(grid.theta()));
  for (std::size_t i = 0; i < grid.theta(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    if (d_max == Scalar(0)) {
      out[e] = Scalar(1);
      continue;
    }
    const Scalar d = std::min(Scalar(grid.distance(grid.voxel(i), current)) / d_max, Scalar(1));
    out[e] = inhibition(d, p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Posterior-derived fields. `probs` is n_materials x theta, one column per voxel.

template <typename Derived>
Field<typename Derived::Scalar> uncertainty_field(const Eigen::MatrixBase<Derived>& probs) {
  Field<typename Derived::Scalar> out(probs.cols());
  for (Eigen::Index v = 0; v < probs.cols(); ++v) out[v] = normalized_entropy(probs.col(v));
  return out;
}

/// Omega = (1 - (P(b) - P(a))) / 2; unobserved voxels read as neutral 0.5.
template <typename Derived, typename MaskDerived>
Field<typename Derived::Scalar> omega_field(const Eigen::MatrixBase<Derived>& probs,
                                            const Eigen::ArrayBase<MaskDerived>& observed,
                                            const TaskSpec& task) {
  using Scalar = typename Derived::Scalar;
  const auto a = static_cast<Eigen::Index>(task.material_a);
  const auto b = static_cast<Eigen::Index>(task.material_b);
  if (a == b || a >= probs.rows() || b >= probs.rows()) {
    throw std::invalid_argument("task materials must be distinct library indices");
  }
  if (observed.size() != probs.cols()) throw std::invalid_argument("mask size mismatch");
  Field<Scalar> out(probs.cols());
  for (Eigen::Index v = 0; v < probs.cols(); ++v) {
    out[v] = observed.derived().coeff(v)
                 ? std::clamp((Scalar(1) - (probs(b, v) - probs(a, v))) / Scalar(2), Scalar(0),
                              Scalar(1))
                 : Scalar(kNeutralOmega);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Saliency

/// Volumetric Sobel responses (sx, sy, sz) at `v`. Missing neighbours are
/// filled per `policy`; returns false when the window has no observed value
/// under kObservedMean (the response is then undefined and S is 0).
template <typename Scalar, typename MaskDerived>
bool sobel_response(const WorkspaceGrid& grid, const Field<Scalar>& omega,
                    const Eigen::ArrayBase<MaskDerived>& observed, const VoxelIndex& v,
                    BoundaryPolicy policy, Eigen::Matrix<Scalar, 3, 1>& response) {
  const auto nb = grid.neighborhood26(v);
  // w[dz][dy][dx] holds the window value at offset (dx-1, dy-1, dz-1).
  Scalar w[3][3][3];
  std::array<bool, 27> present{};
  Scalar sum(0), lo(0), hi(0);
  int count = 0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (!nb[k].voxel) continue;
    const auto li = static_cast<Eigen::Index>(grid.linear(*nb[k].voxel));
    if (policy == BoundaryPolicy::kObservedMean && !observed.derived().coeff(li)) continue;
    const Scalar x = omega[li];
    present[k] = true;
    lo = count == 0 ? x : std::min(lo, x);
    hi = count == 0 ? x : std::max(hi, x);
    sum += x;
    ++count;
  }
  Scalar fill(kNeutralOmega);
  if (policy == BoundaryPolicy::kObservedMean) {
    if (count == 0) return false;
    // Exact when the window is constant, so a flat field gives zero response.
    fill = lo == hi ? lo : std::clamp(sum / Scalar(count), lo, hi);
  }
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const Eigen::Vector3i o = nb[k].offset;
    w[o.z() + 1][o.y() + 1][o.x() + 1] =
        present[k] ? omega[static_cast<Eigen::Index>(grid.linear(*nb[k].voxel))] : fill;
  }
  // Mirrored differences keep a symmetric window's response exactly zero.
  const Scalar kSmooth[3] = {Scalar(1), Scalar(2), Scalar(1)};
  response.setZero();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Scalar weight = kSmooth[a] * kSmooth[b];
      response.x() += weight * (w[a][b][2] - w[a][b][0]);  // a = z, b = y
      response.y() += weight * (w[a][2][b] - w[a][0][b]);  // a = z, b = x
      response.z() += weight * (w[2][a][b] - w[0][a][b]);  // a = y, b = x
    }
  }
  return true;
}

/// S = max(|sx|, |sy|, |sz|) / 16 over the Omega field.
template <typename OmegaDerived, typename MaskDerived>
Field<typename OmegaDerived::Scalar> saliency_field(
    const WorkspaceGrid& grid, const Eigen::ArrayBase<OmegaDerived>& omega_expr,
    const Eigen::ArrayBase<MaskDerived>& observed,
    BoundaryPolicy policy = BoundaryPolicy::kObservedMean) {
  using Scalar = typename OmegaDerived::Scalar;
  const Field<Scalar> omega = omega_expr;
  if (omega.size() != static_cast<Eigen::Index>(grid.theta()) ||
      observed.size() != omega.size()) {
    throw std::invalid_argument("field size does not match grid");
  }
  Field<Scalar> out(omega.size());
  Eigen::Matrix<Scalar, 3, 1> r;
  for (std::size_t i = 0; i < grid.theta(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    out[e] = sobel_response(grid, omega, observed, grid.voxel(i), policy, r)
                 ? std::min(r.cwiseAbs().maxCoeff() / Scalar(kSobelNorm), Scalar(1))
                 : Scalar(0);
  }
  return out;
}

/// Saliency with every voxel treated as observed.
template <typename OmegaDerived>
Field<typename OmegaDerived::Scalar> saliency_field(
    const WorkspaceGrid& grid, const Eigen::ArrayBase<OmegaDerived>& omega,
    BoundaryPolicy policy = BoundaryPolicy::kObservedMean) {
  return saliency_field(grid, omega, Field<bool>::Constant(omega.size(), true), policy);
}

// ---------------------------------------------------------------------------
// Target selection

/// Beta log-density with x clamped to [1e-6, 1 - 1e-6].
template <typename Scalar>
Scalar beta_log_pdf(const BetaFactor& f, Scalar x) {
  using std::log;
  using std::log1p;
  if (!(f.alpha > 0.0) || !(f.beta > 0.0)) throw std::invalid_argument("beta shape must be positive");
  const Scalar xc = std::clamp(x, Scalar(kBetaClamp), Scalar(1.0 - kBetaClamp));
  const Scalar log_b = Scalar(std::lgamma(f.alpha) + std::lgamma(f.beta) - std::lgamma(f.alpha + f.beta));
  return Scalar(f.alpha - 1.0) * log(xc) + Scalar(f.beta - 1.0) * log1p(-xc) - log_b;
}

template <typename Scalar>
Scalar beta_pdf(const BetaFactor& f, Scalar x) {
  using std::exp;
  return exp(beta_log_pdf(f, x));
}

/// Unnormalised target scores B_I(I) B_S(S) B_U(U), expression-friendly.
template <typename DI, typename DU, typename DS>
auto target_scores(const Eigen::ArrayBase<DI>& I, const Eigen::ArrayBase<DU>& U,
                   const Eigen::ArrayBase<DS>& S, const TargetFactors& f = {}) {
  using Scalar = typename DI::Scalar;
  return (I.unaryExpr([&](Scalar x) { return beta_pdf(f.inhibition, x); }) *
          S.unaryExpr([&](Scalar x) { return beta_pdf(f.saliency, x); }) *
          U.unaryExpr([&](Scalar x) { return beta_pdf(f.uncertainty, x); }))
      .eval();
}

template <typename Scalar>
struct TargetPosterior {
  Field<Scalar> probs;
  bool degenerate = false;  // every score vanished; probs fell back to uniform
};

/// Normalises non-negative scores; all-zero scores give a uniform vector.
template <typename Derived>
TargetPosterior<typename Derived::Scalar> normalize_scores(const Eigen::ArrayBase<Derived>& scores) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = scores.sum();
  if (!(total > Scalar(0)) || !std::isfinite(total)) {
    return {Field<Scalar>::Constant(scores.size(), Scalar(1) / Scalar(scores.size())), true};
  }
  return {(scores / total).eval(), false};
}

template <typename DI, typename DU, typename DS>
TargetPosterior<typename DI::Scalar> target_posterior(const Eigen::ArrayBase<DI>& I,
                                                      const Eigen::ArrayBase<DU>& U,
                                                      const Eigen::ArrayBase<DS>& S,
                                                      const TargetFactors& f = {}) {
  if (I.size() != U.size() || I.size() != S.size() || I.size() == 0) {
    throw std::invalid_argument("attention fields must be non-empty and equally sized");
  }
  return normalize_scores(target_scores(I, U, S, f));
}

/// MAP voxel of a target posterior or score vector; ties go to the lowest index.
template <typename Derived>
VoxelIndex select_target(const WorkspaceGrid& grid, const Eigen::ArrayBase<Derived>& posterior) {
  if (posterior.size() != static_cast<Eigen::Index>(grid.theta())) {
    throw std::invalid_argument("posterior size does not match grid");
  }
  return grid.voxel(static_cast<std::size_t>(argmax_lowest(posterior)));
}

// ---------------------------------------------------------------------------

struct AttentionConfig {
  InhibitionParams inhibition;
  TargetFactors factors;
  BoundaryPolicy boundary = BoundaryPolicy::kObservedMean;
};

/// Every field the attention model derives at one iteration.
struct AttentionState {
  FieldXd inhibition;
  FieldXd uncertainty;
  FieldXd omega;
  FieldXd saliency;
  FieldXd target_posterior;
  bool degenerate = false;
};

AttentionState compute_attention(const WorkspaceGrid& grid, const PerceptionMap& perception,
                                 const TaskSpec& task, const VoxelIndex& current,
                                 const AttentionConfig& config = {});

}  // namespace hapex
