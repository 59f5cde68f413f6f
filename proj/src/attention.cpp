#include "hapex/attention.hpp"

namespace hapex {

AttentionState compute_attention(const WorkspaceGrid& grid, const PerceptionMap& perception,
                                 const TaskSpec& task, const VoxelIndex& current,
                                 const AttentionConfig& config) {
  if (perception.theta() != grid.theta()) {
    throw std::invalid_argument("perception map does not match grid");
  }
  AttentionState s;
  const Field<bool> observed = perception.observed();
  s.inhibition = inhibition_field<double>(grid, current, config.inhibition);
  s.uncertainty = uncertainty_field(perception.probs());
  s.omega = omega_field(perception.probs(), observed, task);
  s.saliency = saliency_field(grid, s.omega, observed, config.boundary);
  auto target = target_posterior(s.inhibition, s.uncertainty, s.saliency, config.factors);
  s.target_posterior = std::move(target.probs);
  s.degenerate = target.degenerate;
  return s;
}

}  // namespace hapex
