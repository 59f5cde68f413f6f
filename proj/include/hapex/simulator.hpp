#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hapex/attention.hpp"
#include "hapex/grid.hpp"
#include "hapex/materials.hpp"
#include "hapex/perception.hpp"

namespace hapex {

/// A ground-truth workspace with the boundary the explorer should follow.
struct Scenario {
  std::string name;
  WorkspaceGrid grid;
  Eigen::VectorXi ground_truth;         // library material index per voxel
  std::vector<VoxelIndex> benchmark;    // ordered edge voxels
  VoxelIndex start;
  TaskSpec task;

  /// Throws ConfigError when any invariant is broken.
  void validate(const MaterialLibrary& lib) const;
  std::size_t material_at(const VoxelIndex& v) const;
};

/// Parses the plain-text scenario format (see docs/formats.md). Material
/// names are resolved against `lib`. Errors report the offending line.
Scenario parse_scenario(std::istream& in, const MaterialLibrary& lib);
Scenario load_scenario(const std::filesystem::path& path, const MaterialLibrary& lib);
void write_scenario(std::ostream& out, const Scenario& s, const MaterialLibrary& lib);
void save_scenario(const std::filesystem::path& path, const Scenario& s,
                   const MaterialLibrary& lib);

/// Straight edge, S-curve edge and closed loop over silicone and wood, in that
/// order. Requires both materials in `lib`.
std::vector<Scenario> generate_builtin_scenarios(const MaterialLibrary& lib);

/// Voxels with an axis-adjacent neighbour of a different material.
std::vector<VoxelIndex> boundary_voxels(const WorkspaceGrid& grid,
                                        const Eigen::VectorXi& ground_truth);

HapticSample sense(const Scenario& s, const MaterialLibrary& lib, const VoxelIndex& v,
                   const NoiseSpec& noise, Rng& rng);

/// Sum over visited voxels of the distance to the nearest benchmark voxel [m].
double gamma_metric(const WorkspaceGrid& grid, const std::vector<VoxelIndex>& visited,
                    const std::vector<VoxelIndex>& benchmark);

/// The trial stops once it has moved locally for a while and comes back next
/// to boundary voxels it visited well before.
struct ClosureRule {
  bool enabled = true;
  int local_step = 2;   // largest Chebyshev step counted as a local move
  int min_run = 10;     // consecutive local moves required
  int min_age = 10;     // iterations since the revisited boundary voxel
};

struct TrialConfig {
  int max_iterations = 80;
  NoiseSpec noise = NoiseSpec::none();
  std::uint64_t seed = 0;
  AttentionConfig attention;
  ClosureRule closure;
};

enum class StopReason { kBudget, kLoopClosure };
std::string to_string(StopReason r);

struct TrialRecord {
  std::vector<VoxelIndex> visited;
  std::size_t l = 0;
  double gamma = 0.0;        // [m]
  double gamma_per_l = 0.0;  // [m / iteration]
  std::uint64_t seed = 0;
  StopReason stop_reason = StopReason::kBudget;
  int revisits = 0;          // visits to a voxel already on the path
  int degenerate_count = 0;  // degenerate perception or target updates
};

/// Called once per completed iteration with the fields that chose the next move.
using TrialObserver = std::function<void(int k, const VoxelIndex& current,
                                         const AttentionState& state)>;

TrialRecord run_trial(const Scenario& scenario, const MaterialLibrary& lib,
                      const TrialConfig& config, const TrialObserver& observer = {});

}  // namespace hapex
