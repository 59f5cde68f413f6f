#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hapex/attention.hpp"
#include "hapex/materials.hpp"
#include "hapex/simulator.hpp"

namespace hapex {

/// Counts of MAP categories (columns) per true material (rows).
struct ConfusionMatrix {
  Eigen::MatrixXi counts;
  int trials_per_material = 0;
  int k_samples = 0;

  /// Fraction of trials of material i classified correctly.
  double rate(std::size_t i) const;
  double mean_rate() const;
  Eigen::VectorXd rates() const;
};

/// Each material runs `trials_per_material` trials of `k_samples` recursive
/// updates from a uniform prior. Material i draws from seed + i.
ConfusionMatrix run_classification_experiment(const MaterialLibrary& lib, int trials_per_material,
                                              int k_samples, const NoiseSpec& noise,
                                              std::uint64_t seed);

struct NoiseSweep {
  std::vector<double> scales;
  std::vector<int> k_list;
  Eigen::MatrixXd accuracy;  // scales x k_list mean diagonal rate
  std::vector<ConfusionMatrix> cells;  // row-major over (scale, k)
};

/// One classification cell per (scale, k); cell c starts from seed + c * n_materials.
NoiseSweep run_noise_sweep(const MaterialLibrary& lib, const std::vector<double>& scales,
                           int trials_per_material, const std::vector<int>& k_list,
                           std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};
Summary summarize(const std::vector<double>& values);

struct ExperimentReport {
  std::string scenario;
  TrialConfig config;
  std::vector<TrialRecord> trials;
  Summary l, gamma, gamma_per_l;
  int loop_closures = 0;

  std::vector<std::uint64_t> seeds() const;
  /// Recomputes the aggregates from `trials`.
  void aggregate();
};

/// `n_trials` runs with seeds config.seed + i.
ExperimentReport run_exploration_benchmark(const Scenario& scenario, const MaterialLibrary& lib,
                                           int n_trials, const TrialConfig& config);

/// Summary of a fixed path, as if it had been explored.
TrialRecord playback(const Scenario& scenario, const std::vector<VoxelIndex>& visited);

// ---------------------------------------------------------------------------
// Field dumps

inline constexpr const char* kDumpFieldNames[] = {"I", "U", "S", "Omega", "O"};

/// Writes <field>_k<NNNN>.txt for the five attention fields; returns the paths.
/// Throws std::runtime_error when a file cannot be written.
std::vector<std::filesystem::path> dump_fields(const WorkspaceGrid& grid,
                                               const AttentionState& state, int iteration,
                                               const std::filesystem::path& dir);
void write_field(std::ostream& out, const WorkspaceGrid& grid, const FieldXd& field);
FieldXd read_field(std::istream& in, const WorkspaceGrid& grid);
FieldXd read_field(const std::filesystem::path& path, const WorkspaceGrid& grid);

// ---------------------------------------------------------------------------
// Serialisation

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm, const MaterialLibrary& lib);
void write_confusion_json(std::ostream& out, const ConfusionMatrix& cm,
                          const MaterialLibrary& lib, const NoiseSpec& noise, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, const NoiseSweep& sweep);
void write_sweep_json(std::ostream& out, const NoiseSweep& sweep, const MaterialLibrary& lib,
                      std::uint64_t seed);

void write_trials_csv(std::ostream& out, const ExperimentReport& report);
void write_report_json(std::ostream& out, const ExperimentReport& report);

}  // namespace hapex
