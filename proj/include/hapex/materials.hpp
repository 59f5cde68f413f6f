#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hapex/grid.hpp"

namespace hapex {

/// The generator used for every stochastic draw in the library.
using Rng = std::mt19937_64;

/// Gaussian texture (E) and compliance (C) feature model of one material.
struct MaterialParams {
  std::string name;
  double mu_E = 0.0, sigma_E = 1.0;
  double mu_C = 0.0, sigma_C = 1.0;
};

struct HapticSample {
  double e = 0.0;
  double c = 0.0;
};

/// Multipliers on the per-material additive noise std |mu| / 2.
struct NoiseSpec {
  double scale_E = 1.0;
  double scale_C = 1.0;

  static NoiseSpec uniform(double scale) { return {scale, scale}; }
  static NoiseSpec none() { return {0.0, 0.0}; }
};

/// Ordered, immutable set of material models. Position defines the index.
class MaterialLibrary {
 public:
  /// Requires at least two materials with unique names and finite, non-negative
  /// sigmas. Zero sigmas are accepted here for degenerate test libraries; the
  /// file loader is stricter.
  explicit MaterialLibrary(std::vector<MaterialParams> materials);

  std::size_t size() const { return materials_.size(); }
  const MaterialParams& operator[](std::size_t i) const { return materials_[i]; }
  const MaterialParams& at(std::size_t i) const;
  const std::vector<MaterialParams>& materials() const { return materials_; }

  /// Index of the material called `name`; throws ConfigError if absent.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  std::vector<MaterialParams> materials_;
};

/// Parses the `[material]` block format (see docs/formats.md). Errors name the
/// 1-based record index and line.
MaterialLibrary parse_library(std::istream& in);
MaterialLibrary load_library(const std::filesystem::path& path);

/// One noisy feature observation of material `material_index`.
/// Throws std::invalid_argument for an invalid index or negative scale.
HapticSample synthesize_sample(const MaterialLibrary& lib, std::size_t material_index,
                               const NoiseSpec& noise, Rng& rng);

}  // namespace hapex
