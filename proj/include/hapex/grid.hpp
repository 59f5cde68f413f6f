#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hapex {

/// Raised for malformed workspace, material or scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-voxel scalar field indexed by the linear voxel index.
template <typename Scalar>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
using FieldXd = Field<double>;

/// Axis-aligned workspace limits in the world frame, plus the voxel side.
struct WorkspaceBounds {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  double z_lo = 0.0, z_hi = 0.0;
  double epsilon = 0.0;  // voxel side [m]
};

struct VoxelIndex {
  int ix = 0, iy = 0, iz = 0;

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
  Eigen::Vector3i vec() const { return {ix, iy, iz}; }
};

/// One entry of a 3x3x3 neighbourhood. `voxel` is empty when the offset
/// falls outside the grid.
struct NeighborEntry {
  Eigen::Vector3i offset;
  std::optional<VoxelIndex> voxel;
};
using Neighborhood26 = std::array<NeighborEntry, 27>;

/// Isometric voxel partition of the workspace. Immutable after construction.
///
/// Linear index is ix + nx * (iy + ny * iz); every field and dump in the
/// library uses this ordering.
class WorkspaceGrid {
 public:
  /// Throws ConfigError when an extent is not a multiple of epsilon (within
  /// 1e-9) or the bounds are empty.
  explicit WorkspaceGrid(const WorkspaceBounds& bounds);

  const WorkspaceBounds& bounds() const { return bounds_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double epsilon() const { return bounds_.epsilon; }
  /// Total voxel count.
  std::size_t theta() const { return static_cast<std::size_t>(nx_) * ny_ * nz_; }

  bool contains(const VoxelIndex& v) const;
  /// Throws std::out_of_range when v is outside the grid.
  void check(const VoxelIndex& v) const;

  std::size_t linear(const VoxelIndex& v) const;
  VoxelIndex voxel(std::size_t linear_index) const;

  Eigen::Vector3d center(const VoxelIndex& v) const;
  /// Voxel containing `p`; nullopt outside the workspace.
  std::optional<VoxelIndex> index_of(const Eigen::Vector3d& p) const;

  /// All 27 offsets of {-1,0,1}^3, dz outermost and dx innermost.
  Neighborhood26 neighborhood26(const VoxelIndex& v) const;

  double distance(const VoxelIndex& a, const VoxelIndex& b) const;
  /// Distance between the centres of two opposite corner voxels.
  double max_distance() const;

  template <typename Scalar>
  Field<Scalar> constant_field(Scalar value) const {
    return Field<Scalar>::Constant(static_cast<Eigen::Index>(theta()), value);
  }

 private:
  WorkspaceBounds bounds_;
  int nx_ = 0, ny_ = 0, nz_ = 0;
};

inline WorkspaceGrid make_grid(const WorkspaceBounds& bounds) { return WorkspaceGrid(bounds); }

inline double euclidean_distance(const WorkspaceGrid& grid, const VoxelIndex& a,
                                 const VoxelIndex& b) {
  return grid.distance(a, b);
}

inline double max_distance(const WorkspaceGrid& grid) { return grid.max_distance(); }

/// Chebyshev distance in voxels; 1 means "one step" in the 26-neighbourhood.
inline int chebyshev(const VoxelIndex& a, const VoxelIndex& b) {
  return (a.vec() - b.vec()).cwiseAbs().maxCoeff();
}

std::string to_string(const VoxelIndex& v);

}  // namespace hapex
