#include "hapex/grid.hpp"

#include <cmath>
#include <sstream>

namespace hapex {
namespace {

constexpr double kDivisibilityTol = 1e-9;

int axis_count(double lo, double hi, double eps, const char* axis) {
  if (!(lo < hi)) {
    throw ConfigError(std::string("workspace ") + axis + " extent is empty (lo >= hi)");
  }
  const double cells = (hi - lo) / eps;
  const double rounded = std::round(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) * eps > kDivisibilityTol) {
    std::ostringstream os;
    os << "workspace " << axis << " extent " << (hi - lo)
       << " is not an integer multiple of epsilon " << eps;
    throw ConfigError(os.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

WorkspaceGrid::WorkspaceGrid(const WorkspaceBounds& bounds) : bounds_(bounds) {
  if (!(bounds.epsilon > 0.0)) throw ConfigError("voxel side epsilon must be positive");
  nx_ = axis_count(bounds.x_lo, bounds.x_hi, bounds.epsilon, "x");
  ny_ = axis_count(bounds.y_lo, bounds.y_hi, bounds.epsilon, "y");
  nz_ = axis_count(bounds.z_lo, bounds.z_hi, bounds.epsilon, "z");
}

bool WorkspaceGrid::contains(const VoxelIndex& v) const {
  return v.ix >= 0 && v.ix < nx_ && v.iy >= 0 && v.iy < ny_ && v.iz >= 0 && v.iz < nz_;
}

void WorkspaceGrid::check(const VoxelIndex& v) const {
  if (!contains(v)) throw std::out_of_range("voxel " + to_string(v) + " outside grid");
}

std::size_t WorkspaceGrid::linear(const VoxelIndex& v) const {
  return static_cast<std::size_t>(v.ix) +
         static_cast<std::size_t>(nx_) *
             (static_cast<std::size_t>(v.iy) + static_cast<std::size_t>(ny_) * v.iz);
}

VoxelIndex WorkspaceGrid::voxel(std::size_t i) const {
  if (i >= theta()) throw std::out_of_range("linear voxel index out of range");
  const auto nx = static_cast<std::size_t>(nx_);
  const auto ny = static_cast<std::size_t>(ny_);
  return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
          static_cast<int>(i / (nx * ny))};
}

Eigen::Vector3d WorkspaceGrid::center(const VoxelIndex& v) const {
  const double e = bounds_.epsilon;
  return {bounds_.x_lo + (v.ix + 0.5) * e, bounds_.y_lo + (v.iy + 0.5) * e,
          bounds_.z_lo + (v.iz + 0.5) * e};
}

std::optional<VoxelIndex> WorkspaceGrid::index_of(const Eigen::Vector3d& p) const {
  const double e = bounds_.epsilon;
  const VoxelIndex v{static_cast<int>(std::floor((p.x() - bounds_.x_lo) / e)),
                     static_cast<int>(std::floor((p.y() - bounds_.y_lo) / e)),
                     static_cast<int>(std::floor((p.z() - bounds_.z_lo) / e))};
  if (!contains(v)) return std::nullopt;
  return v;
}

Neighborhood26 WorkspaceGrid::neighborhood26(const VoxelIndex& v) const {
  check(v);
  Neighborhood26 out;
  std::size_t n = 0;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const VoxelIndex w{v.ix + dx, v.iy + dy, v.iz + dz};
        out[n].offset = Eigen::Vector3i(dx, dy, dz);
        out[n].voxel = contains(w) ? std::optional<VoxelIndex>(w) : std::nullopt;
        ++n;
      }
    }
  }
  return out;
}

double WorkspaceGrid::distance(const VoxelIndex& a, const VoxelIndex& b) const {
  check(a);
  check(b);
  return (a.vec() - b.vec()).cast<double>().norm() * bounds_.epsilon;
}

double WorkspaceGrid::max_distance() const {
  return distance({0, 0, 0}, {nx_ - 1, ny_ - 1, nz_ - 1});
}

std::string to_string(const VoxelIndex& v) {
  std::ostringstream os;
  os << '(' << v.ix << ',' << v.iy << ',' << v.iz << ')';
  return os.str();
}

}  // namespace hapex
