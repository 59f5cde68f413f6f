#include "hapex/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hapex {

void Scenario::validate(const MaterialLibrary& lib) const {
  if (ground_truth.size() != static_cast<Eigen::Index>(grid.theta())) {
    throw ConfigError("scenario '" + name + "': ground truth does not cover the grid");
  }
  for (Eigen::Index i = 0; i < ground_truth.size(); ++i) {
    if (ground_truth[i] < 0 || static_cast<std::size_t>(ground_truth[i]) >= lib.size()) {
      throw ConfigError("scenario '" + name + "': ground truth names an unknown material");
    }
  }
  if (benchmark.empty()) throw ConfigError("scenario '" + name + "': empty benchmark path");
  for (const auto& b : benchmark) {
    if (!grid.contains(b)) {
      throw ConfigError("scenario '" + name + "': benchmark voxel " + to_string(b) +
                        " outside grid");
    }
  }
  if (!grid.contains(start)) {
    throw ConfigError("scenario '" + name + "': start " + to_string(start) + " outside grid");
  }
  if (task.material_a == task.material_b || task.material_a >= lib.size() ||
      task.material_b >= lib.size()) {
    throw ConfigError("scenario '" + name + "': task needs two distinct library materials");
  }
}

std::size_t Scenario::material_at(const VoxelIndex& v) const {
  return static_cast<std::size_t>(ground_truth[static_cast<Eigen::Index>(grid.linear(v))]);
}

std::vector<VoxelIndex> boundary_voxels(const WorkspaceGrid& grid,
                                        const Eigen::VectorXi& gt) {
  std::vector<VoxelIndex> out;
  for (std::size_t i = 0; i < grid.theta(); ++i) {
    const VoxelIndex v = grid.voxel(i);
    const int here = gt[static_cast<Eigen::Index>(i)];
    for (const auto& e : grid.neighborhood26(v)) {
      if (!e.voxel || e.offset.cwiseAbs().sum() != 1) continue;
      if (gt[static_cast<Eigen::Index>(grid.linear(*e.voxel))] != here) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

namespace {

constexpr int kBuiltinNx = 30, kBuiltinNy = 60;

Scenario builtin(const MaterialLibrary& lib, std::string name, VoxelIndex start,
                 const std::function<bool(int, int)>& is_silicone) {
  const std::size_t silicone = lib.index_of("silicone");
  const std::size_t wood = lib.index_of("wood");
  WorkspaceGrid grid(WorkspaceBounds{0.0, 0.30, 0.0, 0.60, 0.0, 0.01, 0.01});
  Eigen::VectorXi gt(static_cast<Eigen::Index>(grid.theta()));
  for (int y = 0; y < kBuiltinNy; ++y) {
    for (int x = 0; x < kBuiltinNx; ++x) {
      gt[static_cast<Eigen::Index>(grid.linear({x, y, 0}))] =
          static_cast<int>(is_silicone(x, y) ? silicone : wood);
    }
  }
  auto bench = boundary_voxels(grid, gt);
  return Scenario{std::move(name), grid, std::move(gt), std::move(bench), start,
                  TaskSpec{silicone, wood}};
}

void sort_by_x_then_y(std::vector<VoxelIndex>& v) {
  std::sort(v.begin(), v.end(), [](const VoxelIndex& a, const VoxelIndex& b) {
    return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
  });
}

}  // namespace

std::vector<Scenario> generate_builtin_scenarios(const MaterialLibrary& lib) {
  std::vector<Scenario> out;

  out.push_back(builtin(lib, "scenario-1", {28, 30, 0}, [](int, int y) { return y >= 30; }));
  sort_by_x_then_y(out.back().benchmark);

  out.push_back(builtin(lib, "scenario-2", {28, 31, 0}, [](int x, int y) {
    const double edge = 31.0 + 8.0 * std::sin(std::numbers::pi * (28 - x) / 14.0);
    return y >= std::round(edge);
  }));
  sort_by_x_then_y(out.back().benchmark);

  constexpr double kCx = 13.0, kCy = 31.0, kRadius = 5.4;
  out.push_back(builtin(lib, "scenario-3", {17, 35, 0}, [](int x, int y) {
    const double dx = x - kCx, dy = y - kCy;
    return dx * dx + dy * dy <= kRadius * kRadius;
  }));
  // Angular order around the disc centre makes the path a closed loop.
  auto& loop = out.back().benchmark;
  std::sort(loop.begin(), loop.end(), [](const VoxelIndex& a, const VoxelIndex& b) {
    const double ta = std::atan2(a.iy - kCy, a.ix - kCx);
    const double tb = std::atan2(b.iy - kCy, b.ix - kCx);
    if (ta != tb) return ta < tb;
    return std::hypot(a.ix - kCx, a.iy - kCy) < std::hypot(b.ix - kCx, b.iy - kCy);
  });
  return out;
}

HapticSample sense(const Scenario& s, const MaterialLibrary& lib, const VoxelIndex& v,
                   const NoiseSpec& noise, Rng& rng) {
  s.grid.check(v);
  return synthesize_sample(lib, s.material_at(v), noise, rng);
}

double gamma_metric(const WorkspaceGrid& grid, const std::vector<VoxelIndex>& visited,
                    const std::vector<VoxelIndex>& benchmark) {
  if (benchmark.empty()) throw std::invalid_argument("empty benchmark path");
  double total = 0.0;
  for (const auto& v : visited) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : benchmark) best = std::min(best, grid.distance(v, b));
    total += best;
  }
  return total;
}

std::string to_string(StopReason r) {
  return r == StopReason::kLoopClosure ? "loop_closure" : "budget";
}

TrialRecord run_trial(const Scenario& scenario, const MaterialLibrary& lib,
                      const TrialConfig& config, const TrialObserver& observer) {
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  const auto& grid = scenario.grid;
  grid.check(scenario.start);

  Field<bool> on_benchmark = grid.constant_field(false);
  for (const auto& b : scenario.benchmark) on_benchmark[static_cast<Eigen::Index>(grid.linear(b))] = true;

  Rng rng(config.seed);
  PerceptionMap perception(lib.size(), grid.theta());
  Field<bool> seen = grid.constant_field(false);

  TrialRecord rec;
  rec.seed = config.seed;
  VoxelIndex current = scenario.start;
  int local_run = 0;
  const auto& rule = config.closure;

  for (int k = 0; k < config.max_iterations; ++k) {
    rec.visited.push_back(current);
    const auto li = static_cast<Eigen::Index>(grid.linear(current));
    if (seen[li]) ++rec.revisits;
    seen[li] = true;

    if (rule.enabled) {
      const bool local = k > 0 && chebyshev(current, rec.visited[rec.visited.size() - 2]) <= rule.local_step;
      local_run = local ? local_run + 1 : 0;
      if (local_run >= rule.min_run) {
        const auto older = static_cast<std::ptrdiff_t>(rec.visited.size()) - 1 - rule.min_age;
        bool closed = false;
        for (std::ptrdiff_t j = 0; j < older && !closed; ++j) {
          const auto& w = rec.visited[static_cast<std::size_t>(j)];
          closed = on_benchmark[static_cast<Eigen::Index>(grid.linear(w))] && chebyshev(current, w) <= 1;
        }
        if (closed) {
          rec.stop_reason = StopReason::kLoopClosure;
          break;
        }
      }
    }

    const auto sample = sense(scenario, lib, current, config.noise, rng);
    if (perception.integrate(lib, static_cast<std::size_t>(li), sample)) ++rec.degenerate_count;

    const auto state = compute_attention(grid, perception, scenario.task, current, config.attention);
    if (state.degenerate) ++rec.degenerate_count;
    if (observer) observer(k, current, state);
    current = select_target(grid, state.target_posterior);
  }

  rec.l = rec.visited.size();
  rec.gamma = gamma_metric(grid, rec.visited, scenario.benchmark);
  rec.gamma_per_l = rec.l > 0 ? rec.gamma / static_cast<double>(rec.l) : 0.0;
  return rec;
}

}  // namespace hapex
