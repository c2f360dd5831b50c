#pragma once

// Evolute points over a grid of surface points, linked into branches.

#include "aek/evolute.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aek {

/// Chart points origin + i step_u + j step_v, 0 <= i < nu, 0 <= j < nv.
struct GridSpec {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  Eigen::Vector2d step_u = Eigen::Vector2d(1, 0);
  Eigen::Vector2d step_v = Eigen::Vector2d(0, 1);
  int nu = 0;
  int nv = 0;

  Eigen::Vector2d point(int i, int j) const { return origin + i * step_u + j * step_v; }
  std::size_t size() const { return static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nu + i; }

  /// n x n grid spanning the patch shrunk by margin on every side.
  static GridSpec over_patch(const Patch& patch, int n, double margin = 0.0);
  /// Image of the grid under the chart map p -> b p + t.
  GridSpec mapped(const Eigen::Matrix2d& b, const Eigen::Vector2d& t) const;
};

struct TraceOptions {
  double match_threshold = 0.2;
  /// 0 = hardware concurrency.
  int workers = 0;
  /// Also compute the regularity flags (costs 16 extra normalizations per sample).
  bool regularity = false;
  DirectionOptions directions;
  SolveOptions solve;
  RegularityOptions regular;
};

enum class SampleStatus { Ok, IdenticallyZero, NonConvexPoint, PatchBounds, Failed };

const char* to_string(SampleStatus s);

struct RootSample {
  DirectionRoot root;
  /// Direction of the root as a chart angle in [0, pi).
  double chart_angle = 0.0;
  std::optional<EvoluteSolution<double>> solution;
  std::string error;
  std::optional<bool> regular;
  int branch = -1;
};

struct GridSample {
  int i = 0;
  int j = 0;
  Eigen::Vector2d chart = Eigen::Vector2d::Zero();
  SampleStatus status = SampleStatus::Failed;
  std::string message;
  std::vector<RootSample> roots;
  /// Moutard center used for identically-zero samples (world coordinates).
  std::optional<Eigen::Vector3d> degenerate_center;
  double pick_invariant = 0.0;
  std::optional<bool> pick_derivative_nonzero;
};

struct BranchEvent {
  std::size_t sample = 0;
  int root = -1;
  std::string kind;
};

struct EvoluteBranch {
  int id = 0;
  /// Identically-zero samples (every direction solves); one shared degenerate branch.
  bool degenerate = false;
  /// (sample index, root index); root index -1 for degenerate members.
  std::vector<std::pair<std::size_t, int>> members;
  double max_angle_jump = 0.0;
  /// Grid-neighbour links that built the branch.
  std::vector<std::pair<std::pair<std::size_t, int>, std::pair<std::size_t, int>>> links;
};

struct TraceResult {
  GridSpec grid;
  std::vector<GridSample> samples;
  std::vector<EvoluteBranch> branches;
  std::vector<BranchEvent> events;

  std::size_t succeeded() const;
};

/// Per-sample work runs on options.workers threads; errors are recorded per sample.
TraceResult trace_evolute(const SurfaceModel<double>& surface, const GridSpec& grid, const TraceOptions& options = {});

/// Evolute data at one chart point (the unit of work of trace_evolute).
GridSample evolute_sample(const SurfaceModel<double>& surface, const Eigen::Vector2d& p, const TraceOptions& options = {});

}  // namespace aek
