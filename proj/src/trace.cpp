#include "aek/trace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <iterator>
#include <numeric>
#include <thread>

namespace aek {

namespace {

double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

double chart_angle(const BlaschkeFrame<double>& frame, double theta) {
  const Eigen::Vector3d w = frame.world_from_local.apply_vector(Eigen::Vector3d(std::cos(theta), std::sin(theta), 0));
  double a = std::atan2(w(1), w(0));
  if (a < 0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

// Union-find over roots that refuses to put two roots of one sample in a set.
struct BranchSets {
  std::vector<std::size_t> parent;
  std::vector<std::vector<std::size_t>> samples;

  explicit BranchSets(const std::vector<std::size_t>& sample_of) : parent(sample_of.size()), samples(sample_of.size()) {
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t k = 0; k < sample_of.size(); ++k) samples[k] = {sample_of[k]};
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    std::vector<std::size_t> merged;
    std::set_union(samples[a].begin(), samples[a].end(), samples[b].begin(), samples[b].end(),
                   std::back_inserter(merged));
    if (merged.size() != samples[a].size() + samples[b].size()) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    samples[a] = std::move(merged);
    samples[b].clear();
    return true;
  }
};

}  // namespace

const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::IdenticallyZero: return "identically_zero";
    case SampleStatus::NonConvexPoint: return "non_convex_point";
    case SampleStatus::PatchBounds: return "patch_bounds";
    case SampleStatus::Failed: return "failed";
  }
  return "failed";
}

GridSpec GridSpec::over_patch(const Patch& patch, int n, double margin) {
  GridSpec g;
  g.nu = g.nv = n;
  g.origin = Eigen::Vector2d(patch.u_min + margin, patch.v_min + margin);
  const double du = n > 1 ? (patch.u_max - patch.u_min - 2 * margin) / (n - 1) : 0.0;
  const double dv = n > 1 ? (patch.v_max - patch.v_min - 2 * margin) / (n - 1) : 0.0;
  g.step_u = Eigen::Vector2d(du, 0);
  g.step_v = Eigen::Vector2d(0, dv);
  if (n == 1) g.origin = Eigen::Vector2d((patch.u_min + patch.u_max) / 2, (patch.v_min + patch.v_max) / 2);
  return g;
}

GridSpec GridSpec::mapped(const Eigen::Matrix2d& b, const Eigen::Vector2d& t) const {
  GridSpec g = *this;
  g.origin = b * origin + t;
  g.step_u = b * step_u;
  g.step_v = b * step_v;
  return g;
}

std::size_t TraceResult::succeeded() const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const GridSample& s) {
    return s.status == SampleStatus::Ok || s.status == SampleStatus::IdenticallyZero;
  }));
}

GridSample evolute_sample(const SurfaceModel<double>& surface, const Eigen::Vector2d& p, const TraceOptions& options) {
  GridSample out;
  out.chart = p;
  try {
    const auto frame = normalize_at(surface, p);
    out.pick_invariant = pick_invariant(frame);
    const DirectionSet set = evolute_directions(frame, options.directions);
    if (set.identically_zero) {
      out.status = SampleStatus::IdenticallyZero;
      if (const auto c = moutard_center(frame, TangentDirection<double>(1.0, 0.0)))
        out.degenerate_center = pull_back_point(frame, *c);
      return out;
    }
    if (options.regularity) {
      try {
        bool any = false;
        for (int k = 0; k < 8; ++k) {
          const double phi = k * std::numbers::pi / 8;
          any = any || std::abs(pick_derivative(surface, p, Eigen::Vector2d(std::cos(phi), std::sin(phi)),
                                                options.regular.h)) > options.regular.pick_tol;
        }
        out.pick_derivative_nonzero = any;
      } catch (const std::exception&) {
        // Stencil outside the patch: regularity stays unknown.
      }
    }
    double scale = 1.0;
    for (double c : {frame.a, frame.b, frame.f50, frame.f4[1], frame.f40()}) scale = std::max(scale, std::abs(c));
    for (const auto& root : set.roots) {
      RootSample rs;
      rs.root = root;
      rs.chart_angle = chart_angle(frame, root.theta);
      try {
        rs.solution = solve_evolute_point(frame, root.theta, options.solve);
        if (out.pick_derivative_nonzero)
          rs.regular = *out.pick_derivative_nonzero &&
                       std::abs(rs.solution->mu_gamma_prime) > options.regular.mu_tol * scale * scale * scale;
      } catch (const std::exception& e) {
        rs.error = e.what();
      }
      out.roots.push_back(std::move(rs));
    }
    out.status = SampleStatus::Ok;
  } catch (const NonConvexPoint& e) {
    out.status = SampleStatus::NonConvexPoint;
    out.message = e.what();
  } catch (const PatchBounds& e) {
    out.status = SampleStatus::PatchBounds;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = SampleStatus::Failed;
    out.message = e.what();
  }
  return out;
}

TraceResult trace_evolute(const SurfaceModel<double>& surface, const GridSpec& grid, const TraceOptions& options) {
  TraceResult result;
  result.grid = grid;
  result.samples.resize(grid.size());

  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, static_cast<int>(grid.size())));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      const int i = static_cast<int>(k % grid.nu), j = static_cast<int>(k / grid.nu);
      GridSample s = evolute_sample(surface, grid.point(i, j), options);
      s.i = i;
      s.j = j;
      result.samples[k] = std::move(s);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Branch assembly: one node per (sample, root); link mutual nearest chart angles of grid neighbours.
  std::vector<std::size_t> offset(result.samples.size() + 1, 0);
  for (std::size_t k = 0; k < result.samples.size(); ++k) offset[k + 1] = offset[k] + result.samples[k].roots.size();
  std::vector<std::size_t> sample_of(offset.back());
  for (std::size_t k = 0; k < result.samples.size(); ++k)
    for (std::size_t n = offset[k]; n < offset[k + 1]; ++n) sample_of[n] = k;
  BranchSets sets(sample_of);
  std::vector<std::pair<std::size_t, std::size_t>> links;
  std::vector<double> jump(offset.back(), 0.0);

  const auto usable = [&](std::size_t k, int r) {
    const auto& rs = result.samples[k].roots[r];
    return rs.solution.has_value() && rs.root.simple;
  };
  const auto nearest = [&](std::size_t from, int r, std::size_t to) {
    int best = -1;
    double gap = 1e300;
    const auto& roots = result.samples[to].roots;
    for (int s = 0; s < static_cast<int>(roots.size()); ++s) {
      const double g = angle_gap(result.samples[from].roots[r].chart_angle, roots[s].chart_angle);
      if (g < gap) {
        gap = g;
        best = s;
      }
    }
    return std::pair{best, gap};
  };

  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    const auto& s = result.samples[k];
    if (s.status != SampleStatus::Ok) continue;
    for (int r = 0; r < static_cast<int>(s.roots.size()); ++r) {
      if (!s.roots[r].root.simple) result.events.push_back({k, r, "multiple_root"});
      else if (!s.roots[r].solution) result.events.push_back({k, r, "solve_failed"});
    }
    std::vector<std::size_t> neighbours;
    if (s.i + 1 < grid.nu) neighbours.push_back(grid.index(s.i + 1, s.j));
    if (s.j + 1 < grid.nv) neighbours.push_back(grid.index(s.i, s.j + 1));
    for (std::size_t n : neighbours) {
      if (result.samples[n].status != SampleStatus::Ok) continue;
      for (int r = 0; r < static_cast<int>(s.roots.size()); ++r) {
        if (!usable(k, r)) continue;
        const auto [m, gap] = nearest(k, r, n);
        if (m < 0 || gap >= options.match_threshold) continue;
        if (nearest(n, m, k).first != r) {
          result.events.push_back({k, r, "ambiguous_match"});
          continue;
        }
        if (!usable(n, m)) continue;
        if (!sets.unite(offset[k] + r, offset[n] + m)) {
          result.events.push_back({k, r, "branch_conflict"});
          continue;
        }
        links.emplace_back(offset[k] + r, offset[n] + m);
        jump[offset[k] + r] = std::max(jump[offset[k] + r], gap);
      }
    }
  }

  std::vector<int> id_of_set(offset.back(), -1);
  std::optional<int> degenerate;
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    auto& s = result.samples[k];
    if (s.status == SampleStatus::IdenticallyZero) {
      if (!degenerate) {
        degenerate = static_cast<int>(result.branches.size());
        result.branches.push_back({*degenerate, true, {}, 0.0});
      }
      result.branches[*degenerate].members.emplace_back(k, -1);
      continue;
    }
    for (int r = 0; r < static_cast<int>(s.roots.size()); ++r) {
      if (!s.roots[r].solution) continue;
      const std::size_t root_set = sets.find(offset[k] + r);
      if (id_of_set[root_set] < 0) {
        id_of_set[root_set] = static_cast<int>(result.branches.size());
        result.branches.push_back({id_of_set[root_set], false, {}, 0.0});
      }
      auto& b = result.branches[id_of_set[root_set]];
      b.members.emplace_back(k, r);
      b.max_angle_jump = std::max(b.max_angle_jump, jump[offset[k] + r]);
      s.roots[r].branch = b.id;
    }
  }
  const auto node = [&](std::size_t n) {
    const std::size_t k = sample_of[n];
    return std::pair{k, static_cast<int>(n - offset[k])};
  };
  for (const auto& [x, y] : links) {
    const auto a = node(x), b = node(y);
    result.branches[result.samples[a.first].roots[a.second].branch].links.push_back({a, b});
  }
  return result;
}

}  // namespace aek
