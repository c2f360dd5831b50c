#pragma once

// Batch commands behind the `aek` executable: a JSON surface spec goes in,
// a JSON report (plus CSV/OBJ files for `evolute`) comes out.

#include "aek/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace aek::cli {

using json = nlohmann::ordered_json;

enum class Mode { Rational, Float };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitGeometry = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Bad spec file or option value; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double match_threshold = 0.2;
  double apolarity = 1e-10;
  /// Float-mode residual bound for verify checks.
  double check = 1e-12;
  DirectionOptions directions;
  SolveOptions solve;
  RegularityOptions regular;
};

struct SurfaceSpec {
  /// Coefficients are always held exactly; float mode casts.
  SurfaceModel<Rational> surface = SurfaceModel<Rational>::polynomial(Jet2<Rational>(2), Patch{});
  Mode mode = Mode::Rational;
  int grid = 41;
  double grid_margin = 0.0;
  std::optional<Vector2<Rational>> point;
  Tolerances tolerances;
};

/// Keys: coefficients | closed_form, patch, mode, grid, point, tolerances.
/// Unknown keys and malformed values throw UsageError.
SurfaceSpec parse_spec(const json& doc);
SurfaceSpec load_spec(const std::filesystem::path& path);

struct CommandOptions {
  std::string command;
  std::optional<std::filesystem::path> spec;
  std::optional<std::string> point;
  std::optional<std::string> direction;
  std::optional<std::string> mode;
  std::optional<int> grid;
  std::optional<std::filesystem::path> out;
  std::optional<int> workers;
  /// verify only: check a random normal-form frame instead of a spec point.
  std::optional<unsigned> random_seed;
  bool timing = false;
  /// Fault injection for verify: perturbs the eta^3 coefficient of H12.
  bool corrupt_h12 = false;
};

/// Runs one command, printing the JSON report to `out` and errors to `err`.
/// Returns the process exit code.
int run(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Column header of evolute_points.csv.
inline constexpr const char* kPointsHeader = "u,v,branch_id,theta,x,y,z,D_residual,regular_flag";

void write_points_csv(const TraceResult& trace, std::ostream& os);
void write_mesh_obj(const TraceResult& trace, std::ostream& os);

}  // namespace aek::cli
