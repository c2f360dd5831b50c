#include "aek/cli.hpp"

#include "aek/midplanes.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace aek::cli {

namespace {

// ---------------------------------------------------------------- json values

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json num(const Rational& v) { return format_rational(v); }

template <class Derived>
json vec(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

template <class Derived>
json mat(const Eigen::MatrixBase<Derived>& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

template <class T, std::size_t N>
json arr(const std::array<T, N>& a) {
  json out = json::array();
  for (const auto& v : a) out.push_back(num(v));
  return out;
}

template <ScalarType S>
json plane_json(const Plane3<S>& p) {
  return {{"normal", vec(p.normal())}, {"offset", num(p.offset())}};
}

template <ScalarType S>
json center_json(const BlaschkeFrame<S>& frame, const CenterPoint<S>& c) {
  if (!c) return {{"local", "AtInfinity"}, {"world", "AtInfinity"}};
  return {{"local", vec(*c)}, {"world", vec(pull_back_point(frame, *c))}};
}

double magnitude(double v) { return std::abs(v); }
double magnitude(const Rational& v) { return to_double(abs_value(v)); }

// ------------------------------------------------------------------ spec file

Rational parse_value(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return rational_from_decimal(v.get<double>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
      throw UsageError(where + ": '" + v.get<std::string>() + "' is not a number or p/q rational");
    }
  }
  throw UsageError(where + ": expected a number or a \"p/q\" string");
}

double parse_double(const json& v, const std::string& where) { return to_double(parse_value(v, where)); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw UsageError(where + ": unknown key '" + key + "'");
}

std::pair<int, int> parse_exponents(const std::string& key) {
  int i = -1, j = -1;
  char tail = 0;
  if (std::sscanf(key.c_str(), "%d,%d%c", &i, &j, &tail) != 2 || i < 0 || j < 0)
    throw UsageError("coefficients: key '" + key + "' is not of the form \"i,j\"");
  return {i, j};
}

Mode parse_mode(const std::string& text) {
  if (text == "rational") return Mode::Rational;
  if (text == "float") return Mode::Float;
  throw UsageError("mode must be \"rational\" or \"float\", got '" + text + "'");
}

Vector2<Rational> parse_pair(const std::string& text, const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw UsageError(what + " must be two comma-separated values, got '" + text + "'");
  try {
    return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError(what + ": cannot parse '" + text + "'");
  }
}

// ------------------------------------------------------------------- context

struct Context {
  SurfaceSpec spec;
  Mode mode = Mode::Rational;
  Vector2<Rational> point = Vector2<Rational>::Zero();
  json warnings = json::array();
  std::string mode_used;
};

template <class Body>
json with_frame(Context& ctx, Body&& body) {
  NormalizeOptions nopts;
  nopts.apolarity_tolerance = ctx.spec.tolerances.apolarity;
  if (ctx.mode == Mode::Rational) {
    std::optional<BlaschkeFrame<Rational>> frame;
    try {
      frame = normalize_at(ctx.spec.surface, ctx.point, nopts);
    } catch (const NotRepresentable& e) {
      ctx.warnings.push_back(std::string("exact normal form unavailable (") + e.what() + "); float mode used");
    }
    if (frame) {
      ctx.mode_used = "rational";
      return body(*frame);
    }
  }
  ctx.mode_used = "float";
  const auto surface = ctx.spec.surface.cast<double>();
  const Eigen::Vector2d p(to_double(ctx.point(0)), to_double(ctx.point(1)));
  return body(normalize_at(surface, p, nopts));
}

template <ScalarType S>
json frame_json(const BlaschkeFrame<S>& f) {
  const auto& map = f.world_from_local;
  return {{"point", vec(f.base_point)},
          {"a", num(f.a)},
          {"b", num(f.b)},
          {"f4", arr(f.f4)},
          {"f50", num(f.f50)},
          {"f31", num(f.f31)},
          {"apolarity_residuals", vec(f.apolarity_residuals())},
          {"pick_invariant", num(pick_invariant(f))},
          {"world_from_local",
           {{"linear", mat(map.linear())}, {"translation", vec(map.translation())}, {"determinant", num(map.determinant())}}}};
}

Vector2<Rational> rational_unit(const Rational& t) {
  const Rational d = 1 + t * t;
  return {(1 - t * t) / d, 2 * t / d};
}

struct DirectionArg {
  std::optional<Vector2<Rational>> pair;
  double angle = 0.0;
};

DirectionArg parse_direction(const std::optional<std::string>& text) {
  DirectionArg d;
  if (!text) return d;
  if (text->find(',') != std::string::npos) {
    d.pair = parse_pair(*text, "--direction");
    if (d.pair->isZero()) throw UsageError("--direction: zero vector");
    return d;
  }
  try {
    std::size_t used = 0;
    d.angle = std::stod(*text, &used);
    if (used != text->size() || !std::isfinite(d.angle)) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw UsageError("--direction: '" + *text + "' is neither an angle nor xi,eta");
  }
  return d;
}

template <ScalarType S>
TangentDirection<S> make_direction(const DirectionArg& d, json& warnings) {
  if constexpr (is_exact_v<S>) {
    if (d.pair) {
      if (d.pair->squaredNorm() != Rational(1))
        throw UsageError("--direction: xi,eta must be an exact unit vector in rational mode");
      return TangentDirection<Rational>(*d.pair);
    }
    double theta = std::fmod(d.angle, std::numbers::pi);
    if (theta < 0) theta += std::numbers::pi;
    if (theta == 0.0) return {Rational(1), Rational(0)};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", std::tan(theta / 2));
    const Vector2<Rational> v = rational_unit(parse_rational(buf));
    warnings.push_back("direction angle replaced by the rational unit vector (" + format_rational(v(0)) + ", " +
                       format_rational(v(1)) + ")");
    return TangentDirection<Rational>(v);
  } else {
    if (d.pair) {
      Eigen::Vector2d v(to_double((*d.pair)(0)), to_double((*d.pair)(1)));
      v.normalize();
      return TangentDirection<double>(v);
    }
    return TangentDirection<double>::from_angle(d.angle);
  }
}

// ------------------------------------------------------------------ commands

template <ScalarType S>
json invariants_json(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  const S& xi = t.xi();
  const S& eta = t.eta();
  json r;
  r["frame"] = {{"a", num(frame.a)}, {"b", num(frame.b)}, {"pick_invariant", num(pick_invariant(frame))}};
  r["base_point_world"] = vec(frame.world_from_local.translation());
  r["direction"] = {{"angle", t.angle()},
                    {"local", vec(t.vector())},
                    {"world", vec(pull_back_vector(frame, Vector3<S>(xi, eta, S(0))))}};
  const Plane3<S> transon = transon_plane(frame, t);
  r["transon_plane"] = {{"local", plane_json(transon)}, {"world", plane_json(pull_back(frame, transon))}};
  try {
    const Vector3<S> s = su_cone_direction(frame, t);
    r["su_cone_direction"] = {{"degenerate", false}, {"local", vec(s)}, {"world", vec(pull_back_vector(frame, s))}};
  } catch (const DegenerateCone& e) {
    r["su_cone_direction"] = {{"degenerate", true}, {"message", e.what()}};
  }
  const Quadric3<S> quadric = moutard_quadric(frame, t);
  r["moutard_quadric"] = {{"local", mat(quadric.matrix())}, {"world", mat(pull_back(frame, quadric).matrix())}};
  r["moutard_center"] = center_json(frame, moutard_center(frame, t));
  r["center_of_affine_curvature"] = center_json(frame, center_of_affine_curvature(frame, t));
  const SectionJet<S> section = gamma_section(rotate_frame(frame, t.vector()));
  r["section"] = {{"a3", num(section.a3)},
                  {"a4", num(section.a4)},
                  {"a5", num(section.a5)},
                  {"affine_curvature", num(affine_curvature(section))},
                  {"affine_curvature_derivative", num(affine_curvature_derivative(section))}};
  const DirectionSextic<S> q = direction_sextic(frame);
  r["direction_sextic"] = {{"coefficients", arr(q.q)}, {"value", num(q(xi, eta))}};
  r["discriminant_D"] = num(discriminant_D(frame, xi, eta));
  return r;
}

template <ScalarType S>
json invariants_for(const BlaschkeFrame<S>& frame, const DirectionArg& d, json& warnings) {
  return invariants_json(frame, make_direction<S>(d, warnings));
}

struct Check {
  Check(std::string n, bool p, double r, double tol, std::string d)
      : name(std::move(n)), passed(p), residual(r), tolerance(tol), detail(std::move(d)) {}

  std::string name;
  bool passed = false;
  double residual = 0.0;
  /// 0 for exact comparisons.
  double tolerance = 0.0;
  std::string detail;
  std::optional<double> fitted_order;

  json to_json() const {
    json j = {{"name", name}, {"passed", passed}, {"residual", num(residual)}, {"tolerance", tolerance},
              {"detail", detail}};
    if (fitted_order) j["fitted_order"] = num(*fitted_order);
    return j;
  }
};

template <ScalarType S>
std::vector<TangentDirection<S>> sample_directions() {
  std::vector<TangentDirection<S>> out;
  if constexpr (is_exact_v<S>) {
    for (const auto& [n, d] : {std::pair{0, 1}, {1, 3}, {1, 2}, {1, 1}, {2, 1}, {-1, 2}, {-3, 1}, {3, 4}})
      out.emplace_back(rational_unit(Rational(n, d)));
  } else {
    for (int k = 0; k < 8; ++k) out.push_back(TangentDirection<double>::from_angle(0.1 + k * std::numbers::pi / 8));
  }
  return out;
}

template <ScalarType S>
bool within(const S& residual, double tol) {
  if constexpr (is_exact_v<S>)
    return residual.is_zero();
  else
    return std::abs(residual) <= tol;
}

double center_gap(const std::optional<Eigen::Vector3d>& a, const std::optional<Eigen::Vector3d>& b) {
  if (!a && !b) return 0.0;
  if (!a || !b) return std::numeric_limits<double>::infinity();
  return (*a - *b).norm() / std::max(1.0, b->norm());
}

template <ScalarType S>
std::optional<Eigen::Vector3d> center_to_double(const CenterPoint<S>& c) {
  if (!c) return std::nullopt;
  return Eigen::Vector3d(to_double((*c)(0)), to_double((*c)(1)), to_double((*c)(2)));
}

template <ScalarType S>
json verify_json(const BlaschkeFrame<S>& frame, const Tolerances& tol, bool corrupt_h12) {
  constexpr bool exact = is_exact_v<S>;
  const double check_tol = exact ? 0.0 : tol.check;
  constexpr double center_tol = 1e-10;
  std::vector<Check> checks;

  {
    const LemmaReport r = verify_lemma_main3(frame, tol.check);
    checks.push_back({"midplane_expansion_order3", r.passed, r.max_residual, check_tol,
                      std::to_string(r.coefficients_checked) + " coefficients"});
  }
  {
    HForms<S> h = h_forms(frame);
    if (corrupt_h12) h.h1[1].c[3] += S(1);
    const LemmaReport r = verify_lemma_main4(frame, h, tol.check);
    checks.push_back({"midplane_expansion_order4", r.passed, r.max_residual, check_tol,
                      std::to_string(r.coefficients_checked) + " coefficients" + (corrupt_h12 ? ", H12 corrupted" : "")});
  }

  const auto dirs = sample_directions<S>();
  const DirectionSextic<S> q = direction_sextic(frame);
  const double q_scale = std::max(1.0, magnitude(q.scale()));
  {
    Check c{"discriminant_identity", true, 0.0, exact ? 0.0 : tol.check * q_scale, "D = -3/32 (xi^2+eta^2)^2 q"};
    for (const auto& t : dirs) {
      const S n2 = t.xi() * t.xi() + t.eta() * t.eta();
      const S res = discriminant_D(frame, t.xi(), t.eta()) + S(3) / S(32) * n2 * n2 * q(t.xi(), t.eta());
      c.residual = std::max(c.residual, magnitude(res));
      c.passed = c.passed && within(res, c.tolerance);
    }
    c.detail += ", " + std::to_string(dirs.size()) + " directions";
    checks.push_back(c);
  }
  {
    const double g_scale = std::max({1.0, magnitude(frame.a), magnitude(frame.b)});
    Check c{"euler_relation", true, 0.0, check_tol * g_scale, "xi G_xi + eta G_eta = 3 G"};
    for (const auto& t : dirs) {
      const AffineForm3<S> r = t.xi() * transon_form_dxi(frame, t.xi(), t.eta()) +
                               t.eta() * transon_form_deta(frame, t.xi(), t.eta()) -
                               S(3) * transon_form(frame, t.xi(), t.eta());
      for (int i = 0; i < 4; ++i) {
        const S v = i < 3 ? r.coeffs(i) : r.constant;
        c.residual = std::max(c.residual, magnitude(v));
        c.passed = c.passed && within(v, c.tolerance);
      }
    }
    checks.push_back(c);
  }
  {
    Check c{"curvature_center_equals_moutard", true, 0.0, exact ? 0.0 : center_tol, ""};
    for (const auto& t : dirs) {
      const CenterPoint<S> m = moutard_center(frame, t);
      const CenterPoint<S> k = center_of_affine_curvature(frame, t);
      if constexpr (exact) {
        if (m != k) c.passed = false;
      }
      const double gap = center_gap(center_to_double(k), center_to_double(m));
      c.residual = std::max(c.residual, gap);
      if (!exact && !(gap <= center_tol)) c.passed = false;
    }
    c.detail = std::to_string(dirs.size()) + " directions";
    checks.push_back(c);
  }
  {
    // Roots of q are irrational in general, so this check runs in double.
    const BlaschkeFrame<double> fd = frame.template cast<double>();
    const DirectionSet set = evolute_directions(fd, tol.directions);
    std::vector<double> angles;
    std::size_t skipped = 0;
    if (set.identically_zero) {
      for (const auto& t : sample_directions<double>()) angles.push_back(t.angle());
    } else {
      for (const auto& r : set.roots) {
        if (r.simple)
          angles.push_back(r.theta);
        else
          ++skipped;
      }
    }
    Check c{"evolute_point_equals_moutard", true, 0.0, center_tol, ""};
    for (double theta : angles) {
      double gap = std::numeric_limits<double>::infinity();
      try {
        const auto sol = solve_evolute_point(fd, theta, tol.solve);
        const auto m = moutard_center(fd, TangentDirection<double>::from_angle(theta));
        gap = sol.at_infinity ? (m ? gap : 0.0) : center_gap(sol.center_local, m);
      } catch (const GeometryError&) {
      }
      c.residual = std::max(c.residual, gap);
      if (!(gap <= center_tol)) c.passed = false;
    }
    c.detail = std::to_string(angles.size()) + (set.identically_zero ? " directions (q vanishes identically)" : " roots");
    if (skipped) c.detail += ", " + std::to_string(skipped) + " multiple root(s) skipped";
    checks.push_back(c);
  }
  {
    std::vector<S> ts;
    for (int k = 1; k <= 4; ++k) ts.push_back(S(1) / S(static_cast<long>(std::pow(10, k))));
    Check c{"midplane_limit", true, 0.0, 0.9, "fitted order of plane distance over t = 1e-1 .. 1e-4"};
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 4; ++k) {
      const ProbeReport p = midplane_limit_probe(frame, dirs[k], ts);
      c.residual = std::max(c.residual, p.distance.back());
      if (p.exact_zero) continue;
      worst = std::min(worst, p.fitted_order);
      if (!(p.fitted_order >= 0.9)) c.passed = false;
    }
    c.fitted_order = worst;
    checks.push_back(c);
  }

  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back(c.to_json());
    all = all && c.passed;
  }
  return {{"frame", frame_json(frame)}, {"checks", list}, {"all_passed", all}};
}

BlaschkeFrame<Rational> seeded_frame(unsigned seed) {
  std::mt19937_64 rng(seed);
  const auto draw = [&] {
    const long n = static_cast<long>(rng() % 19) - 9;
    const long d = static_cast<long>(rng() % 8) + 1;
    return Rational(n, d);
  };
  const Rational a = draw(), b = draw();
  std::array<Rational, 5> f4;
  std::array<Rational, 6> f5;
  for (auto& v : f4) v = draw();
  for (auto& v : f5) v = draw();
  return BlaschkeFrame<Rational>::from_coefficients(a, b, f4, f5);
}

std::optional<Eigen::Vector3d> member_point(const TraceResult& t, std::size_t sample, int root) {
  const GridSample& s = t.samples[sample];
  if (root < 0) return s.degenerate_center;
  const auto& sol = s.roots[root].solution;
  if (!sol || sol->at_infinity) return std::nullopt;
  return sol->center_world;
}

json sample_json(const GridSample& s) {
  json j = {{"i", s.i}, {"j", s.j}, {"u", num(s.chart(0))}, {"v", num(s.chart(1))}, {"status", to_string(s.status)}};
  if (!s.message.empty()) j["message"] = s.message;
  if (s.status != SampleStatus::Ok && s.status != SampleStatus::IdenticallyZero) return j;
  j["pick_invariant"] = num(s.pick_invariant);
  j["pick_derivative_nonzero"] = s.pick_derivative_nonzero ? json(*s.pick_derivative_nonzero) : json(nullptr);
  if (s.degenerate_center) j["degenerate_center"] = vec(*s.degenerate_center);
  json roots = json::array();
  for (const auto& r : s.roots) {
    json rj = {{"theta", num(r.root.theta)},
               {"chart_angle", num(r.chart_angle)},
               {"simple", r.root.simple},
               {"q_derivative", num(r.root.q_derivative)},
               {"branch", r.branch}};
    if (r.solution) {
      rj["at_infinity"] = r.solution->at_infinity;
      rj["center_world"] = vec(r.solution->center_world);
      rj["D"] = num(r.solution->D);
      rj["mu_gamma_prime"] = num(r.solution->mu_gamma_prime);
    }
    rj["regular"] = r.regular ? json(*r.regular) : json(nullptr);
    if (!r.error.empty()) rj["error"] = r.error;
    roots.push_back(std::move(rj));
  }
  j["roots"] = std::move(roots);
  return j;
}

json trace_json(const TraceResult& t) {
  json r;
  r["grid"] = {{"nu", t.grid.nu},
               {"nv", t.grid.nv},
               {"origin", vec(t.grid.origin)},
               {"step_u", vec(t.grid.step_u)},
               {"step_v", vec(t.grid.step_v)}};
  std::map<std::string, int> counts;
  for (auto s : {SampleStatus::Ok, SampleStatus::IdenticallyZero, SampleStatus::NonConvexPoint,
                 SampleStatus::PatchBounds, SampleStatus::Failed})
    counts[to_string(s)] = 0;
  for (const auto& s : t.samples) ++counts[to_string(s.status)];
  r["samples_total"] = t.samples.size();
  r["samples_succeeded"] = t.succeeded();
  r["status_counts"] = counts;
  json branches = json::array();
  for (const auto& b : t.branches) {
    json members = json::array();
    for (const auto& [k, root] : b.members) members.push_back({k, root});
    branches.push_back({{"id", b.id},
                        {"degenerate", b.degenerate},
                        {"size", b.members.size()},
                        {"max_angle_jump", num(b.max_angle_jump)},
                        {"members", members}});
  }
  r["branches"] = std::move(branches);
  json events = json::array();
  for (const auto& e : t.events) events.push_back({{"sample", e.sample}, {"root", e.root}, {"kind", e.kind}});
  r["events"] = std::move(events);
  json samples = json::array();
  for (const auto& s : t.samples) samples.push_back(sample_json(s));
  r["samples"] = std::move(samples);
  r["files"] = {{"points_csv", "evolute_points.csv"}, {"mesh_obj", "evolute_mesh.obj"}};
  return r;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path.string());
  os << text;
}

json echo(const CommandOptions& o) {
  const auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  json j = {{"name", o.command},
            {"spec", o.spec ? json(o.spec->string()) : json(nullptr)},
            {"point", opt(o.point)},
            {"direction", opt(o.direction)},
            {"mode", opt(o.mode)},
            {"grid", opt(o.grid)},
            {"out", o.out ? json(o.out->string()) : json(nullptr)},
            {"workers", opt(o.workers)},
            {"random_seed", opt(o.random_seed)}};
  if (o.corrupt_h12) j["corrupt_h12"] = true;
  return j;
}

}  // namespace

// ----------------------------------------------------------------- public API

SurfaceSpec parse_spec(const json& doc) {
  check_keys(doc, {"coefficients", "closed_form", "patch", "mode", "grid", "point", "tolerances"}, "spec");
  SurfaceSpec spec;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw UsageError("mode must be a string");
    spec.mode = parse_mode(doc["mode"].get<std::string>());
  }
  if (doc.contains("coefficients") == doc.contains("closed_form"))
    throw UsageError("spec needs exactly one of \"coefficients\" and \"closed_form\"");

  std::optional<Patch> patch;
  if (doc.contains("patch")) {
    const json& p = doc["patch"];
    check_keys(p, {"u", "v"}, "patch");
    Patch out;
    for (const char* axis : {"u", "v"}) {
      if (!p.contains(axis) || !p[axis].is_array() || p[axis].size() != 2)
        throw UsageError(std::string("patch.") + axis + " must be [min, max]");
      const double lo = parse_double(p[axis][0], "patch"), hi = parse_double(p[axis][1], "patch");
      if (!(lo < hi)) throw UsageError(std::string("patch.") + axis + ": min must be below max");
      (axis[0] == 'u' ? out.u_min : out.v_min) = lo;
      (axis[0] == 'u' ? out.u_max : out.v_max) = hi;
    }
    patch = out;
  }

  if (doc.contains("coefficients")) {
    const json& c = doc["coefficients"];
    if (!c.is_object() || c.empty()) throw UsageError("coefficients must be a non-empty object");
    std::vector<std::tuple<int, int, Rational>> terms;
    int order = 2;
    for (const auto& [key, value] : c.items()) {
      const auto [i, j] = parse_exponents(key);
      order = std::max(order, i + j);
      terms.emplace_back(i, j, parse_value(value, "coefficients[" + key + "]"));
    }
    Jet2<Rational> h(order);
    for (const auto& [i, j, v] : terms) h.set_coeff({i, j}, v);
    spec.surface = SurfaceModel<Rational>::polynomial(h, patch.value_or(Patch{}));
  } else {
    const json& c = doc["closed_form"];
    check_keys(c, {"kind", "radius"}, "closed_form");
    if (!c.contains("kind") || c["kind"] != "sphere_cap") throw UsageError("closed_form.kind must be \"sphere_cap\"");
    const Rational r = c.contains("radius") ? parse_value(c["radius"], "closed_form.radius") : Rational(1);
    if (r <= 0) throw UsageError("closed_form.radius must be positive");
    const double h = to_double(r) / 2;
    spec.surface = SurfaceModel<Rational>::sphere_cap(r, patch.value_or(Patch{-h, h, -h, h}));
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    const json* n = &g;
    if (g.is_object()) {
      check_keys(g, {"n", "margin"}, "grid");
      if (!g.contains("n")) throw UsageError("grid.n is required");
      n = &g["n"];
      if (g.contains("margin")) spec.grid_margin = parse_double(g["margin"], "grid.margin");
      if (spec.grid_margin < 0) throw UsageError("grid.margin must be non-negative");
    }
    if (!n->is_number_integer() || n->get<long long>() < 0 || n->get<long long>() > 100000)
      throw UsageError("grid must be a non-negative integer");
    spec.grid = n->get<int>();
  }

  if (doc.contains("point")) {
    const json& p = doc["point"];
    if (!p.is_array() || p.size() != 2) throw UsageError("point must be [u, v]");
    spec.point = Vector2<Rational>(parse_value(p[0], "point"), parse_value(p[1], "point"));
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    Tolerances& tol = spec.tolerances;
    const std::map<std::string, double*> fields{
        {"match_threshold", &tol.match_threshold}, {"apolarity", &tol.apolarity},
        {"check", &tol.check},                     {"q_zero", &tol.directions.zero_tol},
        {"root", &tol.directions.root_tol},        {"multiple_root", &tol.directions.multiple_tol},
        {"solve_q", &tol.solve.q_tol},             {"rank", &tol.solve.rank_tol},
        {"pick", &tol.regular.pick_tol},           {"mu", &tol.regular.mu_tol},
        {"pick_step", &tol.regular.h}};
    std::set<std::string> names;
    for (const auto& [k, v] : fields) names.insert(k);
    check_keys(t, names, "tolerances");
    for (const auto& [key, value] : t.items()) {
      const double v = parse_double(value, "tolerances." + key);
      if (!(v > 0)) throw UsageError("tolerances." + key + " must be positive");
      *fields.at(key) = v;
    }
  }
  return spec;
}

SurfaceSpec load_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open spec file " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw UsageError("spec file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_spec(doc);
}

void write_points_csv(const TraceResult& trace, std::ostream& os) {
  int degenerate = -1;
  for (const auto& b : trace.branches)
    if (b.degenerate) degenerate = b.id;
  os << kPointsHeader << '\n';
  const auto row = [&](const GridSample& s, int branch, double theta, const Eigen::Vector3d& x, double d,
                       const char* flag) {
    os << format_double(s.chart(0)) << ',' << format_double(s.chart(1)) << ',' << branch << ',' << format_double(theta)
       << ',' << format_double(x(0)) << ',' << format_double(x(1)) << ',' << format_double(x(2)) << ','
       << format_double(d) << ',' << flag << '\n';
  };
  for (const auto& s : trace.samples) {
    if (s.status == SampleStatus::IdenticallyZero && s.degenerate_center) {
      row(s, degenerate, 0.0, *s.degenerate_center, 0.0, "0");
      continue;
    }
    for (const auto& r : s.roots) {
      if (!r.solution || r.solution->at_infinity || r.branch < 0) continue;
      row(s, r.branch, r.root.theta, r.solution->center_world, std::abs(r.solution->D),
          r.regular ? (*r.regular ? "1" : "0") : "-1");
    }
  }
}

void write_mesh_obj(const TraceResult& trace, std::ostream& os) {
  const GridSpec& g = trace.grid;
  std::size_t next = 1;
  for (const auto& b : trace.branches) {
    std::map<std::size_t, std::size_t> vertex;  // sample -> OBJ index
    for (const auto& [k, root] : b.members) {
      const auto p = member_point(trace, k, root);
      if (!p) continue;
      os << "v " << format_double((*p)(0)) << ' ' << format_double((*p)(1)) << ' ' << format_double((*p)(2)) << '\n';
      vertex[k] = next++;
    }
    for (int j = 0; j + 1 < g.nv; ++j)
      for (int i = 0; i + 1 < g.nu; ++i) {
        const auto a = vertex.find(g.index(i, j)), c = vertex.find(g.index(i + 1, j)),
                   d = vertex.find(g.index(i + 1, j + 1)), e = vertex.find(g.index(i, j + 1));
        if (a == vertex.end() || c == vertex.end() || d == vertex.end() || e == vertex.end()) continue;
        os << "f " << a->second << ' ' << c->second << ' ' << d->second << '\n';
        os << "f " << a->second << ' ' << d->second << ' ' << e->second << '\n';
      }
  }
}

int run(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  json report;
  report["command"] = echo(o);
  report["results"] = nullptr;
  Context ctx;
  json timing;
  std::optional<std::pair<std::string, std::string>> error;
  int code = kExitOk;
  std::filesystem::path out_dir = o.out.value_or(".");

  try {
    static const std::set<std::string> commands{"normalize", "invariants", "verify", "evolute"};
    if (!commands.count(o.command)) throw UsageError("unknown command '" + o.command + "'");
    if (o.random_seed && o.command != "verify") throw UsageError("--random-seed applies to verify only");
    if (o.random_seed && o.spec) throw UsageError("--random-seed and --spec are exclusive");
    if (!o.random_seed && !o.spec) throw UsageError("--spec is required");
    if (o.corrupt_h12 && o.command != "verify") throw UsageError("--corrupt-h12 applies to verify only");
    if (o.workers && *o.workers < 0) throw UsageError("--workers must be non-negative");

    if (o.spec) ctx.spec = load_spec(*o.spec);
    ctx.mode = o.mode ? parse_mode(*o.mode) : ctx.spec.mode;
    ctx.point = o.point ? parse_pair(*o.point, "--point") : ctx.spec.point.value_or(Vector2<Rational>::Zero());
    if (o.spec) {
      const auto bad = convexity_violations(ctx.spec.surface);
      if (!bad.empty())
        ctx.warnings.push_back("Hessian not positive definite at " + std::to_string(bad.size()) +
                               " of 81 patch samples, first at (" + format_double(bad.front()(0)) + ", " +
                               format_double(bad.front()(1)) + ")");
    }

    if (o.command == "normalize") {
      report["results"] = with_frame(ctx, [](const auto& frame) { return frame_json(frame); });
    } else if (o.command == "invariants") {
      const DirectionArg d = parse_direction(o.direction);
      report["results"] = with_frame(ctx, [&](const auto& frame) { return invariants_for(frame, d, ctx.warnings); });
    } else if (o.command == "verify") {
      const auto body = [&](const auto& frame) { return verify_json(frame, ctx.spec.tolerances, o.corrupt_h12); };
      if (o.random_seed) {
        const auto frame = seeded_frame(*o.random_seed);
        if (ctx.mode == Mode::Rational) {
          ctx.mode_used = "rational";
          report["results"] = body(frame);
        } else {
          ctx.mode_used = "float";
          report["results"] = body(frame.cast<double>());
        }
      } else {
        report["results"] = with_frame(ctx, body);
      }
      if (ctx.mode_used == "float")
        ctx.warnings.push_back("float mode: residual checks use a bound of " + format_double(ctx.spec.tolerances.check));
      if (!report["results"]["all_passed"].get<bool>()) code = kExitVerifyFailed;
    } else {
      const int n = o.grid.value_or(ctx.spec.grid);
      if (n <= 0) throw UsageError("empty grid: evolute needs a grid of at least 1x1");
      if (ctx.mode == Mode::Rational) ctx.warnings.push_back("evolute directions and points are computed in floating point");
      ctx.mode_used = "float";
      const auto surface = ctx.spec.surface.cast<double>();
      TraceOptions topts;
      topts.match_threshold = ctx.spec.tolerances.match_threshold;
      topts.workers = o.workers.value_or(0);
      topts.regularity = true;
      topts.directions = ctx.spec.tolerances.directions;
      topts.solve = ctx.spec.tolerances.solve;
      topts.regular = ctx.spec.tolerances.regular;
      const auto t0 = std::chrono::steady_clock::now();
      const TraceResult trace = trace_evolute(surface, GridSpec::over_patch(surface.patch(), n, ctx.spec.grid_margin), topts);
      timing["trace_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report["results"] = trace_json(trace);
      std::filesystem::create_directories(out_dir);
      std::ostringstream csv, obj;
      write_points_csv(trace, csv);
      write_mesh_obj(trace, obj);
      write_file(out_dir / "evolute_points.csv", csv.str());
      write_file(out_dir / "evolute_mesh.obj", obj.str());
      if (trace.succeeded() == 0) {
        code = kExitGeometry;
        error = {"NoSampleSucceeded", "no grid sample produced evolute points"};
      }
    }
  } catch (const UsageError& e) {
    code = kExitUsage;
    error = {"UsageError", e.what()};
  } catch (const NonConvexPoint& e) {
    code = kExitGeometry;
    error = {"NonConvexPoint", e.what()};
  } catch (const PatchBounds& e) {
    code = kExitGeometry;
    error = {"PatchBounds", e.what()};
  } catch (const GeometryError& e) {
    code = kExitGeometry;
    error = {"GeometryError", e.what()};
  } catch (const NotRepresentable& e) {
    code = kExitGeometry;
    error = {"NotRepresentable", e.what()};
  } catch (const std::exception& e) {
    code = kExitGeometry;
    error = {"Error", e.what()};
  }

  json diag = {{"mode_used", ctx.mode_used.empty() ? json(nullptr) : json(ctx.mode_used)},
               {"warnings", ctx.warnings},
               {"exit_code", code}};
  if (error) diag["error"] = {{"kind", error->first}, {"message", error->second}};
  report["diagnostics"] = std::move(diag);
  if (o.timing) {
    timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = timing;
  }

  const std::string text = report.dump(2) + "\n";
  out << text;
  if (error) err << "aek " << o.command << ": " << error->second << '\n';
  try {
    if (o.command == "evolute" && code != kExitUsage)
      write_file(out_dir / "report.json", text);
    else if (o.out && code != kExitUsage) {
      std::filesystem::create_directories(*o.out);
      write_file(*o.out / "report.json", text);
    }
  } catch (const std::exception& e) {
    err << "aek: " << e.what() << '\n';
    if (code == kExitOk) code = kExitUsage;
  }
  return code;
}

}  // namespace aek::cli
