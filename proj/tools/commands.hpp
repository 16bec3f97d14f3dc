#pragma once

// Command implementations for the diskcert CLI. Each command takes a resolved
// RunConfig and returns the JSON payload plus an exit code; writing files is
// left to the caller so the payloads can be compared in-process.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "diskcert/diskcert.hpp"

namespace diskcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;  ///< certificate not applicable or verification failed

// ---------------------------------------------------------------------------
// Strict JSON reading

/// Reads keys from a JSON object and rejects anything left unread.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(where_ + "." + key + ": wrong type");
    }
  }

  const Json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw Error(where_ + ": unknown key '" + k + "'");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Configuration

/// Scalar coefficient fields: nu, sigma, lambda, gamma, rho.
struct ProfileSpec {
  std::string kind = "constant";  // constant | radial | angular | dipole | ncover_pressure | random | file
  double value = 1.0;             // constant
  double a = 1.0, b = 0.0;        // radial: a + b R^2
  int l = 2;                      // angular: scale exp(cos l theta)
  double scale = 1.0;
  double c = 1.0;                 // dipole: c R^2 cos theta
  int N = 2;                      // ncover_pressure
  std::string path;               // file

  static ProfileSpec parse(const Json& j, const std::string& where) {
    ProfileSpec s;
    Reader r(j, where);
    r.get("kind", s.kind);
    r.get("value", s.value);
    r.get("a", s.a);
    r.get("b", s.b);
    r.get("l", s.l);
    r.get("scale", s.scale);
    r.get("c", s.c);
    r.get("N", s.N);
    r.get("path", s.path);
    r.finish();
    static const std::set<std::string> kinds{"constant", "radial",          "angular", "dipole",
                                             "ncover_pressure", "random", "file"};
    if (!kinds.count(s.kind)) throw Error(where + ": unknown profile kind '" + s.kind + "'");
    if (s.kind == "file" && s.path.empty()) throw Error(where + ": file profile needs a path");
    return s;
  }

  Json to_json() const {
    if (kind == "constant") return {{"kind", kind}, {"value", value}};
    if (kind == "radial") return {{"kind", kind}, {"a", a}, {"b", b}};
    if (kind == "angular") return {{"kind", kind}, {"l", l}, {"scale", scale}};
    if (kind == "dipole") return {{"kind", kind}, {"c", c}};
    if (kind == "ncover_pressure") return {{"kind", kind}, {"N", N}};
    if (kind == "random") return {{"kind", kind}};
    return {{"kind", kind}, {"path", path}};
  }
};

/// Deformation maps.
struct MapSpec {
  std::string kind = "identity";  // identity | ncover | affine | file
  int N = 2;
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};
  std::string path;

  static MapSpec parse(const Json& j, const std::string& where) {
    MapSpec s;
    Reader r(j, where);
    r.get("kind", s.kind);
    r.get("N", s.N);
    r.get("matrix", s.matrix);
    r.get("path", s.path);
    r.finish();
    static const std::set<std::string> kinds{"identity", "ncover", "affine", "file"};
    if (!kinds.count(s.kind)) throw Error(where + ": unknown map kind '" + s.kind + "'");
    if (s.kind == "file" && s.path.empty()) throw Error(where + ": file map needs a path");
    return s;
  }

  Json to_json() const {
    if (kind == "ncover") return {{"kind", kind}, {"N", N}};
    if (kind == "affine") return {{"kind", kind}, {"matrix", matrix}};
    if (kind == "file") return {{"kind", kind}, {"path", path}};
    return {{"kind", kind}};
  }
};

struct PsiSpec {
  std::string model = "zero";  // zero | det_penalty | linear_det
  ProfileSpec gamma;
  ProfileSpec rho;

  static PsiSpec parse(const Json& j, const std::string& where) {
    PsiSpec s;
    Reader r(j, where);
    r.get("model", s.model);
    if (r.has("gamma")) s.gamma = ProfileSpec::parse(r.child("gamma"), where + ".gamma");
    if (r.has("rho")) s.rho = ProfileSpec::parse(r.child("rho"), where + ".rho");
    r.finish();
    if (s.model != "zero" && s.model != "det_penalty" && s.model != "linear_det")
      throw Error(where + ": unknown Psi model '" + s.model + "'");
    return s;
  }

  Json to_json() const {
    Json j{{"model", model}};
    if (model == "det_penalty") j["gamma"] = gamma.to_json();
    if (model == "linear_det") j["rho"] = rho.to_json();
    return j;
  }
};

struct RunConfig {
  int n_r = 256;
  int n_theta = 256;
  std::string setting = "incompressible";
  double p = 2.0;
  ProfileSpec nu;
  MapSpec u;
  std::optional<ProfileSpec> lambda;
  PsiSpec psi;
  std::optional<ProfileSpec> sigma;
  std::optional<MapSpec> field_map;          // decompose: vector field
  std::optional<ProfileSpec> field_scalar;   // decompose: scalar field
  // band variations
  std::string band_kind = "high";
  int band_N = 1;
  double band_r0 = 0.2, band_r1 = 0.8;
  int band_width = 6;
  // flow variations
  int flow_modes = 3;
  double flow_time = 0.05;
  int flow_steps = 16;
  double flow_r0 = 0.2, flow_r1 = 0.8;
  std::optional<int> band_filter;
  // verification parameters
  int N = 1;
  std::optional<int> l;
  std::optional<int> n_star;
  std::optional<int> certified;
  std::string part = "i";
  bool enforce_hypotheses = true;
  double amplitude = 0.3;
  std::string variation_kind = "band";
  // tolerances
  double det_tolerance = 1e-6;
  double residual_tolerance = 1e-5;
  double curl_tolerance = 1e-4;
  double flow_det_tolerance = 1e-5;  ///< |det grad v - 1| for flow variations
  std::uint64_t seed = 1;
  long trials = 100;

  static RunConfig parse(const Json& j) {
    RunConfig c;
    Reader r(j, "config");
    if (r.has("grid")) {
      Reader g(r.child("grid"), "config.grid");
      g.get("n_r", c.n_r);
      g.get("n_theta", c.n_theta);
      g.finish();
    }
    r.get("setting", c.setting);
    r.get("p", c.p);
    if (r.has("nu")) c.nu = ProfileSpec::parse(r.child("nu"), "config.nu");
    if (r.has("u")) c.u = MapSpec::parse(r.child("u"), "config.u");
    if (r.has("lambda")) c.lambda = ProfileSpec::parse(r.child("lambda"), "config.lambda");
    if (r.has("psi")) c.psi = PsiSpec::parse(r.child("psi"), "config.psi");
    if (r.has("sigma")) c.sigma = ProfileSpec::parse(r.child("sigma"), "config.sigma");
    if (r.has("field")) {
      Reader f(r.child("field"), "config.field");
      if (f.has("map")) c.field_map = MapSpec::parse(f.child("map"), "config.field.map");
      if (f.has("scalar"))
        c.field_scalar = ProfileSpec::parse(f.child("scalar"), "config.field.scalar");
      f.finish();
      if (c.field_map.has_value() == c.field_scalar.has_value())
        throw Error("config.field: give exactly one of 'map' or 'scalar'");
    }
    if (r.has("band")) {
      Reader b(r.child("band"), "config.band");
      b.get("kind", c.band_kind);
      b.get("N", c.band_N);
      b.get("r0", c.band_r0);
      b.get("r1", c.band_r1);
      b.get("width", c.band_width);
      int filter = -1;
      b.get("filter", filter);
      if (filter >= 0) c.band_filter = filter;
      b.finish();
      if (c.band_kind != "high" && c.band_kind != "zero_plus_high")
        throw Error("config.band.kind must be 'high' or 'zero_plus_high'");
    }
    if (r.has("flow")) {
      Reader f(r.child("flow"), "config.flow");
      f.get("modes", c.flow_modes);
      f.get("time", c.flow_time);
      f.get("steps", c.flow_steps);
      f.get("r0", c.flow_r0);
      f.get("r1", c.flow_r1);
      f.finish();
    }
    if (r.has("tolerances")) {
      Reader t(r.child("tolerances"), "config.tolerances");
      t.get("det", c.det_tolerance);
      t.get("residual", c.residual_tolerance);
      t.get("curl", c.curl_tolerance);
      t.get("flow_det", c.flow_det_tolerance);
      t.finish();
    }
    r.get("N", c.N);
    int tmp = -1;
    if (r.has("l")) { r.get("l", tmp); c.l = tmp; }
    if (r.has("n_star")) { r.get("n_star", tmp); c.n_star = tmp; }
    if (r.has("certified")) { r.get("certified", tmp); c.certified = tmp; }
    r.get("part", c.part);
    r.get("enforce_hypotheses", c.enforce_hypotheses);
    r.get("amplitude", c.amplitude);
    r.get("variation", c.variation_kind);
    r.get("seed", c.seed);
    r.get("trials", c.trials);
    r.finish();
    c.validate();
    return c;
  }

  void validate() const {
    require(n_r >= 8 && n_theta >= 8 && n_theta % 2 == 0, "config.grid: need n_r, n_theta >= 8, n_theta even");
    require(setting == "incompressible" || setting == "compressible",
            "config.setting must be 'incompressible' or 'compressible'");
    require_exponent(p);
    require(part == "i" || part == "ii", "config.part must be 'i' or 'ii'");
    require(variation_kind == "band" || variation_kind == "flow",
            "config.variation must be 'band' or 'flow'");
    require(trials >= 0, "trials must be non-negative");
    require(det_tolerance > 0 && residual_tolerance > 0 && curl_tolerance > 0 &&
                flow_det_tolerance > 0,
            "tolerances must be positive");
  }

  /// Fully resolved configuration; parse(to_json()) reproduces it.
  Json to_json() const {
    Json j;
    j["grid"] = {{"n_r", n_r}, {"n_theta", n_theta}};
    j["setting"] = setting;
    j["p"] = p;
    j["nu"] = nu.to_json();
    j["u"] = u.to_json();
    if (lambda) j["lambda"] = lambda->to_json();
    j["psi"] = psi.to_json();
    if (sigma) j["sigma"] = sigma->to_json();
    if (field_map) j["field"] = {{"map", field_map->to_json()}};
    if (field_scalar) j["field"] = {{"scalar", field_scalar->to_json()}};
    j["band"] = {{"kind", band_kind}, {"N", band_N}, {"r0", band_r0}, {"r1", band_r1},
                 {"width", band_width}};
    if (band_filter) j["band"]["filter"] = *band_filter;
    j["flow"] = {{"modes", flow_modes}, {"time", flow_time}, {"steps", flow_steps},
                 {"r0", flow_r0}, {"r1", flow_r1}};
    j["tolerances"] = {{"det", det_tolerance}, {"residual", residual_tolerance},
                       {"curl", curl_tolerance},
                       {"flow_det", flow_det_tolerance}};
    j["N"] = N;
    if (l) j["l"] = *l;
    if (n_star) j["n_star"] = *n_star;
    if (certified) j["certified"] = *certified;
    j["part"] = part;
    j["enforce_hypotheses"] = enforce_hypotheses;
    j["amplitude"] = amplitude;
    j["variation"] = variation_kind;
    j["seed"] = seed;
    j["trials"] = trials;
    return j;
  }

  PolarGrid grid() const { return PolarGrid(n_r, n_theta); }
};

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
  return RunConfig::parse(j);
}

// ---------------------------------------------------------------------------
// Building fields from specs

/// Closed-form expression for a profile; empty for sampled kinds (random, file).
inline std::optional<ScalarExpr> profile_expr(const ProfileSpec& s, const RunConfig& cfg,
                                              const char* what) {
  if (s.kind == "constant") return constant_profile(s.value);
  if (s.kind == "radial") return radial_profile(s.a, s.b);
  if (s.kind == "angular") return angular_profile(s.l, s.scale);
  if (s.kind == "dipole") {
    const double c = s.c;
    return ScalarExpr([c](double R, double t) { return c * R * R * std::cos(t); });
  }
  if (s.kind == "ncover_pressure") {
    require(cfg.nu.kind == "constant", std::string(what) + ": ncover_pressure needs a constant nu");
    return ncover_pressure(s.N, cfg.nu.value, cfg.p);
  }
  return std::nullopt;
}

inline ScalarField build_profile(const PolarGrid& g, const ProfileSpec& s, const RunConfig& cfg,
                                 const char* what) {
  if (auto e = profile_expr(s, cfg, what)) return sample(g, *e);
  if (s.kind == "random") {
    std::mt19937_64 rng(cfg.seed);
    return random_pressure(g, rng);
  }
  const ScalarField f = read_scalar_field(s.path);
  require(f.grid == g, std::string(what) + ": field file grid differs from the configured grid");
  return f;
}

inline ReferenceMap build_reference_map(const MapSpec& s) {
  if (s.kind == "identity") return identity_map();
  if (s.kind == "ncover") return ncover_map(s.N);
  if (s.kind == "affine") {
    const auto& m = s.matrix;
    return affine_map({m[0], m[1], m[2], m[3]});
  }
  throw Error("a closed-form map is required here; file maps are not supported");
}

inline VectorField build_map_field(const PolarGrid& g, const MapSpec& s) {
  if (s.kind == "file") {
    const VectorField f = read_vector_field(s.path);
    require(f.grid == g, "u: field file grid differs from the configured grid");
    return f;
  }
  return build_reference_map(s).sample(g);
}

inline PolyconvexSpec build_polyconvex(const PolarGrid& g, const RunConfig& cfg) {
  auto closed_form = [&](const ProfileSpec& s, const char* what) {
    auto e = profile_expr(s, cfg, what);
    require(e.has_value(), std::string(what) + ": the compressible setting needs a closed-form profile");
    return *e;
  };
  const ScalarExpr nu = closed_form(cfg.nu, "nu");
  if (cfg.psi.model == "zero") return spec_psi_zero(g, cfg.p, nu);
  if (cfg.psi.model == "det_penalty")
    return spec_det_penalty(g, cfg.p, nu, closed_form(cfg.psi.gamma, "psi.gamma"));
  return spec_linear_det(g, cfg.p, nu, closed_form(cfg.psi.rho, "psi.rho"));
}

inline StationaryCandidate build_candidate(const RunConfig& cfg) {
  const PolarGrid g = cfg.grid();
  const VectorField u = build_map_field(g, cfg.u);
  if (cfg.setting == "incompressible") {
    PDirichletSpec spec{cfg.p, build_profile(g, cfg.nu, cfg, "nu")};
    if (!cfg.lambda) throw Error("incompressible setting: pressure 'lambda' missing from config");
    StationaryCandidate c{u, spec, build_profile(g, *cfg.lambda, cfg, "lambda")};
    c.det_tolerance = cfg.det_tolerance;
    return c;
  }
  if (cfg.lambda) throw Error("compressible setting: 'lambda' must not be given");
  StationaryCandidate c{u, build_polyconvex(g, cfg), std::nullopt};
  c.det_tolerance = cfg.det_tolerance;
  return c;
}

// ---------------------------------------------------------------------------
// Commands

struct CommandResult {
  Json payload;
  int exit_code = kExitOk;
  std::string json_lines;  ///< verify only
  std::vector<std::pair<std::string, std::string>> extra_files;  ///< (file name, contents)
};

inline Json envelope(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"config", cfg.to_json()}};
}

inline CommandResult cmd_decompose(const RunConfig& cfg) {
  const PolarGrid g = cfg.grid();
  Json out = envelope("decompose", cfg);
  ModeSpectrum s;
  if (cfg.field_scalar) {
    s = decompose(build_profile(g, *cfg.field_scalar, cfg, "field"));
  } else {
    s = decompose(build_map_field(g, cfg.field_map ? *cfg.field_map : cfg.u));
  }
  out["components"] = s.components.size();
  out["j_max"] = s.j_max;
  out["modes"] = mode_mass_table(s);
  return {out};
}

inline CommandResult cmd_certify(const RunConfig& cfg) {
  const StationaryCandidate c = build_candidate(cfg);
  const CertificateReport r = certify(c);
  Json out = envelope("certify", cfg);
  out["report"] = to_json(r);
  return {out, r.applicable ? kExitOk : kExitNegative};
}

inline CommandResult cmd_residual(const RunConfig& cfg) {
  const StationaryCandidate c = build_candidate(cfg);
  const ResidualReport r =
      c.incompressible() ? ele_residual_incompressible(c) : ele_residual_compressible(c);
  Json out = envelope("residual", cfg);
  out["setting"] = cfg.setting;
  out["tolerance"] = cfg.residual_tolerance;
  out["within_tolerance"] = r.max_normalized <= cfg.residual_tolerance;
  out["report"] = to_json(r);
  return {out};
}

inline CommandResult cmd_energy(const RunConfig& cfg) {
  const StationaryCandidate c = build_candidate(cfg);
  const MatrixField grad_u = gradient(c.u);
  const ScalarField d = det(grad_u);
  double dmin = d.values.front(), dmax = dmin;
  for (double v : d.values) {
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  Json out = envelope("energy", cfg);
  out["setting"] = cfg.setting;
  out["energy"] = c.incompressible() ? eval_E(grad_u, std::get<PDirichletSpec>(c.spec))
                                     : eval_I(grad_u, std::get<PolyconvexSpec>(c.spec));
  out["det_min"] = dmin;
  out["det_max"] = dmax;
  return {out};
}

inline CommandResult cmd_pressure(const RunConfig& cfg) {
  require(cfg.setting == "incompressible", "pressure: only defined in the incompressible setting");
  const PolarGrid g = cfg.grid();
  const VectorField u = build_map_field(g, cfg.u);
  const PDirichletSpec spec{cfg.p, build_profile(g, cfg.nu, cfg, "nu")};
  const PressureRecovery rec = recover_pressure_gradient(u, spec, cfg.det_tolerance);
  const int base_i = g.n_r() / 2;
  const ScalarField a = integrate_pressure(rec.grad_lambda, base_i, 0,
                                           PathFamily::radial_then_angular, cfg.curl_tolerance);
  const ScalarField b = integrate_pressure(rec.grad_lambda, base_i, 0,
                                           PathFamily::angular_then_radial, cfg.curl_tolerance);
  Json out = envelope("pressure", cfg);
  out["max_curl"] = rec.max_curl;
  out["path_family_gap"] = max_abs(a - b);
  out["base_node"] = {{"i", base_i}, {"k", 0}};
  std::ostringstream field;
  write_field(field, a, "lambda");
  out["field_file"] = "pressure_lambda.pfield";
  return {out, kExitOk, "", {{"pressure_lambda.pfield", field.str()}}};
}

inline CommandResult cmd_variation(const RunConfig& cfg) {
  const PolarGrid g = cfg.grid();
  Json out = envelope("variation", cfg);
  std::ostringstream eta_file;
  if (cfg.variation_kind == "band") {
    const ScalarField sigma =
        cfg.sigma ? build_profile(g, *cfg.sigma, cfg, "sigma") : sample(g, constant_profile(1.0));
    const BandSpec band{cfg.band_kind == "high" ? BandSpec::Kind::high : BandSpec::Kind::zero_plus_high,
                        cfg.band_N, cfg.band_r0, cfg.band_r1, cfg.band_width};
    const VectorField eta = make_band_variation(sigma, band, cfg.seed);
    out["kind"] = "band";
    out["leak_below_N"] = band_content(sigma * eta, cfg.band_N).aggregate;
    write_field(eta_file, eta, "eta");
  } else {
    const ReferenceMap u = build_reference_map(cfg.u);
    const FlowSpec flow = FlowSpec::random(cfg.seed, cfg.flow_r0, cfg.flow_r1, cfg.flow_modes,
                                           cfg.flow_time, cfg.flow_steps);
    const MeasurePreservingVariation mv = make_measure_preserving_variation(u, g, flow, cfg.flow_det_tolerance);
    out["kind"] = "flow";
    out["max_det_error"] = mv.max_det_error;
    out["max_outside_support"] = mv.max_outside;
    write_field(eta_file, mv.eta, "eta");
  }
  out["field_file"] = "variation_eta.pfield";
  return {out, kExitOk, "", {{"variation_eta.pfield", eta_file.str()}}};
}

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s{"poincare", "fourier", "det-identity", "h-bound",
                                          "gap-inc",  "gap-comp", "growth",      "subdiff"};
  return s;
}

inline LabReport run_suite(const RunConfig& cfg, const std::string& suite) {
  const PolarGrid g = cfg.grid();
  BandSpec band{BandSpec::Kind::high, cfg.band_N, cfg.band_r0, cfg.band_r1, cfg.band_width};
  auto sigma_field = [&] {
    return cfg.sigma ? build_profile(g, *cfg.sigma, cfg, "sigma") : sample(g, constant_profile(1.0));
  };
  auto l_of = [&](const ScalarField& sigma) {
    if (cfg.l) return *cfg.l;
    const IntegerBound b = estimate_l(sigma);
    require(b.bounded(), "sigma: l is unbounded");
    return *b.value;
  };
  if (suite == "poincare") return verify_poincare(g, cfg.N, cfg.trials, cfg.seed);
  if (suite == "fourier") {
    const ScalarField sigma = sigma_field();
    const int l = l_of(sigma);
    require(cfg.n_star.has_value(), "fourier: n_star missing from config");
    return verify_weighted_fourier(sigma, l, *cfg.n_star, cfg.trials, cfg.seed, band);
  }
  if (suite == "det-identity") {
    if (cfg.lambda && cfg.lambda->kind != "random")
      return verify_det_identity(build_profile(g, *cfg.lambda, cfg, "lambda"), cfg.trials, cfg.seed);
    return verify_det_identity(g, cfg.trials, cfg.seed);
  }
  if (suite == "h-bound") {
    const ScalarField sigma = sigma_field();
    require(cfg.lambda.has_value(), "h-bound: lambda missing from config");
    const ScalarField lambda = build_profile(g, *cfg.lambda, cfg, "lambda");
    const int l = l_of(sigma);
    const HPart part = cfg.part == "i" ? HPart::part_i : HPart::part_ii;
    int certified = 0;
    if (cfg.certified) {
      certified = *cfg.certified;
    } else {
      const IntegerBound b =
          part == HPart::part_i
              ? estimate_n(scalar_gradient(lambda).polar_scaled, multiply(sigma, sigma))
              : estimate_m(scalar_gradient(lambda).polar_scaled, multiply(sigma, sigma));
      require(b.bounded(), "h-bound: pressure bound is unbounded");
      certified = *b.value;
    }
    return verify_H_lower_bound(sigma, lambda, cfg.p, part, certified, l, cfg.trials, cfg.seed, band,
                                cfg.enforce_hypotheses);
  }
  GapOptions opt;
  opt.r0 = cfg.flow_r0;
  opt.r1 = cfg.flow_r1;
  opt.flow_modes = cfg.flow_modes;
  opt.flow_time = cfg.flow_time;
  opt.flow_steps = cfg.flow_steps;
  opt.det_tolerance = cfg.flow_det_tolerance;
  opt.residual_tolerance = cfg.residual_tolerance;
  opt.band_filter = cfg.band_filter;
  if (suite == "gap-inc") {
    require(cfg.setting == "incompressible", "gap-inc: needs the incompressible setting");
    const StationaryCandidate c = build_candidate(cfg);
    opt.certificate_applies = certify(c).full_class;
    return energy_gap_incompressible(build_reference_map(cfg.u), std::get<PDirichletSpec>(c.spec),
                                     *c.lambda, cfg.trials, cfg.seed, opt);
  }
  if (suite == "gap-comp") {
    require(cfg.setting == "compressible", "gap-comp: needs the compressible setting");
    const StationaryCandidate c = build_candidate(cfg);
    opt.r0 = cfg.band_r0;
    opt.r1 = cfg.band_r1;
    opt.certificate_applies = certify(c).full_class;
    return energy_gap_compressible(c.u, std::get<PolyconvexSpec>(c.spec), cfg.trials, cfg.seed,
                                   cfg.amplitude, opt);
  }
  if (suite == "growth") {
    const PolyconvexSpec spec = build_polyconvex(g, cfg);
    const GrowthReport gr = check_growth(spec, std::max(1L, cfg.trials), cfg.seed);
    LabReport r{"growth", cfg.seed};
    for (const auto& w : gr.witnesses)
      r.trials.push_back({cfg.seed, {{"R", w.R}, {"theta", w.theta}, {"phi", w.phi}, {"bound", w.bound}}, false});
    r.summary = {{"samples", double(gr.samples)},
                 {"lower_violations", double(gr.lower_violations)},
                 {"upper_violations", double(gr.upper_violations)}};
    if (spec.local_use_only) r.notes.push_back("Psi model is flagged local-use-only");
    r.checks_ok = gr.ok();
    return r;
  }
  if (suite == "subdiff") {
    const SubdifferentialReport sr = check_subdifferential(cfg.p, std::max(1L, cfg.trials), cfg.seed);
    LabReport r{"subdiff", cfg.seed};
    r.summary = {{"p", cfg.p},
                 {"trials", double(sr.trials)},
                 {"violations", double(sr.violations)},
                 {"min_slack", sr.min_slack},
                 {"equality_slack", sr.equality_slack}};
    r.checks_ok = sr.violations == 0 && sr.equality_slack == 0.0;
    return r;
  }
  throw Error("unknown verification suite '" + suite + "'");
}

inline CommandResult cmd_verify(const RunConfig& cfg, const std::string& suite) {
  const LabReport r = run_suite(cfg, suite);
  Json out = envelope("verify", cfg);
  out["suite"] = suite;
  out["result"] = summary_json(r);
  return {out, r.pass() ? kExitOk : kExitNegative, to_json_lines(r)};
}

// ---------------------------------------------------------------------------
// Output

/// Writes through a temporary file in the same directory and renames on
/// success, so a failed run leaves no partial file behind.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

/// Stem of the output files for a command ("verify_poincare", "certify", ...).
inline std::string output_stem(const std::string& command, const std::string& suite) {
  if (command != "verify") return command;
  std::string s = suite;
  std::replace(s.begin(), s.end(), '-', '_');
  return "verify_" + s;
}

inline void write_result(const std::filesystem::path& dir, const std::string& stem,
                         const CommandResult& r) {
  // Compute everything first; files appear only once all payloads exist.
  const std::string main = r.payload.dump(2) + "\n";
  if (!r.json_lines.empty() || stem.rfind("verify_", 0) == 0)
    write_atomic(dir / (stem + ".jsonl"), r.json_lines);
  for (const auto& [name, contents] : r.extra_files) write_atomic(dir / name, contents);
  write_atomic(dir / (stem + ".json"), main);
}

}  // namespace diskcert::cli
