// Acceptance suite. Runs every criterion at full size and prints one line per
// criterion. With an argument (1..11) only that criterion runs; the exit code
// is 0 iff every criterion that ran passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace diskcert;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr double kPi = std::numbers::pi;
const PolarGrid kGrid(256, 256);

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

PDirichletSpec unit_spec(double p = 2.0) { return {p, sample(kGrid, constant_profile(1.0))}; }

VectorField smooth_map(const PolarGrid& g) {
  return sample_vector(g, [](double R, double t) {
    const double x = R * std::cos(t), y = R * std::sin(t);
    return std::array<double, 2>{x + 0.3 * y * y + 0.1 * x * y, y + 0.2 * x * x * x - 0.4 * x * y};
  });
}

// 1. Poincare estimate
Outcome criterion_1() {
  Outcome o;
  for (int N : {1, 3, 7}) {
    const LabReport r = verify_poincare(kGrid, N, 100, kSeed);
    o.check(r.failures() == 0, "N=" + std::to_string(N) + " failures " + std::to_string(r.failures()) + "/100, min " +
                                   fmt("%.6f", r.summary_value("min_ratio")));
    o.check(std::abs(r.summary_value("saturation_ratio") - N * N) <= 1e-8,
            "saturation " + fmt("%.12f", r.summary_value("saturation_ratio")));
  }
  return o;
}

// 2. Weighted Fourier estimate
Outcome criterion_2() {
  Outcome o;
  const ScalarField sigma = sample(kGrid, angular_profile(2));
  const IntegerBound l = estimate_l(sigma);
  o.check(l.bounded() && *l.value == 2, "l = " + std::to_string(l.value.value_or(-1)));
  const LabReport r = verify_weighted_fourier(sigma, 2, 6, 1000, kSeed);
  const long literal = static_cast<long>(r.summary_value("literal_failures"));
  const long corrected = static_cast<long>(r.summary_value("corrected_failures"));
  const long chain = static_cast<long>(r.summary_value("chain_failures"));
  o.check(literal == 0, "stated form (dx on the right) failures " + std::to_string(literal) + "/1000, worst slack " +
                            fmt("%.3e", r.summary_value("worst_literal_slack")));
  o.check(chain == 0, "Minkowski chain failures " + std::to_string(chain) + "/1000");
  o.detail += "; informational: dx/R^2 form failures " + std::to_string(corrected) + "/1000";
  return o;
}

// 3. Subdifferential inequality
Outcome criterion_3() {
  Outcome o;
  for (double p : {2.0, 2.5, 3.0, 4.0}) {
    const SubdifferentialReport r = check_subdifferential(p, 100000, kSeed);
    o.check(r.violations == 0 && r.equality_slack == 0.0,
            "p=" + fmt("%g", p) + " violations " + std::to_string(r.violations) + ", min slack " +
                fmt("%.2e", r.min_slack) + ", equality " + fmt("%g", r.equality_slack));
  }
  return o;
}

// 4. Cofactor/determinant algebra
Outcome criterion_4() {
  Outcome o;
  const Mat2 c = cof(Mat2{1, 2, 3, 4});
  o.check(c.a11 == 4 && c.a12 == -3 && c.a21 == -2 && c.a22 == 1, "cof [[1,2],[3,4]] = [[4,-3],[-2,1]]");
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const Mat2 a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(det(a + b) - (det(a) + dot(cof(a), b) + det(b))));
  }
  o.check(worst <= 1e-12, "expansion worst " + fmt("%.2e", worst) + " over 1e4 pairs");
  double piola = 0.0;
  const auto basis = make_test_basis(kGrid, TestBasisSpec{});
  for (const VectorField& map : {smooth_map(kGrid), ncover_map(3).sample(kGrid)}) {
    const MatrixField cg = cof(gradient(map));
    for (const TestFunction& tf : basis) piola = std::max(piola, std::abs(weak_divergence(cg, tf.eta)));
  }
  o.check(piola <= 1e-6, "weak Piola residual " + fmt("%.2e", piola));
  return o;
}

// 5. Energy evaluation
Outcome criterion_5() {
  Outcome o;
  const double e_id = eval_E(identity_map().sample(kGrid), unit_spec());
  const double e_2 = eval_E(ncover_map(2).sample(kGrid), unit_spec());
  o.check(std::abs(e_id - 2 * kPi) <= 1e-5, "E(id) - 2pi = " + fmt("%.2e", e_id - 2 * kPi));
  o.check(std::abs(e_2 - 2.5 * kPi) <= 1e-4, "E(u_2) - 2.5pi = " + fmt("%.2e", e_2 - 2.5 * kPi));
  for (int N : {2, 3}) {
    double worst = 0.0;
    for (double d : det(gradient(ncover_map(N).sample(kGrid))).values) worst = std::max(worst, std::abs(d - 1.0));
    o.check(worst <= 1e-8, "max |det grad u_" + std::to_string(N) + " - 1| = " + fmt("%.2e", worst));
  }
  return o;
}

// 6. ELE machinery
Outcome criterion_6() {
  Outcome o;
  const StationaryCandidate id{identity_map().sample(kGrid), unit_spec(), sample(kGrid, constant_profile(0.0))};
  const double r_id = ele_residual_incompressible(id).max_normalized;
  o.check(r_id <= 1e-8, "identity residual " + fmt("%.2e", r_id));

  const VectorField u2 = ncover_map(2).sample(kGrid);
  const PressureRecovery rec = recover_pressure_gradient(u2, unit_spec());
  o.check(rec.max_curl <= 1e-4, "u_2 curl " + fmt("%.2e", rec.max_curl));
  const ScalarField lambda = integrate_pressure(rec.grad_lambda, kGrid.n_r() / 2, 0);
  const double r_loop = ele_residual_incompressible({u2, unit_spec(), lambda}).max_normalized;
  o.check(r_loop <= 1e-5, "u_2 loop residual " + fmt("%.2e", r_loop));

  const StationaryCandidate aff{affine_map({1.2, 0.3, 0.1, 0.9}).sample(kGrid),
                                spec_det_penalty(kGrid, 2.0, constant_profile(1.0), constant_profile(1.0)),
                                std::nullopt};
  const double r_aff = ele_residual_compressible(aff).max_normalized;
  o.check(r_aff <= 1e-8, "affine compressible residual " + fmt("%.2e", r_aff));
  return o;
}

// 7. Certificate arithmetic
Outcome criterion_7() {
  Outcome o;
  const IntegerBound l = estimate_l(sample(kGrid, angular_profile(2)));
  o.check(l.bounded() && *l.value == 2, "estimate_l(exp(cos 2t)) = " + std::to_string(l.value.value_or(-1)));

  VectorField ratio_one(kGrid);
  for (double& v : ratio_one.c1) v = 1.0;
  const ScalarField one = sample(kGrid, constant_profile(1.0));
  const IntegerBound n = estimate_n(ratio_one, one), m = estimate_m(ratio_one, one);
  o.check(n.value == 2, "ratio-1 n = " + std::to_string(n.value.value_or(-1)));
  o.check(m.value == 2, "ratio-1 m = " + std::to_string(m.value.value_or(-1)));

  auto minimal = [](const IntegerBound& b, const ScalarField& lhs, const ScalarField& unit, double f) {
    return b.bounded() && bound_holds(lhs, unit, f, *b.value) &&
           (*b.value == 0 || !bound_holds(lhs, unit, f, *b.value - 1));
  };
  int cases = 0, good = 0;
  auto audit = [&](const CertificateReport& r, const VectorField& polar_scaled) {
    ++cases;
    const ScalarField s2 = multiply(r.sigma, r.sigma);
    ScalarField sth = dtheta(r.sigma);
    for (double& v : sth.values) v = std::abs(v);
    const bool ok = r.applicable && *r.n_star == *r.n + *r.l && *r.m_star == *r.m + *r.l &&
                    minimal(r.l_bound, sth, r.sigma, 1.0) &&
                    minimal(r.n_bound, pressure_lhs(polar_scaled), s2, kFactorN) &&
                    minimal(r.m_bound, pressure_lhs(polar_scaled), s2, kFactorM);
    good += ok;
  };
  for (const ReferenceMap& map : reference_maps()) {
    const ScalarField lambda = sample(kGrid, *map.pressure());
    audit(certify_incompressible(map.sample(kGrid), unit_spec(), lambda), scalar_gradient(lambda).polar_scaled);
  }
  for (double p : {2.0, 3.0}) {
    const ScalarField lambda = sample(kGrid, ncover_pressure(2, 1.0, p));
    audit(certify_incompressible(ncover_map(2).sample(kGrid), unit_spec(p), lambda),
          scalar_gradient(lambda).polar_scaled);
  }
  for (double c : {0.05, 0.3, 2.0}) {
    const ScalarField lambda = sample(kGrid, [c](double R, double t) { return c * R * R * std::cos(t); });
    const PDirichletSpec spec{2.0, sample(kGrid, [](double, double t) { return std::exp(2 * std::cos(2 * t)); })};
    audit(certify_incompressible(identity_map().sample(kGrid), spec, lambda), scalar_gradient(lambda).polar_scaled);
  }
  {
    const VectorField u = ncover_map(2).sample(kGrid);
    const PolyconvexSpec spec = spec_linear_det(kGrid, 2.0, constant_profile(1.0), radial_profile(0.1, 0.5));
    const CertificateReport r = certify_compressible(u, spec);
    audit(r, scalar_gradient(det_derivative_field(spec, gradient(u))).polar_scaled);
  }
  o.check(good == cases, "n* = n + l and minimality on " + std::to_string(good) + "/" + std::to_string(cases) +
                             " gallery cases");
  const CertificateReport zero =
      certify_incompressible(identity_map().sample(kGrid), unit_spec(), sample(kGrid, constant_profile(0.0)));
  o.check(zero.full_class, std::string("lambda = 0 full_class ") + (zero.full_class ? "true" : "false"));
  return o;
}

// 8. Null-Lagrangian identity
Outcome criterion_8() {
  Outcome o;
  const LabReport r = verify_det_identity(kGrid, 100, kSeed);
  double worst = 0.0;
  for (const auto& t : r.trials)
    worst = std::max(worst, std::abs(t.value("lhs") - t.value("rhs")) /
                                std::max({std::abs(t.value("lhs")), std::abs(t.value("rhs")), 1e-300}));
  o.check(r.pass(), "random pairs failures " + std::to_string(r.failures()) + "/100, worst relative " +
                        fmt("%.2e", worst));
  const LabReport c = verify_det_identity(sample(kGrid, constant_profile(1.7)), 100, kSeed);
  double sides = 0.0;
  for (const auto& t : c.trials) sides = std::max({sides, std::abs(t.value("lhs")), std::abs(t.value("rhs"))});
  o.check(sides <= 1e-8, "constant lambda max side " + fmt("%.2e", sides));
  return o;
}

// 9. Lower bound on the mixed term
Outcome criterion_9() {
  Outcome o;
  const ScalarField nu = sample(kGrid, [](double, double t) { return std::exp(2 * std::cos(2 * t)); });
  const ScalarField lambda = sample(kGrid, [](double R, double t) { return 0.3 * R * R * std::cos(t); });
  const CertificateReport cert = certify_incompressible(identity_map().sample(kGrid), {2.0, nu}, lambda);
  o.check(cert.applicable, "certificate l=" + std::to_string(cert.l.value_or(-1)) + " n=" +
                               std::to_string(cert.n.value_or(-1)) + " m=" + std::to_string(cert.m.value_or(-1)));
  if (!cert.applicable) return o;
  for (HPart part : {HPart::part_i, HPart::part_ii}) {
    const int k = part == HPart::part_i ? *cert.n : *cert.m;
    const LabReport r = verify_H_lower_bound(cert.sigma, lambda, 2.0, part, k, *cert.l, 1000, kSeed);
    o.check(r.pass(), std::string(to_string(part)) + " failures " + std::to_string(r.failures()) +
                          "/1000, worst slack " + fmt("%.3e", r.summary_value("worst_slack")));
  }
  const ScalarField sigma = sample(kGrid, constant_profile(1.0));
  const ScalarField steep = sample(kGrid, [](double R, double t) { return 200.0 * R * R * std::cos(t); });
  const LabReport neg = verify_H_lower_bound(sigma, steep, 2.0, HPart::part_i, 1, 0, 100, kSeed, {}, false);
  o.check(neg.failures() > 0, "violated premise failures " + std::to_string(neg.failures()) + "/100");
  return o;
}

// 10. Energy gaps
Outcome criterion_10() {
  Outcome o;
  const ScalarField zero = sample(kGrid, constant_profile(0.0));
  GapOptions opt;
  opt.certificate_applies = certify_incompressible(identity_map().sample(kGrid), unit_spec(), zero).full_class;
  const LabReport r = energy_gap_incompressible(identity_map(), unit_spec(), zero, 100, kSeed, opt);
  long below_zero = 0, below_chain = 0, spread = 0;
  for (const auto& t : r.trials) {
    below_zero += t.value("gap") < -1e-6;
    below_chain += t.value("gap") < t.value("chain") - 1e-5;
    const double scale = std::max({std::abs(t.value("H_stress")), std::abs(t.value("H_cofactor")),
                                   std::abs(t.value("H_det")), t.value("quadratic")});
    spread += t.value("H_spread") > 1e-5 * scale;
  }
  o.check(r.pass() && below_zero == 0 && below_chain == 0 && spread == 0,
          "incompressible: gap<0 " + std::to_string(below_zero) + ", below chain " + std::to_string(below_chain) +
              ", H disagreement " + std::to_string(spread) + " of 100, min gap " +
              fmt("%.3e", r.summary_value("min_gap")) + ", max det error " +
              fmt("%.1e", r.summary_value("max_det_error")));
  const VectorField u = affine_map({1.2, 0.3, 0.1, 0.9}).sample(kGrid);
  const LabReport c = energy_gap_compressible(
      u, spec_det_penalty(kGrid, 2.0, constant_profile(1.0), constant_profile(1.0)), 100, kSeed);
  o.check(c.pass(), "compressible failures " + std::to_string(c.failures()) + "/100, min slack " +
                        fmt("%.3e", c.summary_value("min_slack")));
  return o;
}

// 11. Determinism
Outcome criterion_11() {
  Outcome o;
  cli::RunConfig cfg = cli::RunConfig::parse(Json::parse(R"({
      "lambda": {"kind": "dipole", "c": 0.3},
      "sigma": {"kind": "angular", "l": 2},
      "n_star": 6, "trials": 20, "seed": 1})"));
  const std::string a = cli::cmd_certify(cfg).payload.dump(), b = cli::cmd_certify(cfg).payload.dump();
  o.check(a == b, "cmd_certify payloads identical (" + std::to_string(a.size()) + " bytes)");
  for (const char* suite : {"poincare", "fourier", "det-identity", "h-bound", "subdiff"}) {
    const cli::CommandResult x = cli::cmd_verify(cfg, suite), y = cli::cmd_verify(cfg, suite);
    o.check(x.payload.dump() == y.payload.dump() && x.json_lines == y.json_lines,
            std::string("cmd_verify ") + suite + " identical");
  }
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"Poincare estimate", criterion_1},
    {"Weighted Fourier estimate", criterion_2},
    {"Subdifferential inequality", criterion_3},
    {"Cofactor/determinant algebra", criterion_4},
    {"Energy evaluation", criterion_5},
    {"ELE machinery", criterion_6},
    {"Certificate arithmetic", criterion_7},
    {"Null-Lagrangian identity", criterion_8},
    {"Mixed-term lower bound", criterion_9},
    {"Energy gaps", criterion_10},
    {"Determinism", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], kCriteria.size());
      return 1;
    }
  }
  bool all = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = kCriteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %-30s %s (%.1f s): %s\n", i + 1, kCriteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
