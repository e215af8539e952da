// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "steklov/cli.hpp"
#include "steklov/critical.hpp"
#include "steklov/identity.hpp"
#include "steklov/mesh.hpp"
#include "steklov/oracle.hpp"
#include "steklov/spectrum.hpp"

using namespace steklov;

namespace {

// Collects failure reasons for one criterion.
struct Criterion {
  std::vector<std::string> failures;
  std::vector<std::string> facts;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& fact) { facts.push_back(fact); }
};

std::string fmt(const char* format, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

bool exact_pass(const Check& c, int lhs, int rhs) {
  return c.verdict == Verdict::pass && c.lhs == lhs && c.rhs == rhs;
}

std::string describe(const Check& c) {
  return fmt("%s %d = %d (%s)", c.name.c_str(), c.lhs, c.rhs, to_string(c.verdict));
}

struct Geometry {
  std::string name;
  SurfaceMesh mesh;
};

// Acceptance resolutions: disk ~5k, annulus ~10k, cylinders at 128 angular samples.
std::vector<Geometry> acceptance_meshes() {
  std::vector<Geometry> g;
  g.push_back({"disk", generate_disk(1.0, 40)});
  g.push_back({"annulus(0.5,1)", generate_annulus(0.5, 1.0, 300)});
  g.push_back({"cylinder(0.5)", generate_cylinder(0.5, 128)});
  g.push_back({"cylinder(2)", generate_cylinder(2.0, 128)});
  g.push_back({"cylinder(T*)", generate_cylinder(oracle::tstar().value, 128)});
  return g;
}

void poincare_hopf(Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  const std::pair<SurfaceMesh, int> cases[] = {{double_mesh(generate_disk(1.0, 10)), 2},
                                               {double_mesh(generate_annulus(0.5, 1.0, 32)), 0},
                                               {double_mesh(generate_cylinder(0.5, 32)), 0}};
  int mismatches = 0, runs = 0;
  for (const auto& [mesh, chi] : cases) {
    c.require(euler_characteristic(mesh) == chi, "double has the wrong Euler characteristic");
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(-1.0, 1.0);
      Field u(mesh.num_dofs());
      for (auto& v : u) v = uni(rng);
      if (seed % 10 == 0) u = u.array().round();  // heavy ties
      mismatches += pl_index_sum(mesh, u) != chi;
      ++runs;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(mismatches == 0, fmt("%d of %d index sums differ from chi", mismatches, runs));
  c.require(seconds < 5.0, fmt("took %.2f s", seconds));
  c.note(fmt("%d fields, %.2f s", runs, seconds));
}

void disk(Criterion& c, const SurfaceMesh& mesh) {
  const auto pairs = steklov_spectrum(mesh, 5);
  const double expected[] = {0, 1, 1, 2, 2};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(pairs[i].sigma - expected[i]));
  c.require(worst <= 2e-2, fmt("eigenvalue error %.3g", worst));
  c.note(fmt("%d vertices, max error %.2e", mesh.num_dofs(), worst));

  cli::RunConfig config;
  config.geometry = "disk";
  config.ladder = {10, 20, 40};
  config.k = 5;
  const auto study = cli::run_convergence(config);
  double slowest = INFINITY;
  for (double r : study.rates) {
    if (!std::isnan(r)) slowest = std::min(slowest, r);
  }
  c.require(slowest >= 1.8, fmt("convergence rate %.3f", slowest));
  c.note(fmt("slowest rate %.3f", slowest));

  const auto report = verify_eigenpair(mesh, pairs[1]);
  c.require(report.analysis.interior.empty(), fmt("%zu interior critical vertices", report.analysis.interior.size()));
  for (const char* name : {"E2_1", "E2_2", "E2_4", "E_c", "COROLLARY"}) {
    const auto& check = report.check(name);
    c.require(check.verdict == Verdict::pass && check.lhs == check.rhs, describe(check));
  }
}

void annulus(Criterion& c, const SurfaceMesh& mesh) {
  const auto model = oracle::annulus_modes(0.5, 1.0, 2);
  const auto& mode = model.modes[1];
  const auto pairs = steklov_spectrum(mesh, 2);
  const double error = std::abs(pairs[1].sigma - mode.sigma);
  c.require(mode.m == 1, "oracle second mode is not m = 1");
  c.require(error <= 2e-2, fmt("sigma2 error %.3g", error));
  c.note(fmt("%d vertices, sigma2 %.6f vs %.6f", mesh.num_dofs(), pairs[1].sigma, mode.sigma));

  const auto report = verify_eigenpair(mesh, pairs[1]);
  const auto& interior = report.analysis.interior;
  c.require(interior.size() == 2, fmt("%zu interior critical vertices", interior.size()));
  for (const auto& p : interior) c.require(p.index == -1, fmt("critical vertex with index %d", p.index));
  c.require(exact_pass(report.check("E_c"), 2, 2) && report.analysis.negative.sum_ell == 2 &&
                report.analysis.chi_M == 0,
            describe(report.check("E_c")));

  // phase of the cos(theta - phi) trace, fitted on the outer circle
  double cs = 0.0, sn = 0.0;
  for (const auto& loop : mesh.boundary()) {
    for (int d : loop.dofs) {
      const Vec2& p = mesh.position(d);
      if (p.norm() < 0.75) continue;
      const double theta = std::atan2(p.y(), p.x());
      cs += pairs[1].u[d] * std::cos(theta);
      sn += pairs[1].u[d] * std::sin(theta);
    }
  }
  const double phase = std::atan2(sn, cs);
  const auto saddles = oracle::annulus_mode_saddles(mode, phase);
  const double h = mesh.max_edge_length();
  double worst = 0.0;
  for (const auto& p : interior) {
    double nearest = INFINITY;
    for (const auto& s : saddles) nearest = std::min(nearest, (p.location - s.location).norm());
    worst = std::max(worst, nearest);
  }
  c.require(saddles.size() == 2 && worst <= h, fmt("saddle offset %.3g exceeds edge length %.3g", worst, h));
  c.note(fmt("saddle offset %.4f, edge %.4f", worst, h));
}

void cylinders(Criterion& c, const SurfaceMesh& short_cyl, const SurfaceMesh& long_cyl) {
  {
    const auto pairs = steklov_spectrum(short_cyl, 3);
    const double error = std::abs(pairs[1].sigma - std::tanh(0.5));
    c.require(error <= 2e-2, fmt("T=0.5 sigma2 error %.3g", error));
    c.require(pairs[1].multiplicity == 2, fmt("T=0.5 multiplicity %d", pairs[1].multiplicity));
    const auto report = verify_eigenpair(short_cyl, pairs[1]);
    int saddles = 0;
    for (const auto& p : report.analysis.interior) saddles += p.classification == Classification::saddle;
    c.require(report.analysis.interior.size() == 2 && saddles == 2,
              fmt("T=0.5: %zu critical vertices, %d saddles", report.analysis.interior.size(), saddles));
    c.require(exact_pass(report.check("E_c"), 2, 2) && report.analysis.negative.sum_ell == 2,
              "T=0.5 " + describe(report.check("E_c")));
    c.note(fmt("T=0.5 sigma2 %.6f", pairs[1].sigma));
  }
  {
    const auto pairs = steklov_spectrum(long_cyl, 3);
    const double error = std::abs(pairs[1].sigma - 0.5);
    c.require(error <= 2e-2, fmt("T=2 sigma2 error %.3g", error));
    c.require(pairs[1].multiplicity == 1, fmt("T=2 multiplicity %d", pairs[1].multiplicity));
    for (const auto& loop : long_cyl.boundary()) {
      int positive = 0, negative = 0;
      for (int d : loop.dofs) {
        positive += pairs[1].u[d] > 0.0;
        negative += pairs[1].u[d] < 0.0;
      }
      c.require(positive == loop.size() || negative == loop.size(), "T=2 trace changes sign on a component");
    }
    const auto report = verify_eigenpair(long_cyl, pairs[1]);
    c.require(exact_pass(report.check("E_c"), 0, 0) && report.analysis.negative.sum_ell == 0,
              "T=2 " + describe(report.check("E_c")));
    c.note(fmt("T=2 sigma2 %.6f", pairs[1].sigma));
  }
}

void critical_family(Criterion& c) {
  const auto t = oracle::tstar();
  c.require(std::abs(t.value * std::tanh(t.value) - 1.0) < 1e-13, fmt("T* residual %.3g", t.residual));
  const double threshold = oracle::cylinder_family_threshold();
  c.require(std::abs(threshold - std::cosh(t.value) / t.value) < 1e-14, "threshold is not cosh(T*)/T*");

  struct Regime {
    double c;
    int interior;
    int singular;
    int lhs;
    int rhs;
  };
  const Regime regimes[] = {{0.0, 2, 0, 2, 2},          {0.5 * threshold, 2, 0, 2, 2}, {-0.5 * threshold, 2, 0, 2, 2},
                            {threshold, 0, 2, 0, 0},    {-threshold, 0, 2, 0, 0},      {1.5 * threshold, 0, 0, 0, 0},
                            {-3.0 * threshold, 0, 0, 0, 0}};
  for (const auto& r : regimes) {
    int interior = 0, singular = 0;
    for (const auto& p : oracle::cylinder_family_critical_points(r.c)) (p.on_boundary ? singular : interior)++;
    c.require(interior == r.interior && singular == r.singular,
              fmt("c=%.6f: %d interior, %d singular", r.c, interior, singular));
    const auto check = verify_Ec_cylinder_family(r.c);
    c.require(check.passed() && check.lhs == r.lhs && check.rhs == r.rhs, fmt("c=%.6f: ", r.c) + describe(check));
  }
  c.note(fmt("T* = %.15f, threshold %.12f", t.value, threshold));
}

void route_equivalence(Criterion& c, const std::vector<Geometry>& meshes) {
  double worst = 0.0;
  for (const auto& g : meshes) {
    const auto a = steklov_spectrum(g.mesh, 10);
    const auto b = crosscheck_generalized(g.mesh, 10);
    for (int i = 0; i < 10; ++i) {
      // relative to max(1, sigma): sigma1 is zero up to roundoff
      const double gap = std::abs(a[i].sigma - b[i].sigma) / std::max(1.0, std::abs(a[i].sigma));
      worst = std::max(worst, gap);
      c.require(gap <= 1e-8, fmt("%s sigma%d differs by %.3g", g.name.c_str(), i + 1, gap));
    }
  }
  c.note(fmt("max relative gap %.2e", worst));
}

void sign_flip(Criterion& c, const std::vector<Geometry>& meshes) {
  for (const auto& g : meshes) {
    const auto pair = steklov_spectrum(g.mesh, 2)[1];
    const auto e22 = verify_E2(g.mesh, pair)[1];
    const auto morse = verify_morse_theorem(g.mesh, Field(-pair.u));
    c.require(morse.lhs == e22.lhs && morse.rhs == e22.rhs && morse.verdict == e22.verdict,
              g.name + ": " + describe(morse) + " vs " + describe(e22));
    c.note(g.name + " " + fmt("%d = %d", e22.lhs, e22.rhs));
  }
}

void morse_property(Criterion& c, const std::vector<Geometry>& meshes) {
  int worst = 0;
  for (const auto& g : meshes) {
    const auto pair = steklov_spectrum(g.mesh, 2)[1];
    for (const auto& p : interior_critical_points(g.mesh, pair.u)) {
      worst = std::max(worst, p.link_sign_changes);
      c.require(p.link_sign_changes < 6, fmt("%s vertex %d has %d sign changes", g.name.c_str(), p.dof,
                                             p.link_sign_changes));
    }
  }
  c.note(fmt("max link sign changes %d", worst));
}

void perturbed_annulus(Criterion& c) {
  const auto base = generate_annulus(0.5, 1.0, 75);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto mesh = perturb_metric(base, 0.05, seed);
    const auto report = verify_eigenpair(mesh, steklov_spectrum(mesh, 2)[1]);
    for (const auto& check : report.checks) {
      c.require(check.passed(), fmt("seed %d: ", static_cast<int>(seed)) + describe(check));
    }
    c.require(report.sign_violations.empty(), fmt("seed %d: Steklov sign violations", static_cast<int>(seed)));
  }
  c.note("10 seeds at amplitude 0.05");
}

}  // namespace

int main() {
  const auto meshes = acceptance_meshes();
  const auto& disk_mesh = meshes[0].mesh;
  const std::vector<Geometry> genus_zero(meshes.begin(), meshes.end());

  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"1 Poincare-Hopf exactness on doubles", poincare_hopf},
      {"2 disk spectrum, convergence and identities", [&](Criterion& c) { disk(c, disk_mesh); }},
      {"3 annulus sigma2, saddles and E_c", [&](Criterion& c) { annulus(c, meshes[1].mesh); }},
      {"4 cylinders T=0.5 and T=2", [&](Criterion& c) { cylinders(c, meshes[2].mesh, meshes[3].mesh); }},
      {"5 critical-cylinder family", critical_family},
      {"6 route equivalence", [&](Criterion& c) { route_equivalence(c, meshes); }},
      {"7 sign-flip duality", [&](Criterion& c) { sign_flip(c, meshes); }},
      {"8 Morse property of u2", [&](Criterion& c) { morse_property(c, genus_zero); }},
      {"smoke perturbed annulus", perturbed_annulus},
  };

  int failed = 0;
  for (const auto& [name, body] : criteria) {
    Criterion c;
    try {
      body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (c.failures.empty() ? "PASS" : "FAIL") << "  " << name;
    for (const auto& f : c.facts) line << " | " << f;
    for (const auto& f : c.failures) line << " | FAILED: " << f;
    std::printf("%s\n", line.str().c_str());
    failed += !c.failures.empty();
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
