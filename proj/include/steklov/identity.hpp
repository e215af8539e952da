#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/critical.hpp"
#include "steklov/mesh.hpp"
#include "steklov/spectrum.hpp"

namespace steklov {

enum class Verdict { pass, pass_with_warning, fail, hypotheses_not_met };

const char* to_string(Verdict v);

struct Check {
  std::string name;
  int lhs = 0;
  int rhs = 0;
  Verdict verdict = Verdict::fail;
  std::vector<std::string> notes;

  bool passed() const { return verdict == Verdict::pass || verdict == Verdict::pass_with_warning; }
};

struct IdentityOptions {
  double zero_tol = kDefaultZeroTol;
  double residual_tol = 1e-8;
};

/// Everything the identity checks read from one field, computed once.
struct FieldAnalysis {
  Field u;
  Field flux;  // K u: integrated normal derivative at boundary DOFs
  double zero_tol = kDefaultZeroTol;
  double flux_threshold = 0.0;
  int chi_M = 0;
  int genus = 0;
  std::vector<CriticalPoint> interior;
  TraceExtrema extrema;
  std::vector<CriticalPoint> singular_zeros;
  BoundarySignData negative;  // sign data of u: the set P
  BoundarySignData positive;  // sign data of -u: the set Q
  int interior_index_sum = 0;
  int boundary_term_E0 = 0;
  int boundary_term_E2 = 0;
  int count_min_neg = 0;
  int count_max_neg = 0;
  std::vector<int> flat_zero_flux;  // boundary DOFs violating grad u != 0 on the boundary
  bool constant = false;

  bool flux_negative(int dof) const { return flux[dof] < -flux_threshold; }
};

/// Stiffness times u. For discrete-harmonic u it vanishes at interior DOFs.
Field normal_flux(const SurfaceMesh& mesh, const Field& u);

FieldAnalysis analyze_field(const SurfaceMesh& mesh, const Field& u, const Field& flux,
                            double zero_tol = kDefaultZeroTol);
FieldAnalysis analyze_field(const SurfaceMesh& mesh, const Field& u, double zero_tol = kDefaultZeroTol);

/// Index sum of interior critical points against chi(M) minus the indices of
/// trace extrema where the flux is negative.
Check verify_E0(const FieldAnalysis& a);
inline Check verify_E0(const SurfaceMesh& mesh, const Field& u, const Field& flux,
                       const IdentityOptions& opt = {}) {
  return verify_E0(analyze_field(mesh, u, flux, opt.zero_tol));
}

/// E2_1, E2_2 and E2_4 for a non-constant eigenpair.
std::vector<Check> verify_E2(const FieldAnalysis& a, const SteklovEigenpair& pair, const IdentityOptions& opt = {});
std::vector<Check> verify_E2(const SurfaceMesh& mesh, const SteklovEigenpair& pair, const IdentityOptions& opt = {});

/// #interior critical points = #negative-flux trace minima - maxima - chi(M).
Check verify_corollary_count(const FieldAnalysis& a);

/// #interior critical points of u2 = sum of ell_j - chi(M), genus 0 only.
Check verify_Ec(const FieldAnalysis& a, const SteklovEigenpair& pair);

/// Interior index sum against chi(M) - chi(Q) with Q = {u > 0} on the boundary.
Check verify_morse_theorem(const FieldAnalysis& a);
inline Check verify_morse_theorem(const SurfaceMesh& mesh, const Field& u, const IdentityOptions& opt = {}) {
  return verify_morse_theorem(analyze_field(mesh, u, opt.zero_tol));
}

struct DoubleIndex {
  int total = 0;
  int bulk = 0;    // DOFs off the glued boundary, both copies
  int collar = 0;  // glued boundary DOFs
  int chi_double = 0;
};

/// PL index sum of the evenly reflected field on the double, split into bulk
/// and collar; the check also requires bulk = 2 * interior index sum.
Check verify_double_PH(const SurfaceMesh& mesh, const Field& u, const IdentityOptions& opt = {},
                       DoubleIndex* parts = nullptr);

/// E_c for cosh z cos theta + c z on the critical cylinder, from the closed
/// form: interior count from the exact critical points, sign data from
/// `samples` trace values per boundary circle.
Check verify_Ec_cylinder_family(double c, int samples = 720, const IdentityOptions& opt = {});

/// Boundary DOFs where the flux sign disagrees with sigma * u, among vertices
/// whose value clears both the threshold and its adjacent trace differences.
std::vector<int> steklov_sign_violations(const SurfaceMesh& mesh, const FieldAnalysis& a, double sigma);

struct IdentityReport {
  std::string mesh_label;
  int eigenpair = 0;
  double sigma = 0.0;
  int multiplicity = 1;
  int cluster = 0;
  double residual = 0.0;
  IdentityOptions options;
  FieldAnalysis analysis;
  DoubleIndex double_index;
  std::vector<int> sign_violations;
  std::vector<Check> checks;  // E0, E2_1, E2_2, E2_4, COROLLARY, E_c, MORSE, PH_double

  bool any_failed() const;
  bool any_hypotheses_not_met() const;
  const Check& check(const std::string& name) const;
};

IdentityReport verify_eigenpair(const SurfaceMesh& mesh, const SteklovEigenpair& pair,
                                const IdentityOptions& opt = {});

nlohmann::ordered_json to_json(const Check& c);
nlohmann::ordered_json to_json(const IdentityReport& r);

}  // namespace steklov
