#include "steklov/identity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "steklov/fem.hpp"
#include "steklov/oracle.hpp"

namespace steklov {

namespace {

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string where(const CriticalPoint& p) {
  return "vertex " + std::to_string(p.dof) + " at (" + format(p.location.x()) + ", " + format(p.location.y()) + ")";
}

bool is_constant(const Field& u, double zero_tol) {
  if (u.size() == 0) return true;
  const double scale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  return u.maxCoeff() - u.minCoeff() <= zero_tol * scale;
}

// Hypothesis i)-iii) proxies shared by E0, E2, the corollary and the Morse count.
bool boundary_hypotheses(const FieldAnalysis& a, std::vector<std::string>& notes) {
  bool ok = true;
  if (a.constant) {
    notes.push_back("field is constant");
    return false;
  }
  for (std::size_t j = 0; j < a.negative.loops.size(); ++j) {
    if (a.negative.loops[j].degenerate) {
      notes.push_back("trace vanishes on boundary component " + std::to_string(j));
      ok = false;
    }
  }
  for (const auto& p : a.singular_zeros) {
    notes.push_back("singular boundary zero at " + where(p));
    ok = false;
  }
  for (int d : a.flat_zero_flux) {
    notes.push_back("gradient vanishes at boundary vertex " + std::to_string(d));
    ok = false;
  }
  return ok;
}

bool near_threshold(const BoundarySignData& data, std::vector<std::string>& notes) {
  bool warn = false;
  for (std::size_t j = 0; j < data.loops.size(); ++j) {
    if (data.loops[j].near_threshold) {
      notes.push_back("boundary component " + std::to_string(j) + " has values within 10x the zero threshold (margin " +
                      format(data.loops[j].margin) + ")");
      warn = true;
    }
  }
  return warn;
}

Check decide(std::string name, int lhs, int rhs, bool hypotheses, bool warn, std::vector<std::string> notes) {
  Check c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.notes = std::move(notes);
  if (!hypotheses) {
    c.verdict = Verdict::hypotheses_not_met;
  } else if (lhs != rhs) {
    c.verdict = Verdict::fail;
  } else {
    c.verdict = warn ? Verdict::pass_with_warning : Verdict::pass;
  }
  return c;
}

bool all_saddles(const FieldAnalysis& a, std::vector<std::string>& notes) {
  bool ok = true;
  for (const auto& p : a.interior) {
    if (p.index != -1) {
      notes.push_back("interior critical point of index " + std::to_string(p.index) + " at " + where(p));
      ok = false;
    }
  }
  return ok;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::pass_with_warning:
      return "pass-with-warning";
    case Verdict::fail:
      return "fail";
    case Verdict::hypotheses_not_met:
      return "hypotheses-not-met";
  }
  return "unknown";
}

Field normal_flux(const SurfaceMesh& mesh, const Field& u) { return assemble_stiffness(mesh).matrix * u; }

FieldAnalysis analyze_field(const SurfaceMesh& mesh, const Field& u, double zero_tol) {
  return analyze_field(mesh, u, normal_flux(mesh, u), zero_tol);
}

FieldAnalysis analyze_field(const SurfaceMesh& mesh, const Field& u, const Field& flux, double zero_tol) {
  if (flux.size() != mesh.num_dofs()) throw std::invalid_argument("flux size does not match the mesh");
  FieldAnalysis a;
  a.u = u;
  a.flux = flux;
  a.zero_tol = zero_tol;
  a.chi_M = euler_characteristic(mesh);
  a.genus = (2 - static_cast<int>(mesh.boundary().size()) - a.chi_M) / 2;
  a.constant = is_constant(u, zero_tol);

  a.interior = interior_critical_points(mesh, u, zero_tol);
  for (const auto& p : a.interior) a.interior_index_sum += p.index;
  a.extrema = boundary_trace_extrema(mesh, u, zero_tol);
  a.singular_zeros = boundary_singular_zeros(mesh, u, zero_tol);
  std::vector<int> forced;
  for (const auto& p : a.singular_zeros) forced.push_back(p.dof);
  a.negative = boundary_sign_changes(mesh, u, zero_tol, forced);
  a.positive = boundary_sign_changes(mesh, -u, zero_tol, forced);

  double flux_scale = 0.0;
  for (const auto& loop : mesh.boundary()) {
    for (int d : loop.dofs) flux_scale = std::max(flux_scale, std::abs(flux[d]));
  }
  a.flux_threshold = zero_tol * flux_scale;

  for (const auto& p : a.extrema.points) {
    if (a.flux_negative(p.dof)) {
      a.boundary_term_E0 += p.index;
      (p.index > 0 ? a.count_min_neg : a.count_max_neg) += 1;
    }
    if (u[p.dof] < -a.negative.threshold) a.boundary_term_E2 += p.index;
  }

  if (!a.constant) {
    for (const auto& loop : mesh.boundary()) {
      const int n = static_cast<int>(loop.dofs.size());
      for (int i = 0; i < n; ++i) {
        const double prev = u[loop.dofs[(i + n - 1) % n]];
        const double here = u[loop.dofs[i]];
        const double next = u[loop.dofs[(i + 1) % n]];
        const bool tangential_flat =
            (here - prev) * (next - here) <= 0.0 || std::abs(next - prev) <= a.negative.threshold;
        if (tangential_flat && std::abs(flux[loop.dofs[i]]) <= a.flux_threshold) a.flat_zero_flux.push_back(loop.dofs[i]);
      }
    }
    std::sort(a.flat_zero_flux.begin(), a.flat_zero_flux.end());
  }
  return a;
}

Check verify_E0(const FieldAnalysis& a) {
  std::vector<std::string> notes;
  const bool ok = boundary_hypotheses(a, notes);
  return decide("E0", a.interior_index_sum, a.chi_M - a.boundary_term_E0, ok, false, std::move(notes));
}

std::vector<Check> verify_E2(const SurfaceMesh& mesh, const SteklovEigenpair& pair, const IdentityOptions& opt) {
  return verify_E2(analyze_field(mesh, pair.u, opt.zero_tol), pair, opt);
}

std::vector<Check> verify_E2(const FieldAnalysis& a, const SteklovEigenpair& pair, const IdentityOptions& opt) {
  std::vector<std::string> notes;
  bool ok = boundary_hypotheses(a, notes);
  if (pair.residual > opt.residual_tol) {
    notes.push_back("eigenpair residual " + format(pair.residual) + " exceeds " + format(opt.residual_tol));
    ok = false;
  }
  if (!(pair.sigma > opt.residual_tol)) {
    notes.push_back("eigenvalue is zero: constant eigenfunction");
    ok = false;
  }
  const bool warn = near_threshold(a.negative, notes);
  if (ok && a.boundary_term_E0 != a.boundary_term_E2) {
    notes.push_back("flux-selected boundary term " + std::to_string(a.boundary_term_E0) +
                    " differs from sign-selected term " + std::to_string(a.boundary_term_E2));
  }
  if (a.negative.chi_negative != a.negative.sum_ell) {
    notes.push_back("chi(P) = " + std::to_string(a.negative.chi_negative) + " differs from sum of ell_j = " +
                    std::to_string(a.negative.sum_ell));
  }
  return {decide("E2_1", a.interior_index_sum, a.chi_M - a.boundary_term_E2, ok, warn, notes),
          decide("E2_2", a.interior_index_sum, a.chi_M - a.negative.chi_negative, ok, warn, notes),
          decide("E2_4", a.interior_index_sum, a.chi_M - a.negative.sum_ell, ok, warn, notes)};
}

Check verify_corollary_count(const FieldAnalysis& a) {
  std::vector<std::string> notes;
  bool ok = boundary_hypotheses(a, notes);
  ok = all_saddles(a, notes) && ok;
  return decide("COROLLARY", static_cast<int>(a.interior.size()), a.count_min_neg - a.count_max_neg - a.chi_M, ok,
                false, std::move(notes));
}

Check verify_Ec(const FieldAnalysis& a, const SteklovEigenpair& pair) {
  std::vector<std::string> notes;
  bool ok = true;
  if (a.genus != 0) {
    notes.push_back("surface has genus " + std::to_string(a.genus));
    ok = false;
  }
  if (pair.cluster != 2) {
    notes.push_back("eigenpair " + std::to_string(pair.index) + " is not in the second eigenvalue cluster");
    ok = false;
  }
  if (a.constant || a.negative.degenerate()) {
    notes.push_back("trace vanishes on a boundary component");
    ok = false;
  }
  ok = all_saddles(a, notes) && ok;
  bool warn = near_threshold(a.negative, notes);
  for (const auto& p : a.singular_zeros) {
    notes.push_back("singular boundary zero at " + where(p) + " not counted as a sign change");
    warn = true;
  }
  return decide("E_c", static_cast<int>(a.interior.size()), a.negative.sum_ell - a.chi_M, ok, warn,
                std::move(notes));
}

Check verify_morse_theorem(const FieldAnalysis& a) {
  std::vector<std::string> notes;
  const bool ok = boundary_hypotheses(a, notes);
  const bool warn = near_threshold(a.positive, notes);
  if (a.positive.chi_negative != a.negative.chi_negative) {
    notes.push_back("chi(Q) = " + std::to_string(a.positive.chi_negative) + " differs from chi(P) = " +
                    std::to_string(a.negative.chi_negative));
  }
  return decide("MORSE", a.interior_index_sum, a.chi_M - a.positive.chi_negative, ok, warn, std::move(notes));
}

Check verify_double_PH(const SurfaceMesh& mesh, const Field& u, const IdentityOptions& opt, DoubleIndex* parts) {
  if (mesh.closed()) throw std::invalid_argument("the double needs a mesh with boundary");
  Check c;
  c.name = "PH_double";
  if (is_constant(u, opt.zero_tol)) {
    c.verdict = Verdict::hypotheses_not_met;
    c.notes.push_back("field is constant");
    return c;
  }
  const SurfaceMesh doubled = double_mesh(mesh);
  const std::vector<int> source = double_source_dofs(mesh, doubled);
  const Field v = reflect_function(mesh, doubled, u);
  std::vector<std::int64_t> key(doubled.num_dofs());
  for (int d = 0; d < doubled.num_dofs(); ++d) key[d] = 2 * static_cast<std::int64_t>(source[d]) + (d != source[d]);
  const VertexOrder order(v, opt.zero_tol, key);

  DoubleIndex idx;
  idx.chi_double = euler_characteristic(doubled);
  for (int d = 0; d < doubled.num_dofs(); ++d) {
    const int index = 1 - link_sign_changes(doubled, order, d) / 2;
    idx.total += index;
    (mesh.is_boundary(source[d]) ? idx.collar : idx.bulk) += index;
  }

  const VertexOrder base(u, opt.zero_tol);
  int interior_sum = 0;
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    if (!mesh.is_boundary(d)) interior_sum += 1 - link_sign_changes(mesh, base, d) / 2;
  }
  c.lhs = idx.total;
  c.rhs = idx.chi_double;
  c.verdict = idx.total == idx.chi_double ? Verdict::pass : Verdict::fail;
  if (idx.chi_double != 2 * euler_characteristic(mesh)) {
    c.notes.push_back("chi of the double is " + std::to_string(idx.chi_double) + ", expected 2 chi(M)");
    c.verdict = Verdict::fail;
  }
  if (idx.bulk != 2 * interior_sum) {
    c.notes.push_back("bulk index " + std::to_string(idx.bulk) + " differs from twice the interior sum " +
                      std::to_string(interior_sum));
    c.verdict = Verdict::fail;
  }
  c.notes.push_back("bulk " + std::to_string(idx.bulk) + ", collar " + std::to_string(idx.collar));
  if (parts) *parts = idx;
  return c;
}

Check verify_Ec_cylinder_family(double c, int samples, const IdentityOptions& opt) {
  if (samples < 8 || samples % 2 != 0) throw std::invalid_argument("samples must be even and at least 8");
  const double T = oracle::tstar().value;
  const auto points = oracle::cylinder_family_critical_points(c);
  int interior = 0;
  std::vector<std::string> notes;
  bool ok = true;
  bool warn = false;
  for (const auto& p : points) {
    if (!p.on_boundary) {
      ++interior;
      if (p.index != -1) {
        notes.push_back("interior critical point of index " + std::to_string(p.index));
        ok = false;
      }
    }
  }

  const double step = 2.0 * std::numbers::pi / samples;
  std::vector<std::vector<double>> values(2);
  std::vector<std::vector<char>> forced(2, std::vector<char>(samples, 0));
  double scale = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double z = side == 0 ? -T : T;
    for (int i = 0; i < samples; ++i) {
      const double theta = step * i;
      values[side].push_back(oracle::cylinder_family_value(c, Vec2(theta, z)));
      scale = std::max(scale, std::abs(values[side].back()));
      for (const auto& p : points) {
        if (!p.on_boundary) continue;
        const double dtheta = std::remainder(p.location.x() - theta, 2.0 * std::numbers::pi);
        if (std::abs(dtheta) < 1e-9 && std::abs(p.location.y() - z) < 1e-9) forced[side][i] = 1;
      }
    }
  }
  int sum_ell = 0;
  for (int side = 0; side < 2; ++side) {
    const LoopSigns s = classify_loop_signs(values[side], opt.zero_tol * scale, forced[side]);
    if (s.degenerate) {
      notes.push_back("trace vanishes on a boundary circle");
      ok = false;
    }
    if (s.near_threshold) warn = true;
    sum_ell += s.ell;
  }
  for (const auto& p : points) {
    if (p.on_boundary) {
      notes.push_back("singular boundary zero at (" + format(p.location.x()) + ", " + format(p.location.y()) +
                      ") not counted as a sign change");
      warn = true;
    }
  }
  return decide("E_c", interior, sum_ell, ok, warn, std::move(notes));
}

std::vector<int> steklov_sign_violations(const SurfaceMesh& mesh, const FieldAnalysis& a, double sigma) {
  std::vector<int> bad;
  if (!(sigma > 0.0) || a.constant) return bad;
  for (const auto& loop : mesh.boundary()) {
    const int n = static_cast<int>(loop.dofs.size());
    for (int i = 0; i < n; ++i) {
      const int d = loop.dofs[i];
      const double here = a.u[d];
      const double local = std::max({std::abs(here - a.u[loop.dofs[(i + n - 1) % n]]),
                                     std::abs(a.u[loop.dofs[(i + 1) % n]] - here), a.negative.threshold});
      if (std::abs(here) <= local) continue;
      if (a.flux[d] * here <= 0.0) bad.push_back(d);
    }
  }
  std::sort(bad.begin(), bad.end());
  return bad;
}

bool IdentityReport::any_failed() const {
  return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.verdict == Verdict::fail; });
}

bool IdentityReport::any_hypotheses_not_met() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.verdict == Verdict::hypotheses_not_met; });
}

const Check& IdentityReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

IdentityReport verify_eigenpair(const SurfaceMesh& mesh, const SteklovEigenpair& pair, const IdentityOptions& opt) {
  IdentityReport r;
  r.mesh_label = mesh.label();
  r.eigenpair = pair.index;
  r.sigma = pair.sigma;
  r.multiplicity = pair.multiplicity;
  r.cluster = pair.cluster;
  r.residual = pair.residual;
  r.options = opt;
  r.analysis = analyze_field(mesh, pair.u, opt.zero_tol);
  const FieldAnalysis& a = r.analysis;

  r.checks.push_back(verify_E0(a));
  for (auto& c : verify_E2(a, pair, opt)) r.checks.push_back(std::move(c));
  r.checks.push_back(verify_corollary_count(a));
  r.checks.push_back(verify_Ec(a, pair));
  r.checks.push_back(verify_morse_theorem(a));
  r.checks.push_back(verify_double_PH(mesh, pair.u, opt, &r.double_index));
  r.sign_violations = steklov_sign_violations(mesh, a, pair.sigma);
  return r;
}

nlohmann::ordered_json to_json(const Check& c) {
  nlohmann::ordered_json j;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["pass"] = c.passed();
  j["verdict"] = to_string(c.verdict);
  j["margin_notes"] = c.notes;
  return j;
}

nlohmann::ordered_json to_json(const IdentityReport& r) {
  const FieldAnalysis& a = r.analysis;
  nlohmann::ordered_json j;
  j["format"] = "steklov-report";
  j["version"] = 1;

  auto& prov = j["provenance"];
  prov["mesh"] = r.mesh_label;
  prov["eigenpair"] = r.eigenpair;
  prov["sigma"] = r.sigma;
  prov["multiplicity"] = r.multiplicity;
  prov["cluster"] = r.cluster;
  prov["residual"] = r.residual;
  prov["zero_tol"] = r.options.zero_tol;
  prov["residual_tol"] = r.options.residual_tol;
  prov["sign_threshold"] = a.negative.threshold;
  auto warnings = nlohmann::ordered_json::array();
  for (const auto& p : a.singular_zeros) warnings.push_back("singular boundary zero at " + where(p));
  prov["singular_zero_warnings"] = warnings;

  j["interior_index_sum"] = a.interior_index_sum;
  j["chi_M"] = a.chi_M;
  j["chi_bd"] = 0;
  j["chi_P"] = a.negative.chi_negative;
  j["chi_Q"] = a.positive.chi_negative;
  j["boundary_term_E0"] = a.boundary_term_E0;
  j["boundary_term_E2"] = a.boundary_term_E2;
  j["sum_ell"] = a.negative.sum_ell;
  j["L"] = a.negative.changing_loops;
  j["count_min_neg"] = a.count_min_neg;
  j["count_max_neg"] = a.count_max_neg;
  j["interior_critical_count"] = static_cast<int>(a.interior.size());
  auto ell = nlohmann::ordered_json::array();
  for (const auto& loop : a.negative.loops) ell.push_back(loop.ell);
  j["ell"] = ell;
  j["double"] = {{"total", r.double_index.total},
                 {"bulk", r.double_index.bulk},
                 {"collar", r.double_index.collar},
                 {"chi_double", r.double_index.chi_double}};
  j["steklov_sign_violations"] = r.sign_violations;

  auto& checks = j["checks"];
  checks = nlohmann::ordered_json::object();
  for (const auto& c : r.checks) checks[c.name] = to_json(c);

  j["interior_critical_points"] = to_json(a.interior);
  j["boundary_extrema"] = to_json(a.extrema.points);
  j["boundary_singular_zeros"] = to_json(a.singular_zeros);
  return j;
}

}  // namespace steklov
