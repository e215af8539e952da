#include "steklov/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "steklov/identity.hpp"
#include "steklov/mesh_io.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/svg.hpp"

namespace steklov::cli {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = config.out_dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  return file;
}

void write_json(const RunConfig& config, const std::string& name, const nlohmann::ordered_json& doc) {
  auto file = open_output(config, name);
  file << doc.dump(2) << "\n";
}

int spectrum_size(const RunConfig& config, int fallback) { return config.k > 0 ? config.k : fallback; }

bool generated(const RunConfig& config) { return config.mesh_path.empty(); }

}  // namespace

int default_resolution(const std::string& geometry) {
  if (geometry == "disk") return 40;
  if (geometry == "annulus") return 300;
  if (geometry == "cylinder") return 128;
  throw std::invalid_argument("unknown geometry '" + geometry + "' (expected disk, annulus or cylinder)");
}

std::vector<int> default_ladder(const std::string& geometry) {
  if (geometry == "disk") return {10, 20, 40};
  if (geometry == "annulus") return {75, 150, 300};
  if (geometry == "cylinder") return {32, 64, 128};
  throw std::invalid_argument("unknown geometry '" + geometry + "' (expected disk, annulus or cylinder)");
}

void validate(const RunConfig& config) {
  if (generated(config) && config.command != "oracle") default_resolution(config.geometry);
  if (!generated(config) && !config.geometry.empty()) {
    throw std::invalid_argument("--mesh and --geometry are mutually exclusive");
  }
  if (config.geometry == "cylinder" && !config.half_length) throw std::invalid_argument("cylinder needs --T");
  if (!(config.zero_tol > 0.0) || !(config.residual_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (config.k < 0) throw std::invalid_argument("--k must be positive");
  for (std::size_t i = 1; i < config.ladder.size(); ++i) {
    if (config.ladder[i] <= config.ladder[i - 1]) throw std::invalid_argument("--ladder must be strictly increasing");
  }
  for (int p : config.pairs) {
    if (p < 1) throw std::invalid_argument("--pairs entries must be at least 1");
  }
  if (!(config.amplitude >= 0.0 && config.amplitude < 0.5)) {
    throw std::invalid_argument("--amplitude must lie in [0, 0.5)");
  }
}

SurfaceMesh build_mesh(const RunConfig& config, int res) {
  SurfaceMesh mesh = [&] {
    if (!generated(config)) return load_mesh(config.mesh_path);
    if (config.geometry == "disk") return generate_disk(config.radius, res);
    if (config.geometry == "annulus") return generate_annulus(config.inner_radius, config.outer_radius, res);
    return generate_cylinder(*config.half_length, res);
  }();
  if (config.amplitude > 0.0) mesh = perturb_metric(mesh, config.amplitude, config.seed);
  return mesh;
}

oracle::AnalyticModel reference_model(const RunConfig& config, int k) {
  if (config.geometry == "disk") {
    if (config.radius != 1.0) throw std::invalid_argument("the disk reference is tabulated for radius 1");
    return oracle::disk_modes(k);
  }
  if (config.geometry == "annulus") return oracle::annulus_modes(config.inner_radius, config.outer_radius, k);
  if (config.geometry == "cylinder") return oracle::cylinder_modes(*config.half_length, k);
  throw std::invalid_argument("a closed-form reference needs --geometry");
}

double observed_rate(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw std::invalid_argument("rate needs at least two rungs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(error[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy run_convergence(const RunConfig& config) {
  if (!generated(config)) throw std::invalid_argument("convergence needs --geometry");
  const std::vector<int> ladder = config.ladder.empty() ? default_ladder(config.geometry) : config.ladder;
  if (ladder.size() < 2) throw std::invalid_argument("--ladder needs at least two rungs");
  const int k = spectrum_size(config, 8);
  ConvergenceStudy study;
  for (const auto& mode : reference_model(config, k).modes) study.reference.push_back(mode.sigma);

  const IdentityOptions options{config.zero_tol, config.residual_tol};
  for (int res : ladder) {
    const SurfaceMesh mesh = build_mesh(config, res);
    const auto pairs = steklov_spectrum(mesh, std::max(k, 2));
    ConvergenceRow row;
    row.res = res;
    row.dofs = mesh.num_dofs();
    row.h = mesh.max_edge_length();
    for (int i = 0; i < k; ++i) row.sigma.push_back(pairs[i].sigma);
    for (const auto& c : verify_eigenpair(mesh, pairs[1], options).checks) {
      row.failed_checks += c.verdict == Verdict::fail;
      row.hypotheses_not_met += c.verdict == Verdict::hypotheses_not_met;
    }
    study.rows.push_back(std::move(row));
  }
  for (int i = 0; i < k; ++i) {
    if (std::abs(study.reference[i]) < 1e-12) {
      study.exact.push_back(false);
      study.rates.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::vector<double> h, error;
    for (const auto& row : study.rows) {
      h.push_back(row.h);
      error.push_back(std::abs(row.sigma[i] - study.reference[i]));
    }
    // modes inside the P1 space (z on a cylinder) are reproduced to roundoff
    const bool exact = *std::max_element(error.begin(), error.end()) <= 1e-10 * (1.0 + study.reference[i]);
    study.exact.push_back(exact);
    study.rates.push_back(exact ? std::numeric_limits<double>::quiet_NaN() : observed_rate(h, error));
  }
  return study;
}

int cmd_mesh(const RunConfig& config, std::ostream& out) {
  const int res = config.res > 0 ? config.res : default_resolution(config.geometry);
  const SurfaceMesh mesh = build_mesh(config, res);
  std::filesystem::create_directories(config.out_dir);
  save_mesh(mesh, config.out_dir / "mesh.json");
  out << mesh.label() << ": dofs " << mesh.num_dofs() << ", triangles " << mesh.num_triangles() << ", chi "
      << euler_characteristic(mesh) << ", boundary components " << mesh.boundary().size() << "\n";
  return ok;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const int res = generated(config) ? (config.res > 0 ? config.res : default_resolution(config.geometry)) : 0;
  const SurfaceMesh mesh = build_mesh(config, res);
  const auto pairs = steklov_spectrum(mesh, spectrum_size(config, 10));
  {
    auto csv = open_output(config, "spectrum.csv");
    write_spectrum_csv(pairs, csv);
  }
  auto fields = open_output(config, "eigenfunctions.csv");
  fields << "dof,x,y";
  for (const auto& p : pairs) fields << ",u" << p.index;
  fields << "\n";
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    fields << d << "," << g17(mesh.position(d).x()) << "," << g17(mesh.position(d).y());
    for (const auto& p : pairs) fields << "," << g17(p.u[d]);
    fields << "\n";
  }
  out << mesh.label() << "\n";
  for (const auto& p : pairs) {
    char line[128];
    std::snprintf(line, sizeof line, "  sigma_%d = %.10f  multiplicity %d  residual %.2e\n", p.index, p.sigma,
                  p.multiplicity, p.residual);
    out << line;
  }
  return ok;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  const int res = generated(config) ? (config.res > 0 ? config.res : default_resolution(config.geometry)) : 0;
  const SurfaceMesh mesh = build_mesh(config, res);
  const int k = std::max(spectrum_size(config, 2), *std::max_element(config.pairs.begin(), config.pairs.end()));
  const auto pairs = steklov_spectrum(mesh, k);
  const IdentityOptions options{config.zero_tol, config.residual_tol};

  bool failed = false;
  bool warned = false;
  bool unmet = false;
  out << mesh.label() << "\n";
  for (int index : config.pairs) {
    const auto report = verify_eigenpair(mesh, pairs[index - 1], options);
    write_json(config, "report_" + std::to_string(index) + ".json", to_json(report));
    {
      auto svg = open_output(config, "overlay_" + std::to_string(index) + ".svg");
      write_overlay_svg(mesh, report.analysis, svg);
    }
    char head[128];
    std::snprintf(head, sizeof head, "  eigenpair %d: sigma %.10f, multiplicity %d\n", index, report.sigma,
                  report.multiplicity);
    out << head;
    for (const auto& c : report.checks) {
      out << "    " << c.name << ": " << c.lhs << " = " << c.rhs << "  " << to_string(c.verdict) << "\n";
      failed |= c.verdict == Verdict::fail;
      warned |= c.verdict == Verdict::pass_with_warning;
      unmet |= c.verdict == Verdict::hypotheses_not_met;
    }
    if (!report.sign_violations.empty()) {
      out << "    flux sign disagrees with sigma * u at " << report.sign_violations.size() << " boundary vertices\n";
      failed = true;
    }
  }
  if (failed) return check_failed;
  if (config.strict && unmet) return hypotheses_not_met;
  if (config.strict && warned) return check_failed;
  return ok;
}

int cmd_convergence(const RunConfig& config, std::ostream& out) {
  const ConvergenceStudy study = run_convergence(config);
  const int k = static_cast<int>(study.reference.size());
  {
    auto csv = open_output(config, "convergence.csv");
    csv << "res,dofs,h,k,sigma,reference,error\n";
    for (const auto& row : study.rows) {
      for (int i = 0; i < k; ++i) {
        csv << row.res << "," << row.dofs << "," << g17(row.h) << "," << i + 1 << "," << g17(row.sigma[i]) << ","
            << g17(study.reference[i]) << "," << g17(std::abs(row.sigma[i] - study.reference[i])) << "\n";
      }
    }
  }
  bool failed = false;
  {
    auto csv = open_output(config, "rates.csv");
    csv << "k,reference,rate,exact,pass\n";
    for (int i = 0; i < k; ++i) {
      const double rate = study.rates[i];
      const bool pass = std::isnan(rate) || rate >= config.min_rate;
      failed |= !pass;
      csv << i + 1 << "," << g17(study.reference[i]) << "," << (std::isnan(rate) ? "" : g17(rate)) << ","
          << (study.exact[i] ? "true" : "false") << "," << (pass ? "true" : "false") << "\n";
    }
  }
  {
    auto csv = open_output(config, "rung_checks.csv");
    csv << "res,dofs,failed_checks,hypotheses_not_met\n";
    for (const auto& row : study.rows) {
      csv << row.res << "," << row.dofs << "," << row.failed_checks << "," << row.hypotheses_not_met << "\n";
      failed |= row.failed_checks > 0;
    }
  }
  for (int i = 0; i < k; ++i) {
    char line[128];
    if (study.exact[i]) {
      std::snprintf(line, sizeof line, "  sigma_%d reference %.10f  exact\n", i + 1, study.reference[i]);
    } else if (std::isnan(study.rates[i])) {
      std::snprintf(line, sizeof line, "  sigma_%d reference %.10f  rate n/a\n", i + 1, study.reference[i]);
    } else {
      std::snprintf(line, sizeof line, "  sigma_%d reference %.10f  rate %.3f\n", i + 1, study.reference[i],
                    study.rates[i]);
    }
    out << line;
  }
  return failed ? check_failed : ok;
}

int cmd_oracle(const RunConfig& config, std::ostream& out) {
  if (config.geometry.empty() && config.family.empty()) {
    throw std::invalid_argument("oracle needs --geometry or --family");
  }
  if (!config.geometry.empty()) {
    const auto model = reference_model(config, spectrum_size(config, 8));
    write_json(config, "oracle.json", oracle::dump(model));
    for (std::size_t i = 0; i < model.modes.size(); ++i) {
      char line[160];
      std::snprintf(line, sizeof line, "  sigma_%zu = %.15g  multiplicity %d  %s\n", i + 1, model.modes[i].sigma,
                    model.modes[i].multiplicity, model.modes[i].describe().c_str());
      out << line;
    }
  }
  if (!config.family.empty()) {
    write_json(config, "oracle_family.json", oracle::dump_cylinder_family(config.family));
    const IdentityOptions options{config.zero_tol, config.residual_tol};
    for (double c : config.family) {
      const Check check = verify_Ec_cylinder_family(c, 720, options);
      out << "  c = " << g17(c) << ": E_c " << check.lhs << " = " << check.rhs << "  " << to_string(check.verdict)
          << "\n";
    }
  }
  return ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steklov eigenproblems on surfaces and critical-point index identities"};
  app.require_subcommand(1);
  RunConfig config;
  if (const char* env = std::getenv(kOutDirVariable); env && *env) config.out_dir = env;
  std::string T;

  auto add_common = [&](CLI::App* sub, bool geometry_only) {
    sub->add_option("--geometry", config.geometry, "disk | annulus | cylinder");
    sub->add_option("--radius", config.radius, "disk radius");
    sub->add_option("--r", config.inner_radius, "annulus inner radius");
    sub->add_option("--R", config.outer_radius, "annulus outer radius");
    sub->add_option("--T", T, "cylinder half-length (a number or 'tstar')");
    sub->add_option("--k", config.k, "number of eigenpairs");
    sub->add_option("--out", config.out_dir, "output directory (default: $STEKLOV_OUT_DIR or .)");
    sub->add_option("--zero-tol", config.zero_tol, "relative snapping tolerance");
    sub->add_option("--residual-tol", config.residual_tol, "eigenpair residual tolerance");
    if (geometry_only) return;
    sub->add_option("--res", config.res, "resolution: rings (disk) or angular samples");
    sub->add_option("--mesh", config.mesh_path, "mesh JSON file instead of a generated geometry");
    sub->add_option("--seed", config.seed, "metric perturbation seed");
    sub->add_option("--amplitude", config.amplitude, "metric perturbation amplitude in [0, 0.5)");
    sub->add_flag("--strict", config.strict, "warnings and unmet hypotheses fail the run");
  };
  auto* mesh = app.add_subcommand("mesh", "write a generated mesh as JSON");
  add_common(mesh, false);
  auto* solve = app.add_subcommand("solve", "Steklov spectrum CSV and eigenfunction values");
  add_common(solve, false);
  auto* verify = app.add_subcommand("verify", "identity report JSON and SVG overlay per eigenpair");
  add_common(verify, false);
  verify->add_option("--pairs", config.pairs, "eigenpair indices to verify")->delimiter(',');
  auto* convergence = app.add_subcommand("convergence", "eigenvalue errors against the closed form");
  add_common(convergence, false);
  convergence->add_option("--ladder", config.ladder, "strictly increasing resolutions")->delimiter(',');
  convergence->add_option("--min-rate", config.min_rate, "smallest acceptable observed rate");
  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form spectra and critical points");
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--family", config.family, "coefficients c of cosh z cos theta + c z on the critical cylinder")
      ->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    if (!T.empty()) {
      if (T == "tstar") {
        config.half_length = oracle::tstar().value;
      } else {
        std::size_t used = 0;
        config.half_length = std::stod(T, &used);
        if (used != T.size()) throw std::invalid_argument("--T: not a number: " + T);
      }
    }
    validate(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }

  try {
    if (config.command == "mesh") return cmd_mesh(config, out);
    if (config.command == "solve") return cmd_solve(config, out);
    if (config.command == "verify") return cmd_verify(config, out);
    if (config.command == "convergence") return cmd_convergence(config, out);
    return cmd_oracle(config, out);
  } catch (const MeshError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return runtime_error;
  }
}

}  // namespace steklov::cli
