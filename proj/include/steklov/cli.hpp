#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steklov/mesh.hpp"
#include "steklov/oracle.hpp"

namespace steklov::cli {

/// Environment variable that replaces the default output directory.
inline constexpr const char* kOutDirVariable = "STEKLOV_OUT_DIR";

enum ExitCode : int { ok = 0, runtime_error = 1, config_error = 2, check_failed = 3, hypotheses_not_met = 4 };

struct RunConfig {
  std::string command;
  std::string geometry;  // disk | annulus | cylinder; empty when mesh_path is set
  std::filesystem::path mesh_path;
  double radius = 1.0;
  double inner_radius = 0.5;
  double outer_radius = 1.0;
  std::optional<double> half_length;
  int res = 0;               // 0: geometry default
  std::vector<int> ladder;   // empty: geometry default
  int k = 0;                 // 0: command default
  std::vector<int> pairs{2}; // eigenpairs to verify
  double zero_tol = 1e-7;
  double residual_tol = 1e-8;
  double min_rate = 1.5;
  std::uint64_t seed = 0;
  double amplitude = 0.0;
  std::vector<double> family;  // coefficients c for the critical-cylinder family
  std::filesystem::path out_dir = ".";
  bool strict = false;
};

/// Throws std::invalid_argument on inconsistent settings.
void validate(const RunConfig& config);

int default_resolution(const std::string& geometry);
std::vector<int> default_ladder(const std::string& geometry);

/// Generated (and optionally perturbed) mesh at resolution res, or the mesh file.
SurfaceMesh build_mesh(const RunConfig& config, int res);

/// Closed-form reference for the configured geometry.
oracle::AnalyticModel reference_model(const RunConfig& config, int k);

struct ConvergenceRow {
  int res = 0;
  int dofs = 0;
  double h = 0.0;
  std::vector<double> sigma;
  int failed_checks = 0;
  int hypotheses_not_met = 0;
};

struct ConvergenceStudy {
  std::vector<double> reference;
  std::vector<ConvergenceRow> rows;
  std::vector<double> rates;  // NaN where the reference eigenvalue is 0 or the mode is exact
  std::vector<bool> exact;    // error at roundoff level on every rung
};

/// Least-squares slope of log(error) against log(h).
double observed_rate(const std::vector<double>& h, const std::vector<double>& error);

ConvergenceStudy run_convergence(const RunConfig& config);

int cmd_mesh(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_verify(const RunConfig& config, std::ostream& out);
int cmd_convergence(const RunConfig& config, std::ostream& out);
int cmd_oracle(const RunConfig& config, std::ostream& out);

/// Parses arguments (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steklov::cli
