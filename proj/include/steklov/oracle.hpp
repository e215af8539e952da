#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/mesh.hpp"

namespace steklov::oracle {

enum class Geometry { disk, annulus, cylinder };

const char* to_string(Geometry g);

/// One closed-form Steklov eigenfunction. Disk and annulus modes are evaluated
/// at Cartesian points; cylinder modes at parameter points (theta, z).
struct Mode {
  enum class Kind {
    constant,      // 1
    disk_power,    // Re or Im of (x + i y)^m
    annulus_log,   // a + b log(s / R)
    annulus_power, // (a (s/R)^m + b (r/s)^m) trig(m theta)
    cylinder_z,    // z
    cylinder_cosh, // cosh(m z) trig(m theta)
    cylinder_sinh, // sinh(m z) trig(m theta)
  };

  Kind kind = Kind::constant;
  int m = 0;
  bool sine = false;  // trig = sin instead of cos
  double a = 1.0;
  double b = 0.0;
  double sigma = 0.0;
  int multiplicity = 1;

  double value(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
  std::string describe() const;

  // geometry parameters copied from the model
  double inner_radius = 0.0;
  double outer_radius = 1.0;
};

struct BoundarySample {
  Vec2 point;
  Vec2 normal;  // outward unit normal
};

struct AnalyticModel {
  Geometry geometry = Geometry::disk;
  double inner_radius = 0.0;  // annulus r
  double outer_radius = 1.0;  // disk / annulus R
  double half_length = 0.0;   // cylinder T
  std::vector<Mode> modes;    // first k, ascending sigma

  /// `per_component` uniformly spaced samples on every boundary circle.
  std::vector<BoundarySample> boundary_samples(int per_component) const;
  /// max over samples of |d_nu u - sigma u| for mode i.
  double steklov_residual(int i, int per_component = 256) const;
};

/// Unit disk: 1, r^m cos(m theta), r^m sin(m theta) with sigma = 0, m, m.
AnalyticModel disk_modes(int k);

/// Annulus r < |x| < R; each angular frequency gives a 2x2 generalized
/// eigenproblem whose quadratic characteristic polynomial is solved exactly.
AnalyticModel annulus_modes(double r, double R, int k);

/// Flat cylinder S^1 x [-T, T].
AnalyticModel cylinder_modes(double T, int k);

struct TStar {
  double value = 0.0;
  double residual = 0.0;         // T tanh T - 1
  double sinh_identity = 0.0;    // sinh T - cosh T / T
};

/// Unique positive root of T tanh T = 1.
TStar tstar();

struct CriticalPoint {
  Vec2 location;  // (theta, z) for cylinders, (x, y) otherwise
  bool on_boundary = false;
  int index = 0;  // -1 saddle, +1 extremum; 0 for boundary singular zeros
  double value = 0.0;
  std::string classification;
};

/// Threshold cosh(T*) / T* separating the three regimes of the family
/// cosh z cos theta + c z on the critical cylinder.
double cylinder_family_threshold();

/// Exact critical points of u = cosh z cos theta + c z on C_{T*}.
std::vector<CriticalPoint> cylinder_family_critical_points(double c);

/// Evaluates cosh z cos theta + c z at (theta, z).
double cylinder_family_value(double c, const Vec2& p);

/// The two interior saddles of the annulus mode (a s/R + b r/s) cos(theta - phase).
std::vector<CriticalPoint> annulus_mode_saddles(const Mode& mode, double phase);

/// JSON dump: geometry, first-k sigma with multiplicities, critical-point lists.
nlohmann::ordered_json dump(const AnalyticModel& model);
nlohmann::ordered_json dump_cylinder_family(const std::vector<double>& coefficients);

}  // namespace steklov::oracle
