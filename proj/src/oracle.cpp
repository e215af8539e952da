#include "steklov/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace steklov::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMultiplicityTolerance = 1e-10;

using Kind = Mode::Kind;

double trig(bool sine, double x) { return sine ? std::sin(x) : std::cos(x); }
double dtrig(bool sine, double x) { return sine ? std::cos(x) : -std::sin(x); }

struct Root {
  double sigma;
  double a;
  double b;
};

// Both roots of det(K - sigma B) = 0 for 2x2 matrices, with the null vector
// (a, b) of K - sigma B for each.
std::array<Root, 2> solve_pencil(const double k[2][2], const double bm[2][2]) {
  const double alpha = bm[0][0] * bm[1][1] - bm[0][1] * bm[1][0];
  const double beta = k[0][0] * bm[1][1] + k[1][1] * bm[0][0] - k[0][1] * bm[1][0] - k[1][0] * bm[0][1];
  const double gamma = k[0][0] * k[1][1] - k[0][1] * k[1][0];
  // alpha s^2 - beta s + gamma = 0, stable form
  const double disc = std::max(0.0, beta * beta - 4.0 * alpha * gamma);
  const double t = 0.5 * (beta + std::copysign(std::sqrt(disc), beta));
  std::array<double, 2> sigmas{t / alpha, t != 0.0 ? gamma / t : 0.0};
  std::sort(sigmas.begin(), sigmas.end());
  std::array<Root, 2> roots{};
  for (int i = 0; i < 2; ++i) {
    const double s = sigmas[i];
    const double n0[2] = {k[0][0] - s * bm[0][0], k[0][1] - s * bm[0][1]};
    const double n1[2] = {k[1][0] - s * bm[1][0], k[1][1] - s * bm[1][1]};
    const double* row = (std::hypot(n0[0], n0[1]) >= std::hypot(n1[0], n1[1])) ? n0 : n1;
    double a = row[1];
    double b = -row[0];
    if (a == 0.0 && b == 0.0) a = 1.0;
    roots[i] = {s, a, b};
  }
  return roots;
}

void sort_and_count(std::vector<Mode>& modes, int k) {
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& x, const Mode& y) { return x.sigma < y.sigma; });
  for (auto& mode : modes) {
    mode.multiplicity = static_cast<int>(std::count_if(modes.begin(), modes.end(), [&](const Mode& other) {
      return std::abs(other.sigma - mode.sigma) <= kMultiplicityTolerance * (1.0 + std::abs(mode.sigma));
    }));
  }
  if (static_cast<int>(modes.size()) > k) modes.resize(k);
}

void require_k(int k) {
  if (k < 1) throw std::invalid_argument("oracle mode count must be at least 1");
}

}  // namespace

const char* to_string(Geometry g) {
  switch (g) {
    case Geometry::disk:
      return "disk";
    case Geometry::annulus:
      return "annulus";
    case Geometry::cylinder:
      return "cylinder";
  }
  return "unknown";
}

double Mode::value(const Vec2& p) const {
  switch (kind) {
    case Kind::constant:
      return 1.0;
    case Kind::disk_power: {
      const std::complex<double> w = std::pow(std::complex<double>(p.x(), p.y()), m);
      return sine ? w.imag() : w.real();
    }
    case Kind::annulus_log:
      return a + b * std::log(p.norm() / outer_radius);
    case Kind::annulus_power: {
      const double s = p.norm();
      const double radial = a * std::pow(s / outer_radius, m) + b * std::pow(inner_radius / s, m);
      return radial * trig(sine, m * std::atan2(p.y(), p.x()));
    }
    case Kind::cylinder_z:
      return p.y();
    case Kind::cylinder_cosh:
      return std::cosh(m * p.y()) * trig(sine, m * p.x());
    case Kind::cylinder_sinh:
      return std::sinh(m * p.y()) * trig(sine, m * p.x());
  }
  return 0.0;
}

Vec2 Mode::gradient(const Vec2& p) const {
  switch (kind) {
    case Kind::constant:
      return Vec2::Zero();
    case Kind::disk_power: {
      // u = Re f or Im f with f = z^m analytic: grad Re f = (Re f', -Im f'), grad Im f = (Im f', Re f')
      const std::complex<double> df = static_cast<double>(m) * std::pow(std::complex<double>(p.x(), p.y()), m - 1);
      return sine ? Vec2(df.imag(), df.real()) : Vec2(df.real(), -df.imag());
    }
    case Kind::annulus_log:
      return (b / p.squaredNorm()) * p;
    case Kind::annulus_power: {
      const double s = p.norm();
      const double theta = std::atan2(p.y(), p.x());
      const double radial = a * std::pow(s / outer_radius, m) + b * std::pow(inner_radius / s, m);
      const double dradial = (m / s) * (a * std::pow(s / outer_radius, m) - b * std::pow(inner_radius / s, m));
      const Vec2 e_s = p / s;
      const Vec2 e_theta(-e_s.y(), e_s.x());
      return dradial * trig(sine, m * theta) * e_s + (radial * m * dtrig(sine, m * theta) / s) * e_theta;
    }
    case Kind::cylinder_z:
      return Vec2(0.0, 1.0);
    case Kind::cylinder_cosh:
      return Vec2(std::cosh(m * p.y()) * m * dtrig(sine, m * p.x()), m * std::sinh(m * p.y()) * trig(sine, m * p.x()));
    case Kind::cylinder_sinh:
      return Vec2(std::sinh(m * p.y()) * m * dtrig(sine, m * p.x()), m * std::cosh(m * p.y()) * trig(sine, m * p.x()));
  }
  return Vec2::Zero();
}

std::string Mode::describe() const {
  std::ostringstream os;
  os.precision(17);
  const char* t = sine ? "sin" : "cos";
  switch (kind) {
    case Kind::constant:
      os << "1";
      break;
    case Kind::disk_power:
      os << (sine ? "Im" : "Re") << "((x+iy)^" << m << ")";
      break;
    case Kind::annulus_log:
      os << a << " + " << b << " log(s/R)";
      break;
    case Kind::annulus_power:
      os << "(" << a << " (s/R)^" << m << " + " << b << " (r/s)^" << m << ") " << t << "(" << m << " theta)";
      break;
    case Kind::cylinder_z:
      os << "z";
      break;
    case Kind::cylinder_cosh:
      os << "cosh(" << m << " z) " << t << "(" << m << " theta)";
      break;
    case Kind::cylinder_sinh:
      os << "sinh(" << m << " z) " << t << "(" << m << " theta)";
      break;
  }
  return os.str();
}

std::vector<BoundarySample> AnalyticModel::boundary_samples(int per_component) const {
  std::vector<BoundarySample> samples;
  for (int i = 0; i < per_component; ++i) {
    const double theta = 2.0 * kPi * i / per_component;
    const Vec2 dir(std::cos(theta), std::sin(theta));
    switch (geometry) {
      case Geometry::disk:
        samples.push_back({outer_radius * dir, dir});
        break;
      case Geometry::annulus:
        samples.push_back({outer_radius * dir, dir});
        samples.push_back({inner_radius * dir, -dir});
        break;
      case Geometry::cylinder:
        samples.push_back({Vec2(theta, half_length), Vec2(0.0, 1.0)});
        samples.push_back({Vec2(theta, -half_length), Vec2(0.0, -1.0)});
        break;
    }
  }
  return samples;
}

double AnalyticModel::steklov_residual(int i, int per_component) const {
  const Mode& mode = modes.at(i);
  double worst = 0.0;
  for (const auto& s : boundary_samples(per_component)) {
    worst = std::max(worst, std::abs(mode.gradient(s.point).dot(s.normal) - mode.sigma * mode.value(s.point)));
  }
  return worst;
}

AnalyticModel disk_modes(int k) {
  require_k(k);
  AnalyticModel model;
  model.geometry = Geometry::disk;
  model.modes.push_back(Mode{.kind = Kind::constant, .sigma = 0.0});
  for (int m = 1; m <= k + 4; ++m) {
    for (bool sine : {false, true}) {
      model.modes.push_back(Mode{.kind = Kind::disk_power, .m = m, .sine = sine, .sigma = static_cast<double>(m)});
    }
  }
  sort_and_count(model.modes, k);
  return model;
}

AnalyticModel annulus_modes(double r, double R, int k) {
  require_k(k);
  if (!(r > 0.0 && r < R)) throw std::invalid_argument("annulus oracle requires 0 < r < R");
  AnalyticModel model;
  model.geometry = Geometry::annulus;
  model.inner_radius = r;
  model.outer_radius = R;
  auto push = [&](Mode mode) {
    mode.inner_radius = r;
    mode.outer_radius = R;
    // unit L2 norm on the boundary
    const double trig_mass = mode.m == 0 ? 2.0 * kPi : kPi;
    const double at_outer = (mode.kind == Kind::annulus_log) ? mode.a : mode.a + mode.b * std::pow(r / R, mode.m);
    const double at_inner = (mode.kind == Kind::annulus_log) ? mode.a + mode.b * std::log(r / R)
                                                             : mode.a * std::pow(r / R, mode.m) + mode.b;
    const double norm = std::sqrt(trig_mass * (R * at_outer * at_outer + r * at_inner * at_inner));
    const double sign = at_outer < 0.0 ? -1.0 : 1.0;
    mode.a *= sign / norm;
    mode.b *= sign / norm;
    model.modes.push_back(mode);
  };

  // m = 0: basis {1, log(s/R)}; rows are the Steklov conditions at s = R and s = r
  {
    const double log_ratio = std::log(r / R);
    const double kk[2][2] = {{0.0, 1.0 / R}, {0.0, -1.0 / r}};
    const double bb[2][2] = {{1.0, 0.0}, {1.0, log_ratio}};
    for (const auto& root : solve_pencil(kk, bb)) {
      if (std::abs(root.sigma) < 1e-14) {
        push(Mode{.kind = Kind::annulus_log, .a = 1.0, .b = 0.0, .sigma = 0.0});
      } else {
        push(Mode{.kind = Kind::annulus_log, .a = root.a, .b = root.b, .sigma = root.sigma});
      }
    }
  }
  // m >= 1: basis {(s/R)^m, (r/s)^m}
  for (int m = 1; m <= k + 4; ++m) {
    const double q = std::pow(r / R, m);
    const double kk[2][2] = {{m / R, -m * q / R}, {-m * q / r, m / r}};
    const double bb[2][2] = {{1.0, q}, {q, 1.0}};
    for (const auto& root : solve_pencil(kk, bb)) {
      for (bool sine : {false, true}) {
        push(Mode{.kind = Kind::annulus_power, .m = m, .sine = sine, .a = root.a, .b = root.b, .sigma = root.sigma});
      }
    }
  }
  sort_and_count(model.modes, k);
  return model;
}

AnalyticModel cylinder_modes(double T, int k) {
  require_k(k);
  if (!(T > 0.0)) throw std::invalid_argument("cylinder oracle requires T > 0");
  AnalyticModel model;
  model.geometry = Geometry::cylinder;
  model.half_length = T;
  model.modes.push_back(Mode{.kind = Kind::constant, .sigma = 0.0});
  model.modes.push_back(Mode{.kind = Kind::cylinder_z, .sigma = 1.0 / T});
  for (int m = 1; m <= k + 4; ++m) {
    for (bool sine : {false, true}) {
      model.modes.push_back(Mode{.kind = Kind::cylinder_cosh, .m = m, .sine = sine, .sigma = m * std::tanh(m * T)});
    }
    for (bool sine : {false, true}) {
      model.modes.push_back(Mode{.kind = Kind::cylinder_sinh, .m = m, .sine = sine, .sigma = m / std::tanh(m * T)});
    }
  }
  sort_and_count(model.modes, k);
  return model;
}

TStar tstar() {
  auto f = [](double t) { return t * std::tanh(t) - 1.0; };
  double lo = 0.5;
  double hi = 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  // one Newton polish: d/dT (T tanh T) = tanh T + T / cosh^2 T
  const double c = std::cosh(t);
  t -= f(t) / (std::tanh(t) + t / (c * c));
  return {t, f(t), std::sinh(t) - std::cosh(t) / t};
}

double cylinder_family_threshold() {
  const double t = tstar().value;
  return std::cosh(t) / t;
}

double cylinder_family_value(double c, const Vec2& p) { return std::cosh(p.y()) * std::cos(p.x()) + c * p.y(); }

std::vector<CriticalPoint> cylinder_family_critical_points(double c) {
  // d_theta u = -cosh z sin theta = 0  =>  theta in {0, pi}
  // d_z u = sinh z cos theta + c = 0   =>  sinh z = -c at theta = 0, sinh z = c at theta = pi
  const double t_star = tstar().value;
  const double threshold = std::cosh(t_star) / t_star;
  std::vector<CriticalPoint> points;
  const double excess = std::abs(c) - threshold;
  if (excess > 1e-12 * threshold) return points;
  const bool on_boundary = std::abs(excess) <= 1e-12 * threshold;
  for (double theta : {0.0, kPi}) {
    const double s = theta == 0.0 ? -c : c;
    const double z = on_boundary ? std::copysign(t_star, s) : std::asinh(s);
    CriticalPoint p;
    p.location = Vec2(theta, z);
    p.on_boundary = on_boundary;
    p.value = cylinder_family_value(c, p.location);
    // Hessian diag(-cosh z cos theta, cosh z cos theta): always indefinite
    p.index = on_boundary ? 0 : -1;
    p.classification = on_boundary ? "boundary_singular_zero" : "saddle";
    points.push_back(p);
  }
  return points;
}

std::vector<CriticalPoint> annulus_mode_saddles(const Mode& mode, double phase) {
  if (mode.kind != Kind::annulus_power || mode.m != 1) {
    throw std::invalid_argument("saddle formula applies to m = 1 annulus modes only");
  }
  std::vector<CriticalPoint> points;
  // d_s (a s/R + b r/s) = 0  =>  s^2 = b r R / a
  const double ratio = mode.b * mode.inner_radius * mode.outer_radius / mode.a;
  if (!(ratio > mode.inner_radius * mode.inner_radius && ratio < mode.outer_radius * mode.outer_radius)) return points;
  const double s = std::sqrt(ratio);
  for (double theta : {phase, phase + kPi}) {
    CriticalPoint p;
    p.location = Vec2(s * std::cos(theta), s * std::sin(theta));
    p.value = (mode.a * s / mode.outer_radius + mode.b * mode.inner_radius / s) * std::cos(theta - phase);
    p.index = -1;
    p.classification = "saddle";
    points.push_back(p);
  }
  return points;
}

namespace {

nlohmann::ordered_json point_json(const CriticalPoint& p) {
  nlohmann::ordered_json j;
  j["location"] = {p.location.x(), p.location.y()};
  j["on_boundary"] = p.on_boundary;
  j["index"] = p.index;
  j["value"] = p.value;
  j["classification"] = p.classification;
  return j;
}

}  // namespace

nlohmann::ordered_json dump(const AnalyticModel& model) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["geometry"] = to_string(model.geometry);
  auto& params = doc["parameters"] = nlohmann::ordered_json::object();
  switch (model.geometry) {
    case Geometry::disk:
      params["radius"] = model.outer_radius;
      break;
    case Geometry::annulus:
      params["r"] = model.inner_radius;
      params["R"] = model.outer_radius;
      break;
    case Geometry::cylinder:
      params["T"] = model.half_length;
      break;
  }
  auto& modes = doc["modes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model.modes.size(); ++i) {
    const auto& mode = model.modes[i];
    nlohmann::ordered_json entry;
    entry["k"] = static_cast<int>(i + 1);
    entry["sigma"] = mode.sigma;
    entry["multiplicity"] = mode.multiplicity;
    entry["eigenfunction"] = mode.describe();
    entry["steklov_residual"] = model.steklov_residual(static_cast<int>(i));
    auto& critical = entry["critical_points"] = nlohmann::ordered_json::array();
    if (mode.kind == Kind::annulus_power && mode.m == 1) {
      for (const auto& p : annulus_mode_saddles(mode, mode.sine ? 0.5 * kPi : 0.0)) critical.push_back(point_json(p));
    }
    modes.push_back(entry);
  }
  return doc;
}

nlohmann::ordered_json dump_cylinder_family(const std::vector<double>& coefficients) {
  const TStar t = tstar();
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["geometry"] = "cylinder";
  doc["T_star"] = t.value;
  doc["T_star_residual"] = t.residual;
  doc["sinh_identity_residual"] = t.sinh_identity;
  doc["threshold"] = cylinder_family_threshold();
  doc["eigenfunction"] = "cosh(z) cos(theta) + c z";
  doc["location_note"] =
      "critical points solve sin(theta) = 0; at |c| = threshold the singular boundary zeros sit at "
      "(theta, z) = (0, -sign(c) T*) and (pi, sign(c) T*). Locations (pi/2, +-T*), (3pi/2, -+T*) belong to "
      "the rotated eigenfunction cosh(z) sin(theta) + c z.";
  auto& family = doc["family"] = nlohmann::ordered_json::array();
  for (double c : coefficients) {
    nlohmann::ordered_json entry;
    entry["c"] = c;
    auto& points = entry["critical_points"] = nlohmann::ordered_json::array();
    for (const auto& p : cylinder_family_critical_points(c)) points.push_back(point_json(p));
    family.push_back(entry);
  }
  return doc;
}

}  // namespace steklov::oracle
