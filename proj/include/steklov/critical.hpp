#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/mesh.hpp"

namespace steklov {

/// Default snapping tolerance, relative to the sup-norm of the field (or trace).
inline constexpr double kDefaultZeroTol = 1e-7;

enum class PointKind { interior, boundary_trace, boundary_singular_zero };
enum class Classification { minimum, maximum, saddle, degenerate };

const char* to_string(PointKind kind);
const char* to_string(Classification c);

struct CriticalPoint {
  int dof = -1;
  Vec2 location = Vec2::Zero();
  PointKind kind = PointKind::interior;
  int index = 0;
  int link_sign_changes = 0;
  double value = 0.0;
  Classification classification = Classification::degenerate;
  int loop = -1;  // boundary component for boundary kinds
};

/// Strict total order on DOFs used for PL link counting. Values are
/// quantized to bins of width zero_tol * max|u|; equal bins are ordered by the
/// tie-break key (DOF index by default). Being a total order, it makes the PL
/// index sum on a closed mesh exactly the Euler characteristic.
class VertexOrder {
 public:
  VertexOrder(const Field& u, double zero_tol, std::vector<std::int64_t> tiebreak = {});

  bool above(int w, int v) const {
    return bin_[w] != bin_[v] ? bin_[w] > bin_[v] : key_[w] > key_[v];
  }
  double scale() const { return scale_; }
  /// True when every value falls in one bin.
  bool constant() const;

 private:
  std::vector<std::int64_t> bin_;
  std::vector<std::int64_t> key_;
  double scale_ = 1.0;
};

/// Sign changes of (u(w) - u(v)) around the ordered link of v (cyclic for
/// interior DOFs, along the path for boundary DOFs).
int link_sign_changes(const SurfaceMesh& mesh, const VertexOrder& order, int dof);

/// Interior DOFs whose link shows a sign-change count other than 2.
std::vector<CriticalPoint> interior_critical_points(const SurfaceMesh& mesh, const Field& u,
                                                    double zero_tol = kDefaultZeroTol);

/// Sum of 1 - sc/2 over all DOFs of a closed mesh.
int pl_index_sum(const SurfaceMesh& mesh, const Field& u, double zero_tol = kDefaultZeroTol,
                 std::vector<std::int64_t> tiebreak = {});

struct TraceExtrema {
  std::vector<CriticalPoint> points;  // kind boundary_trace, index +1 (min) / -1 (max)
  std::vector<int> degenerate_loops;  // loops whose trace is constant
};

/// Local extrema of the trace along each boundary loop; a maximal constant
/// run (consecutive steps within zero_tol * |trace|_inf) is one point at its
/// first vertex.
TraceExtrema boundary_trace_extrema(const SurfaceMesh& mesh, const Field& u, double zero_tol = kDefaultZeroTol);

struct NegativeArc {
  int first_dof = -1;
  int last_dof = -1;
  int length = 0;          // vertices in the arc
  bool full_loop = false;  // chi 0 instead of 1
};

struct LoopSigns {
  int crossings = 0;  // transversal zero crossings, always even
  int ell = 0;        // crossings / 2
  std::vector<NegativeArc> negative;
  bool degenerate = false;  // whole loop snapped to zero
  int snapped = 0;          // vertices snapped to zero
  double margin = 1.0;      // min |u| / |trace|_inf over unsnapped vertices
  bool near_threshold = false;
};

struct BoundarySignData {
  std::vector<LoopSigns> loops;
  int chi_negative = 0;  // chi of {u < 0} on the boundary: number of arc components
  int sum_ell = 0;
  int changing_loops = 0;  // L: loops with ell > 0
  double threshold = 0.0;  // absolute snapping threshold used
  bool degenerate() const;
};

/// Sign pattern of one cyclic sequence. Values with |v| <= threshold count as
/// zero, as do positions flagged in forced_zero. A zero run between opposite
/// signs is one crossing; between equal signs it is a tangential touch and
/// takes that sign.
LoopSigns classify_loop_signs(std::span<const double> values, double threshold,
                              std::span<const char> forced_zero = {}, std::span<const int> dofs = {});

/// Sign-change data on every boundary loop. DOFs listed in forced_zero are
/// treated as zeros (used for singular boundary zeros).
BoundarySignData boundary_sign_changes(const SurfaceMesh& mesh, const Field& u, double zero_tol = kDefaultZeroTol,
                                       std::span<const int> forced_zero = {});

/// Boundary vertices where the trace and its tangential derivative vanish and
/// a nodal segment of u enters the interior from the vertex's one-ring.
std::vector<CriticalPoint> boundary_singular_zeros(const SurfaceMesh& mesh, const Field& u,
                                                   double zero_tol = kDefaultZeroTol);

struct NodalSegment {
  Vec2 a;
  Vec2 b;
};

/// Zero level set of the PL interpolant as segments in parameter coordinates.
/// Zero vertex values count as positive.
std::vector<NodalSegment> nodal_segments(const SurfaceMesh& mesh, const Field& u);

nlohmann::ordered_json to_json(const CriticalPoint& p);
nlohmann::ordered_json to_json(const std::vector<CriticalPoint>& points);

}  // namespace steklov
