#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace steklov {

using Vec2 = Eigen::Vector2d;

/// Scalar field sampled at mesh DOFs (vertices after identification).
using Field = Eigen::VectorXd;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constant symmetric 2x2 metric tensor expressed in a triangle's parameter frame.
struct Metric {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;

  double det() const { return g11 * g22 - g12 * g12; }
  double trace() const { return g11 + g22; }
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d g;
    g << g11, g12, g12, g22;
    return g;
  }
  Metric scaled(double factor) const { return {factor * g11, factor * g12, factor * g22}; }
  bool operator==(const Metric&) const = default;
};

/// One closed boundary curve, oriented with the surface on its left.
struct BoundaryComponent {
  std::vector<int> dofs;
  // edge_lengths[i] is the metric length of the edge dofs[i] -> dofs[i + 1 mod n]
  std::vector<double> edge_lengths;

  int size() const { return static_cast<int>(dofs.size()); }
  double length() const;
};

/// Raw mesh description as read from disk or produced by a generator.
struct MeshData {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Metric> metric;                      // empty: identity on every triangle
  std::vector<std::pair<int, int>> identifications;
  std::vector<double> rho;                         // per raw vertex; empty: 1 everywhere
  std::string label;
};

/// Oriented triangle mesh with optional periodic identifications.
///
/// Raw vertices carry coordinates; vertices glued by identifications share one
/// degree of freedom (DOF). DOFs are numbered by their smallest raw vertex, so a
/// mesh without identifications has dof(v) == v. Every topological query works
/// on DOFs. Instances are immutable and validated on construction.
class SurfaceMesh {
 public:
  /// Validates every structural invariant and throws MeshError naming the
  /// first violation.
  static SurfaceMesh create(MeshData data);

  const std::string& label() const { return data_.label; }
  const std::vector<Vec2>& vertices() const { return data_.vertices; }
  const std::vector<std::array<int, 3>>& triangles() const { return data_.triangles; }
  const std::vector<Metric>& metric() const { return data_.metric; }
  const std::vector<std::pair<int, int>>& identifications() const { return data_.identifications; }
  const std::vector<double>& rho() const { return data_.rho; }
  const MeshData& data() const { return data_; }

  int num_vertices() const { return static_cast<int>(data_.vertices.size()); }
  int num_triangles() const { return static_cast<int>(data_.triangles.size()); }
  int num_dofs() const { return static_cast<int>(representative_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  int dof(int raw_vertex) const { return dof_of_[raw_vertex]; }
  int representative(int dof) const { return representative_[dof]; }
  const Vec2& position(int dof) const { return data_.vertices[representative_[dof]]; }
  std::array<int, 3> triangle_dofs(int t) const;

  /// Unique undirected edges as sorted DOF pairs.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }

  bool is_boundary(int dof) const { return on_boundary_[dof] != 0; }
  bool closed() const { return boundary_.empty(); }
  const std::vector<BoundaryComponent>& boundary() const { return boundary_; }
  int num_boundary_dofs() const;

  /// Ordered one-ring of a DOF, counterclockwise. Interior DOFs get a closed
  /// cycle; boundary DOFs get a path running from the next boundary vertex to
  /// the previous one.
  const std::vector<int>& link(int dof) const { return links_[dof]; }

  /// Boundary weight rho at a DOF (taken from its representative vertex).
  double boundary_weight(int dof) const { return data_.rho[representative_[dof]]; }

  /// Signed parameter-space area of triangle t (positive when counterclockwise).
  double signed_area(int t) const;

  /// Longest Euclidean parameter-space edge.
  double max_edge_length() const;

 private:
  SurfaceMesh() = default;

  MeshData data_;
  std::vector<int> dof_of_;
  std::vector<int> representative_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<char> on_boundary_;
  std::vector<BoundaryComponent> boundary_;
  std::vector<std::vector<int>> links_;
};

/// V - E + F counted on DOFs.
int euler_characteristic(const SurfaceMesh& mesh);

/// Boundary loops, each starting at its smallest DOF, sorted by that DOF.
const std::vector<BoundaryComponent>& boundary_components(const SurfaceMesh& mesh);

/// Throws MeshError unless every triangle has positive parameter-space area.
void require_counterclockwise(const SurfaceMesh& mesh);

// Model geometries. Resolution minima keep every link a valid cycle with at
// least 8 angular samples on each boundary circle.

/// Unit-spaced concentric rings: `rings` rings, ring i carries 6 i vertices.
/// Requires rings >= 2.
SurfaceMesh generate_disk(double radius, int rings);

/// Staggered polar grid with `angular` samples per circle and logarithmic
/// radial spacing matched to the angular step. Requires angular >= 8.
SurfaceMesh generate_annulus(double inner_radius, double outer_radius, int angular);

/// Flat cylinder S^1 x [-T, T] as the rectangle [0, 2 pi] x [-T, T] with the
/// theta seam identified. Requires angular >= 8.
SurfaceMesh generate_cylinder(double half_length, int angular);

/// Two copies of the mesh glued along the boundary. The first copy keeps the
/// original DOF numbering; the second copy has reversed orientation and its
/// interior DOFs follow after the original ones.
SurfaceMesh double_mesh(const SurfaceMesh& mesh);

/// Even reflection of a field on `mesh` onto its double.
Field reflect_function(const SurfaceMesh& mesh, const SurfaceMesh& doubled, const Field& u);

/// Maps each DOF of a double built by double_mesh back to the DOF of the
/// original mesh it mirrors.
std::vector<int> double_source_dofs(const SurfaceMesh& mesh, const SurfaceMesh& doubled);

}  // namespace steklov
