#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "steklov/mesh.hpp"

namespace steklov {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric sparse matrix over mesh DOFs (both triangles stored).
struct SparseSymmetricMatrix {
  SparseMatrix matrix;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  /// Maximum absolute row sum.
  double norm_inf() const;
  /// Coordinate text: "row col value" per stored upper-triangle entry, 17 significant digits.
  void write_coordinate(std::ostream& out) const;
};

/// Boundary DOFs in boundary traversal order, then interior DOFs ascending.
struct DofPartition {
  std::vector<int> boundary;
  std::vector<int> interior;
  std::vector<int> slot;  // slot[dof]: position within boundary or interior list

  static DofPartition of(const SurfaceMesh& mesh);
  int num_boundary() const { return static_cast<int>(boundary.size()); }
  int num_interior() const { return static_cast<int>(interior.size()); }
};

/// Element stiffness of one triangle for the constant metric g, exact for P1.
Eigen::Matrix3d element_stiffness(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Metric& g);

/// Dirichlet energy form; throws MeshError on degenerate triangles.
SparseSymmetricMatrix assemble_stiffness(const SurfaceMesh& mesh);

/// Weighted boundary mass form; zero rows at interior DOFs.
SparseSymmetricMatrix assemble_boundary_mass(const SurfaceMesh& mesh);

/// Blocks of the stiffness matrix split by a DofPartition.
struct StiffnessBlocks {
  SparseMatrix bb;
  SparseMatrix bi;
  SparseMatrix ii;
};
StiffnessBlocks split_stiffness(const SparseMatrix& stiffness, const DofPartition& partition);

/// Factorized interior block K_ii, reusable across right-hand sides.
class InteriorSolver {
 public:
  explicit InteriorSolver(const SurfaceMesh& mesh);
  InteriorSolver(const SparseMatrix& stiffness, DofPartition partition);

  const DofPartition& partition() const { return partition_; }
  const StiffnessBlocks& blocks() const { return blocks_; }

  /// Full field with the given boundary values (in partition order) and
  /// discrete-harmonic interior values.
  Field extend(const Eigen::VectorXd& boundary_values) const;

  /// Solves K_ii X = rhs.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  DofPartition partition_;
  StiffnessBlocks blocks_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

/// Harmonic extension of boundary values `f` given per boundary DOF in
/// partition order.
Field harmonic_extension(const SurfaceMesh& mesh, const Eigen::VectorXd& f);

/// Restriction of a DOF field to the boundary, in partition order.
Eigen::VectorXd boundary_trace(const DofPartition& partition, const Field& u);

}  // namespace steklov
