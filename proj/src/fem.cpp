#include "steklov/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <Eigen/LU>

namespace steklov {

double SparseSymmetricMatrix::norm_inf() const {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix.rows());
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

void SparseSymmetricMatrix::write_coordinate(std::ostream& out) const {
  char line[96];
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      if (it.row() > it.col()) continue;
      std::snprintf(line, sizeof line, "%d %d %.17g\n", static_cast<int>(it.row()), static_cast<int>(it.col()),
                    it.value());
      out << line;
    }
  }
}

DofPartition DofPartition::of(const SurfaceMesh& mesh) {
  DofPartition p;
  p.slot.assign(mesh.num_dofs(), -1);
  for (const auto& loop : mesh.boundary()) {
    for (int d : loop.dofs) {
      p.slot[d] = static_cast<int>(p.boundary.size());
      p.boundary.push_back(d);
    }
  }
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    if (mesh.is_boundary(d)) continue;
    p.slot[d] = static_cast<int>(p.interior.size());
    p.interior.push_back(d);
  }
  return p;
}

Eigen::Matrix3d element_stiffness(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Metric& g) {
  Eigen::Matrix2d edges;
  edges.col(0) = p1 - p0;
  edges.col(1) = p2 - p0;
  const double jac = edges.determinant();
  if (!(std::abs(jac) > 0.0)) throw MeshError("degenerate triangle in stiffness assembly");
  // Parameter gradients of the barycentric coordinates: rows of [-1 -1; 1 0; 0 1] * E^{-1}.
  Eigen::Matrix<double, 3, 2> ref;
  ref << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix<double, 3, 2> grads = ref * edges.inverse();
  const double area = 0.5 * std::abs(jac) * std::sqrt(g.det());
  return area * grads * g.matrix().inverse() * grads.transpose();
}

SparseSymmetricMatrix assemble_stiffness(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& x = mesh.vertices();
    Eigen::Matrix3d local;
    try {
      local = element_stiffness(x[tri[0]], x[tri[1]], x[tri[2]], mesh.metric()[t]);
    } catch (const MeshError&) {
      throw MeshError("triangle " + std::to_string(t) + " is degenerate (zero area)");
    }
    const auto dofs = mesh.triangle_dofs(t);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) triplets.emplace_back(dofs[a], dofs[b], local(a, b));
    }
  }
  // setFromTriplets sums duplicates in a fixed order, so assembly is deterministic.
  SparseSymmetricMatrix k;
  k.matrix.resize(mesh.num_dofs(), mesh.num_dofs());
  k.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

SparseSymmetricMatrix assemble_boundary_mass(const SurfaceMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& loop : mesh.boundary()) {
    const int n = loop.size();
    for (int i = 0; i < n; ++i) {
      const int a = loop.dofs[i];
      const int b = loop.dofs[(i + 1) % n];
      const double rho = 0.5 * (mesh.boundary_weight(a) + mesh.boundary_weight(b));
      if (!(rho > 0.0)) throw MeshError("rho must be positive on the boundary");
      const double w = rho * loop.edge_lengths[i] / 6.0;
      triplets.emplace_back(a, a, 2.0 * w);
      triplets.emplace_back(b, b, 2.0 * w);
      triplets.emplace_back(a, b, w);
      triplets.emplace_back(b, a, w);
    }
  }
  SparseSymmetricMatrix m;
  m.matrix.resize(mesh.num_dofs(), mesh.num_dofs());
  m.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

StiffnessBlocks split_stiffness(const SparseMatrix& stiffness, const DofPartition& partition) {
  std::vector<Eigen::Triplet<double>> bb;
  std::vector<Eigen::Triplet<double>> bi;
  std::vector<Eigen::Triplet<double>> ii;
  const auto& slot = partition.slot;
  std::vector<char> boundary(stiffness.rows(), 0);
  for (int d : partition.boundary) boundary[d] = 1;
  for (int k = 0; k < stiffness.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(stiffness, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (boundary[r] && boundary[c]) {
        bb.emplace_back(slot[r], slot[c], it.value());
      } else if (boundary[r]) {
        bi.emplace_back(slot[r], slot[c], it.value());
      } else if (!boundary[c]) {
        ii.emplace_back(slot[r], slot[c], it.value());
      }
    }
  }
  StiffnessBlocks blocks;
  const int nb = partition.num_boundary();
  const int ni = partition.num_interior();
  blocks.bb.resize(nb, nb);
  blocks.bb.setFromTriplets(bb.begin(), bb.end());
  blocks.bi.resize(nb, ni);
  blocks.bi.setFromTriplets(bi.begin(), bi.end());
  blocks.ii.resize(ni, ni);
  blocks.ii.setFromTriplets(ii.begin(), ii.end());
  return blocks;
}

InteriorSolver::InteriorSolver(const SurfaceMesh& mesh)
    : InteriorSolver(assemble_stiffness(mesh).matrix, DofPartition::of(mesh)) {}

InteriorSolver::InteriorSolver(const SparseMatrix& stiffness, DofPartition partition)
    : partition_(std::move(partition)),
      blocks_(split_stiffness(stiffness, partition_)),
      factor_(std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>()) {
  if (partition_.num_boundary() == 0) throw MeshError("harmonic extension needs a nonempty boundary");
  if (partition_.num_interior() > 0) {
    factor_->compute(blocks_.ii);
    if (factor_->info() != Eigen::Success) {
      throw std::runtime_error("internal error: interior stiffness block is singular");
    }
  }
}

Eigen::MatrixXd InteriorSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (partition_.num_interior() == 0) return Eigen::MatrixXd(0, rhs.cols());
  Eigen::MatrixXd x = factor_->solve(rhs);
  if (factor_->info() != Eigen::Success) throw std::runtime_error("internal error: interior solve failed");
  return x;
}

Field InteriorSolver::extend(const Eigen::VectorXd& boundary_values) const {
  if (boundary_values.size() != partition_.num_boundary()) {
    throw std::invalid_argument("boundary data has " + std::to_string(boundary_values.size()) + " values, expected " +
                                std::to_string(partition_.num_boundary()));
  }
  Field u(partition_.slot.size());
  for (int i = 0; i < partition_.num_boundary(); ++i) u[partition_.boundary[i]] = boundary_values[i];
  if (partition_.num_interior() > 0) {
    const Eigen::VectorXd rhs = -(blocks_.bi.transpose() * boundary_values);
    const Eigen::VectorXd interior = solve(rhs);
    for (int i = 0; i < partition_.num_interior(); ++i) u[partition_.interior[i]] = interior[i];
  }
  return u;
}

Field harmonic_extension(const SurfaceMesh& mesh, const Eigen::VectorXd& f) {
  if (!f.allFinite()) throw std::invalid_argument("boundary data must be finite");
  return InteriorSolver(mesh).extend(f);
}

Eigen::VectorXd boundary_trace(const DofPartition& partition, const Field& u) {
  Eigen::VectorXd trace(partition.num_boundary());
  for (int i = 0; i < partition.num_boundary(); ++i) trace[i] = u[partition.boundary[i]];
  return trace;
}

}  // namespace steklov
