#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Eigenvalues within this relative gap form one multiplicity cluster.
inline constexpr double kClusterTolerance = 1e-6;

inline bool same_cluster(double a, double b) {
  return std::abs(a - b) <= kClusterTolerance * (1.0 + std::max(std::abs(a), std::abs(b)));
}

struct SteklovEigenpair {
  int index = 0;  // 1-based, ascending sigma
  double sigma = 0.0;
  Field u;                // harmonic extension over all DOFs
  Eigen::VectorXd trace;  // boundary values in DofPartition order
  int multiplicity = 1;   // size of the cluster containing sigma
  int cluster = 0;        // 1-based cluster id, shared within a cluster
  double residual = 0.0;  // |K u - sigma M u| / ((|K| + sigma |M|) |u|)
};

/// Discrete Dirichlet-to-Neumann operator S = K_bb - K_bi K_ii^{-1} K_ib on
/// boundary DOFs in DofPartition order.
struct DtnOperator {
  Eigen::MatrixXd matrix;
  InteriorSolver solver;

  const DofPartition& partition() const { return solver.partition(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix * f; }
};

DtnOperator build_dtn(const SurfaceMesh& mesh);

/// Boundary block of the weighted boundary mass matrix in DofPartition order.
Eigen::MatrixXd boundary_mass_block(const SurfaceMesh& mesh, const DofPartition& partition);

/// First k eigenpairs of S w = sigma M_bb w, extended harmonically.
std::vector<SteklovEigenpair> steklov_spectrum(const SurfaceMesh& mesh, int k);

/// Same problem solved on all DOFs: the pencil (K, M_b) is shifted to
/// (K + M_b) u = (1 + sigma) M_b u and restricted to the range of M_b
/// through a factorization of the full matrix, never touching K_ii alone.
std::vector<SteklovEigenpair> crosscheck_generalized(const SurfaceMesh& mesh, int k);

/// Multiplies the metric of each triangle by (1 + amplitude * xi_t) with xi_t
/// uniform in [-1, 1] from a seeded mt19937_64. amplitude must lie in [0, 0.5).
SurfaceMesh perturb_metric(const SurfaceMesh& mesh, double amplitude, std::uint64_t seed);

/// Relative residual of (sigma, u) for the pencil (K, M_b).
double eigen_residual(const SparseSymmetricMatrix& stiffness, const SparseSymmetricMatrix& mass, double sigma,
                      const Field& u);

/// CSV with header "k,sigma,multiplicity,residual".
void write_spectrum_csv(const std::vector<SteklovEigenpair>& pairs, std::ostream& out);

}  // namespace steklov
