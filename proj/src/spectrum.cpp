#include "steklov/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace steklov {

namespace {

constexpr int kSolveBlock = 64;

void require_count(int k, int available) {
  if (k < 1 || k > available) {
    throw std::invalid_argument("requested " + std::to_string(k) + " eigenpairs but only " +
                                std::to_string(available) + " boundary DOFs are available");
  }
}

// Cluster ids and sizes over the full (sorted) eigenvalue list.
void assign_clusters(const Eigen::VectorXd& sigmas, std::vector<int>& cluster, std::vector<int>& size) {
  const int n = static_cast<int>(sigmas.size());
  cluster.assign(n, 0);
  int id = 0;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || !same_cluster(sigmas[i - 1], sigmas[i])) ++id;
    cluster[i] = id;
  }
  size.assign(id + 1, 0);
  for (int c : cluster) ++size[c];
}

// Orders, M_b-orthonormalizes within clusters, fixes signs and records residuals.
std::vector<SteklovEigenpair> finalize(const DofPartition& partition,
                                       const SparseSymmetricMatrix& stiffness, const SparseSymmetricMatrix& mass,
                                       const Eigen::VectorXd& all_sigmas, const Eigen::MatrixXd& fields, int k) {
  std::vector<int> cluster;
  std::vector<int> size;
  assign_clusters(all_sigmas, cluster, size);

  std::vector<SteklovEigenpair> pairs(k);
  for (int i = 0; i < k; ++i) {
    pairs[i].index = i + 1;
    pairs[i].sigma = all_sigmas[i];
    pairs[i].cluster = cluster[i];
    pairs[i].multiplicity = size[cluster[i]];
    pairs[i].u = fields.col(i);
  }
  // modified Gram-Schmidt in the M_b inner product, restarted per cluster
  for (int i = 0; i < k; ++i) {
    Field& u = pairs[i].u;
    for (int j = 0; j < i; ++j) {
      if (pairs[j].cluster != pairs[i].cluster) continue;
      u -= (pairs[j].u.dot(mass.matrix * u)) * pairs[j].u;
    }
    const double norm = std::sqrt(u.dot(mass.matrix * u));
    if (!(norm > 0.0)) throw std::runtime_error("internal error: eigenvector with zero boundary norm");
    u /= norm;
  }
  for (auto& pair : pairs) {
    pair.trace = boundary_trace(partition, pair.u);
    const double scale = pair.trace.cwiseAbs().maxCoeff();
    for (int i = 0; i < pair.trace.size(); ++i) {
      if (std::abs(pair.trace[i]) > 1e-8 * scale) {
        if (pair.trace[i] < 0.0) {
          pair.u = -pair.u;
          pair.trace = -pair.trace;
        }
        break;
      }
    }
    pair.residual = eigen_residual(stiffness, mass, pair.sigma, pair.u);
  }
  return pairs;
}

}  // namespace

Eigen::MatrixXd boundary_mass_block(const SurfaceMesh& mesh, const DofPartition& partition) {
  const auto mass = assemble_boundary_mass(mesh);
  const int nb = partition.num_boundary();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nb, nb);
  for (int k = 0; k < mass.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mass.matrix, k); it; ++it) {
      block(partition.slot[it.row()], partition.slot[it.col()]) += it.value();
    }
  }
  return block;
}

DtnOperator build_dtn(const SurfaceMesh& mesh) {
  if (mesh.closed()) throw MeshError("Dirichlet-to-Neumann operator needs a mesh with boundary");
  InteriorSolver solver(mesh);
  const auto& blocks = solver.blocks();
  const int nb = solver.partition().num_boundary();
  Eigen::MatrixXd s = Eigen::MatrixXd(blocks.bb);
  if (solver.partition().num_interior() > 0) {
    const SparseMatrix ib = blocks.bi.transpose();
    for (int c0 = 0; c0 < nb; c0 += kSolveBlock) {
      const int width = std::min(kSolveBlock, nb - c0);
      const Eigen::MatrixXd rhs = Eigen::MatrixXd(ib.middleCols(c0, width));
      const Eigen::MatrixXd x = solver.solve(rhs);
      s.middleCols(c0, width) -= blocks.bi * x;
    }
  }
  return DtnOperator{std::move(s), std::move(solver)};
}

double eigen_residual(const SparseSymmetricMatrix& stiffness, const SparseSymmetricMatrix& mass, double sigma,
                      const Field& u) {
  const Eigen::VectorXd r = stiffness.matrix * u - sigma * (mass.matrix * u);
  const double denom = (stiffness.norm_inf() + std::abs(sigma) * mass.norm_inf()) * u.norm();
  return denom > 0.0 ? r.norm() / denom : r.norm();
}

std::vector<SteklovEigenpair> steklov_spectrum(const SurfaceMesh& mesh, int k) {
  const DtnOperator dtn = build_dtn(mesh);
  const auto& partition = dtn.partition();
  require_count(k, partition.num_boundary());

  const Eigen::MatrixXd mbb = boundary_mass_block(mesh, partition);
  const Eigen::MatrixXd s = 0.5 * (dtn.matrix + dtn.matrix.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, mbb,
                                                                   Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense symmetric eigensolver did not converge");

  Eigen::MatrixXd fields(mesh.num_dofs(), k);
  for (int i = 0; i < k; ++i) fields.col(i) = dtn.solver.extend(solver.eigenvectors().col(i));
  return finalize(partition, assemble_stiffness(mesh), assemble_boundary_mass(mesh), solver.eigenvalues(),
                  fields, k);
}

std::vector<SteklovEigenpair> crosscheck_generalized(const SurfaceMesh& mesh, int k) {
  if (mesh.closed()) throw MeshError("Steklov problem needs a mesh with boundary");
  const DofPartition partition = DofPartition::of(mesh);
  require_count(k, partition.num_boundary());
  const auto stiffness = assemble_stiffness(mesh);
  const auto mass = assemble_boundary_mass(mesh);
  const int n = mesh.num_dofs();
  const int nb = partition.num_boundary();

  const SparseMatrix shifted = stiffness.matrix + mass.matrix;
  Eigen::SimplicialLLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw std::runtime_error("internal error: K + M_b is not positive definite");

  const Eigen::MatrixXd mbb = boundary_mass_block(mesh, partition);
  const Eigen::LLT<Eigen::MatrixXd> mass_factor(mbb);
  if (mass_factor.info() != Eigen::Success) throw std::runtime_error("internal error: boundary mass is singular");
  const Eigen::MatrixXd lm = mass_factor.matrixL();

  // Boundary block of (K + M_b)^{-1}.
  Eigen::MatrixXd inverse_bb(nb, nb);
  for (int c0 = 0; c0 < nb; c0 += kSolveBlock) {
    const int width = std::min(kSolveBlock, nb - c0);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, width);
    for (int c = 0; c < width; ++c) rhs(partition.boundary[c0 + c], c) = 1.0;
    const Eigen::MatrixXd x = factor.solve(rhs);
    for (int r = 0; r < nb; ++r) inverse_bb.block(r, c0, 1, width) = x.row(partition.boundary[r]);
  }
  Eigen::MatrixXd reduced = lm.transpose() * inverse_bb * lm;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense symmetric eigensolver did not converge");

  // mu = 1 / (1 + sigma): largest mu first
  Eigen::VectorXd sigmas(nb);
  for (int i = 0; i < nb; ++i) sigmas[i] = 1.0 / solver.eigenvalues()[nb - 1 - i] - 1.0;

  Eigen::MatrixXd fields(n, k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd y = lm * solver.eigenvectors().col(nb - 1 - i);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < nb; ++r) rhs[partition.boundary[r]] = y[r];
    fields.col(i) = factor.solve(rhs);
  }
  return finalize(partition, stiffness, mass, sigmas, fields, k);
}

SurfaceMesh perturb_metric(const SurfaceMesh& mesh, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 0.5)) throw std::invalid_argument("perturbation amplitude must lie in [0, 0.5)");
  std::mt19937_64 engine(seed);
  MeshData data = mesh.data();
  for (auto& g : data.metric) {
    // 53 random bits mapped to [-1, 1); avoids implementation-defined distributions
    const double xi = 2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0;
    g = g.scaled(1.0 + amplitude * xi);
  }
  return SurfaceMesh::create(std::move(data));
}

void write_spectrum_csv(const std::vector<SteklovEigenpair>& pairs, std::ostream& out) {
  out << "k,sigma,multiplicity,residual\n";
  char line[128];
  for (const auto& p : pairs) {
    std::snprintf(line, sizeof line, "%d,%.17g,%d,%.17g\n", p.index, p.sigma, p.multiplicity, p.residual);
    out << line;
  }
}

}  // namespace steklov
