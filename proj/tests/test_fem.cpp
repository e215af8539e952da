#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "steklov/fem.hpp"

using namespace steklov;

namespace {

// Stiffness of the mesh gathered into a dense matrix.
Eigen::MatrixXd dense(const SparseSymmetricMatrix& m) { return Eigen::MatrixXd(m.matrix); }

SurfaceMesh with_metric(const SurfaceMesh& mesh, const Metric& g) {
  MeshData d = mesh.data();
  d.metric.assign(mesh.num_triangles(), g);
  return SurfaceMesh::create(std::move(d));
}

Eigen::VectorXd boundary_values(const DofPartition& p, const SurfaceMesh& m, double (*f)(const Vec2&)) {
  Eigen::VectorXd v(p.num_boundary());
  for (int i = 0; i < p.num_boundary(); ++i) v[i] = f(m.position(p.boundary[i]));
  return v;
}

double max_log_error(int angular) {
  const auto m = generate_annulus(0.5, 1.0, angular);
  const auto p = DofPartition::of(m);
  const Field u = harmonic_extension(m, boundary_values(p, m, [](const Vec2& x) { return std::log(x.norm()); }));
  double err = 0.0;
  for (int d = 0; d < m.num_dofs(); ++d) err = std::max(err, std::abs(u[d] - std::log(m.position(d).norm())));
  return err;
}

}  // namespace

TEST_SUITE("fem") {
  TEST_CASE("right triangle element matrix by hand") {
    // gradients of the hat functions: (-1,-1), (1,0), (0,1); area 1/2
    const Eigen::Matrix3d k = element_stiffness({0, 0}, {1, 0}, {0, 1}, Metric{});
    Eigen::Matrix3d expected;
    expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    CHECK((k - expected).norm() < 1e-15);
  }

  TEST_CASE("anisotropic metric equals the stretched Euclidean triangle") {
    // g = diag(4, 1) is the pullback of the Euclidean metric under (x, y) -> (2x, y)
    const Vec2 a(0.1, 0.2), b(0.9, 0.3), c(0.4, 1.1);
    const Eigen::Matrix3d k = element_stiffness(a, b, c, Metric{4, 0, 1});
    const auto stretch = [](const Vec2& p) { return Vec2(2 * p.x(), p.y()); };
    const Eigen::Matrix3d e = element_stiffness(stretch(a), stretch(b), stretch(c), Metric{});
    CHECK((k - e).norm() < 1e-14);
  }

  TEST_CASE("constants lie in the kernel and the matrix is symmetric") {
    for (const auto& m : {generate_disk(1.0, 8), generate_annulus(0.5, 1.0, 24), generate_cylinder(0.7, 16)}) {
      const auto k = dense(assemble_stiffness(m));
      CHECK((k - k.transpose()).norm() < 1e-13);
      CHECK((k * Eigen::VectorXd::Ones(k.rows())).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("conformal rescaling leaves the stiffness unchanged") {
    const auto m = generate_annulus(0.5, 1.0, 16);
    const auto k0 = dense(assemble_stiffness(m));
    const auto k1 = dense(assemble_stiffness(with_metric(m, Metric{3, 0, 3})));
    CHECK((k0 - k1).norm() < 1e-12 * k0.norm());
  }

  TEST_CASE("boundary mass integrates rho along the boundary") {
    const auto disk = generate_disk(1.0, 40);
    const auto mass = dense(assemble_boundary_mass(disk));
    const double total = Eigen::VectorXd::Ones(mass.rows()).dot(mass * Eigen::VectorXd::Ones(mass.rows()));
    CHECK(total == doctest::Approx(disk.boundary()[0].length()).epsilon(1e-13));
    CHECK(std::abs(total - 2 * std::numbers::pi) < 1e-3);

    MeshData d = disk.data();
    d.rho.assign(disk.num_vertices(), 2.5);
    const auto weighted = dense(assemble_boundary_mass(SurfaceMesh::create(std::move(d))));
    CHECK((weighted - 2.5 * mass).norm() < 1e-13);
  }

  TEST_CASE("cylinder boundary mass sees both circles with seam") {
    const auto c = generate_cylinder(1.0, 32);
    const auto mass = dense(assemble_boundary_mass(c));
    const double total = Eigen::VectorXd::Ones(mass.rows()).dot(mass * Eigen::VectorXd::Ones(mass.rows()));
    CHECK(total == doctest::Approx(4 * std::numbers::pi));
  }

  TEST_CASE("partition lists boundary loops first") {
    const auto m = generate_annulus(0.5, 1.0, 16);
    const auto p = DofPartition::of(m);
    CHECK(p.num_boundary() == 32);
    CHECK(p.num_boundary() + p.num_interior() == m.num_dofs());
    for (int i = 0; i < p.num_boundary(); ++i) CHECK(p.slot[p.boundary[i]] == i);
    for (int d : p.interior) CHECK_FALSE(m.is_boundary(d));
  }

  TEST_CASE("harmonic extension reproduces linear functions") {
    const auto m = generate_disk(1.0, 12);
    const auto p = DofPartition::of(m);
    const Field u = harmonic_extension(m, boundary_values(p, m, [](const Vec2& x) { return x.x() - 2 * x.y(); }));
    for (int d = 0; d < m.num_dofs(); ++d) CHECK(std::abs(u[d] - (m.position(d).x() - 2 * m.position(d).y())) < 1e-10);
    CHECK((boundary_trace(p, u) - boundary_values(p, m, [](const Vec2& x) { return x.x() - 2 * x.y(); })).norm() ==
          0.0);
  }

  TEST_CASE("annulus log profile is reproduced at the nodes") {
    // the grid is self-similar under s -> q s, so log s solves the discrete equations exactly
    CHECK(max_log_error(32) < 1e-12);
    CHECK(max_log_error(64) < 1e-12);
  }

  TEST_CASE("coordinate output writes the upper triangle column by column") {
    // the right angle at vertex 0 gives a stored zero on edge (1, 2)
    const auto m = SurfaceMesh::create(MeshData{{{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {}, {}, {}, ""});
    std::ostringstream os;
    assemble_stiffness(m).write_coordinate(os);
    CHECK(os.str() == "0 0 1\n0 1 -0.5\n1 1 0.5\n0 2 -0.5\n1 2 0\n2 2 0.5\n");
  }
}
