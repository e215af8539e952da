#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "steklov/critical.hpp"
#include "steklov/oracle.hpp"
#include "steklov/spectrum.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Field sample(const SurfaceMesh& m, F f) {
  Field u(m.num_dofs());
  for (int d = 0; d < m.num_dofs(); ++d) u[d] = f(m.position(d));
  return u;
}

// Hexagonal fan: centre 0, ring 1..6 at angles k pi / 3.
SurfaceMesh hexagon() {
  MeshData d;
  d.vertices.emplace_back(0, 0);
  for (int k = 0; k < 6; ++k) d.vertices.emplace_back(std::cos(k * kPi / 3), std::sin(k * kPi / 3));
  for (int k = 0; k < 6; ++k) d.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
  return SurfaceMesh::create(std::move(d));
}

LoopSigns signs(std::vector<double> v, std::vector<char> forced = {}) { return classify_loop_signs(v, 1e-9, forced); }

std::vector<double> circle(int n, double (*f)(double)) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(f(2 * kPi * i / n));
  return v;
}

}  // namespace

TEST_SUITE("critical") {
  TEST_CASE("link sign changes by enumeration on a hexagon") {
    const auto m = hexagon();
    Field u(7);
    u << 0, 1, -1, 1, -1, 1, -1;  // alternating around the centre
    const VertexOrder order(u, 1e-7);
    CHECK(link_sign_changes(m, order, 0) == 6);
    u << 0, 1, 1, -1, -1, 1, 1;
    CHECK(link_sign_changes(m, VertexOrder(u, 1e-7), 0) == 2);
    u << 0, 1, -1, -1, 1, -1, -1;
    CHECK(link_sign_changes(m, VertexOrder(u, 1e-7), 0) == 4);
    u << -1, 1, 2, 3, 4, 5, 6;
    CHECK(link_sign_changes(m, VertexOrder(u, 1e-7), 0) == 0);
  }

  TEST_CASE("ties within the tolerance are broken by DOF index") {
    const auto m = hexagon();
    Field u(7);
    u << 0, 1e-12, -1, 1e-12, -1, 1e-12, -1;
    // ring values 1e-12 tie with the centre; higher DOF index ranks above
    const VertexOrder order(u, 1e-7);
    CHECK(order.above(1, 0));
    CHECK_FALSE(order.above(0, 1));
    CHECK(link_sign_changes(m, order, 0) == 6);
  }

  TEST_CASE("linear function has no interior critical vertices") {
    const auto m = generate_disk(1.0, 20);
    CHECK(interior_critical_points(m, sample(m, [](const Vec2& p) { return p.x() + 0.3 * p.y(); })).empty());
  }

  TEST_CASE("x^2 - y^2: one saddle at the centre") {
    const auto m = generate_disk(1.0, 20);
    const auto pts = interior_critical_points(m, sample(m, [](const Vec2& p) { return p.x() * p.x() - p.y() * p.y(); }));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].link_sign_changes == 4);
    CHECK(pts[0].index == -1);
    CHECK(pts[0].classification == Classification::saddle);
    CHECK(pts[0].location.norm() < 1e-12);
  }

  TEST_CASE("Re z^3: monkey saddle with index -2") {
    const auto m = generate_disk(1.0, 20);
    const auto pts = interior_critical_points(
        m, sample(m, [](const Vec2& p) { return p.x() * p.x() * p.x() - 3 * p.x() * p.y() * p.y(); }));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].link_sign_changes == 6);
    CHECK(pts[0].index == -2);
    CHECK(pts[0].classification == Classification::degenerate);
  }

  TEST_CASE("extrema are classified against the link") {
    const auto m = generate_disk(1.0, 10);
    auto pts = interior_critical_points(m, sample(m, [](const Vec2& p) { return p.squaredNorm(); }));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].classification == Classification::minimum);
    CHECK(pts[0].index == 1);
    pts = interior_critical_points(m, sample(m, [](const Vec2& p) { return -p.squaredNorm(); }));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].classification == Classification::maximum);
  }

  TEST_CASE("Poincare-Hopf is exact on doubles for random fields") {
    struct Case {
      SurfaceMesh mesh;
      int chi;
    };
    const Case cases[] = {{double_mesh(generate_disk(1.0, 6)), 2},
                          {double_mesh(generate_annulus(0.5, 1.0, 16)), 0},
                          {double_mesh(generate_cylinder(0.5, 12)), 0}};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (const auto& c : cases) {
      for (int seed = 0; seed < 100; ++seed) {
        Field u(c.mesh.num_dofs());
        for (int d = 0; d < u.size(); ++d) u[d] = uni(rng);
        if (seed % 10 == 0) u = u.array().round();  // many exact ties
        CHECK(pl_index_sum(c.mesh, u) == c.chi);
      }
    }
    CHECK_THROWS(pl_index_sum(generate_disk(1.0, 4), Field::Zero(generate_disk(1.0, 4).num_dofs())));
  }

  TEST_CASE("trace extrema of cos theta and cos 3 theta") {
    const auto m = generate_disk(1.0, 16);
    auto ex = boundary_trace_extrema(m, sample(m, [](const Vec2& p) { return std::cos(std::atan2(p.y(), p.x())); }));
    int maxima = 0, minima = 0, sum = 0;
    for (const auto& p : ex.points) {
      (p.index > 0 ? minima : maxima)++;
      sum += p.index;
    }
    CHECK(maxima == 1);
    CHECK(minima == 1);
    ex = boundary_trace_extrema(m, sample(m, [](const Vec2& p) { return std::cos(3 * std::atan2(p.y(), p.x())); }));
    maxima = minima = sum = 0;
    for (const auto& p : ex.points) {
      (p.index > 0 ? minima : maxima)++;
      sum += p.index;
      CHECK(p.kind == PointKind::boundary_trace);
    }
    CHECK(maxima == 3);
    CHECK(minima == 3);
    CHECK(sum == 0);
  }

  TEST_CASE("constant runs: one point per plateau, constant loops flagged") {
    const auto m = generate_cylinder(1.0, 16);
    // bottom loop constant, top loop with a flat top
    const auto ex = boundary_trace_extrema(m, sample(m, [](const Vec2& p) {
      return p.y() < 0 ? -1.0 : std::min(std::cos(p.x()), 0.5);
    }));
    CHECK(ex.degenerate_loops == std::vector<int>{0});
    int maxima = 0;
    for (const auto& p : ex.points) maxima += p.index < 0;
    CHECK(maxima == 1);
    CHECK(ex.points.size() == 2u);
  }

  TEST_CASE("annulus u2 trace: one max and one min on each circle") {
    const auto m = generate_annulus(0.5, 1.0, 96);
    const auto pairs = steklov_spectrum(m, 2);
    const auto ex = boundary_trace_extrema(m, pairs[1].u);
    int per_loop[2][2] = {};
    for (const auto& p : ex.points) per_loop[p.loop][p.index > 0]++;
    CHECK(per_loop[0][0] == 1);
    CHECK(per_loop[0][1] == 1);
    CHECK(per_loop[1][0] == 1);
    CHECK(per_loop[1][1] == 1);
  }

  TEST_CASE("sign data conventions") {
    auto s = signs(circle(64, [](double t) { return std::cos(t); }));
    CHECK(s.crossings == 2);
    CHECK(s.ell == 1);
    REQUIRE(s.negative.size() == 1);
    CHECK_FALSE(s.negative[0].full_loop);

    s = signs(std::vector<double>(10, 1.0));
    CHECK(s.ell == 0);
    CHECK(s.negative.empty());

    s = signs(std::vector<double>(10, -1.0));
    CHECK(s.ell == 0);
    REQUIRE(s.negative.size() == 1);
    CHECK(s.negative[0].full_loop);

    s = signs(circle(60, [](double t) { return std::cos(3 * t); }));
    CHECK(s.crossings == 6);
    CHECK(s.ell == 3);
    CHECK(s.negative.size() == 3u);

    // a zero between equal signs is a touch, between opposite signs a crossing
    s = signs({1, 0, 1, 1, -1, -1, 0, 1});
    CHECK(s.crossings == 2);
    CHECK(s.snapped == 2);
    s = signs({-1, 0, -1, -1});
    CHECK(s.crossings == 0);
    REQUIRE(s.negative.size() == 1);
    CHECK(s.negative[0].full_loop);

    // forced zeros behave like snapped ones
    s = signs({-1, -0.5, -1, -2}, {0, 1, 0, 0});
    CHECK(s.crossings == 0);
    CHECK(s.snapped == 1);

    s = signs({0, 0, 0});
    CHECK(s.degenerate);
  }

  TEST_CASE("margins flag near-threshold values") {
    const auto s = classify_loop_signs(std::vector<double>{1, 5e-9, -1, -2}, 1e-9);
    CHECK(s.near_threshold);
    CHECK(s.margin == doctest::Approx(2.5e-9));
    CHECK_FALSE(classify_loop_signs(std::vector<double>{1, 0.5, -1, -2}, 1e-9).near_threshold);
  }

  TEST_CASE("boundary sign data of cos theta on the disk") {
    const auto m = generate_disk(1.0, 12);
    const auto data = boundary_sign_changes(m, sample(m, [](const Vec2& p) { return p.x(); }));
    CHECK(data.chi_negative == 1);
    CHECK(data.sum_ell == 1);
    CHECK(data.changing_loops == 1);
    CHECK_FALSE(data.degenerate());
  }

  TEST_CASE("no singular boundary zeros for disk u2 or a perturbed annulus") {
    const auto disk = generate_disk(1.0, 20);
    CHECK(boundary_singular_zeros(disk, steklov_spectrum(disk, 2)[1].u).empty());
    const auto annulus = perturb_metric(generate_annulus(0.5, 1.0, 96), 0.05, 5);
    CHECK(boundary_singular_zeros(annulus, steklov_spectrum(annulus, 2)[1].u).empty());
  }

  TEST_CASE("critical cylinder family: singular zeros exactly at the threshold") {
    const double T = oracle::tstar().value;
    const auto m = generate_cylinder(T, 96);
    const double c = oracle::cylinder_family_threshold();
    const auto field = [&](double coef) { return sample(m, [&](const Vec2& p) { return oracle::cylinder_family_value(coef, p); }); };
    const auto zeros = boundary_singular_zeros(m, field(c));
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0].location.x() == doctest::Approx(0.0));
    CHECK(zeros[0].location.y() == doctest::Approx(-T));
    CHECK(zeros[1].location.x() == doctest::Approx(kPi));
    CHECK(zeros[1].location.y() == doctest::Approx(T));
    CHECK(boundary_singular_zeros(m, field(0.0)).empty());
    CHECK(boundary_singular_zeros(m, field(0.5 * c)).empty());
    CHECK(boundary_singular_zeros(m, field(1.5 * c)).empty());
  }

  TEST_CASE("nodal set of x on the disk is the vertical diameter") {
    const auto m = generate_disk(1.0, 9);
    const auto segments = nodal_segments(m, sample(m, [](const Vec2& p) { return p.x() + 1e-3; }));
    double length = 0.0;
    for (const auto& s : segments) {
      CHECK(std::abs(s.a.x() + 1e-3) < 1e-12);
      CHECK(std::abs(s.b.x() + 1e-3) < 1e-12);
      length += (s.a - s.b).norm();
    }
    CHECK(length == doctest::Approx(2.0).epsilon(1e-2));
  }

  TEST_CASE("critical point JSON") {
    CriticalPoint p;
    p.dof = 3;
    p.kind = PointKind::interior;
    p.index = -1;
    p.link_sign_changes = 4;
    p.classification = Classification::saddle;
    const auto j = to_json(p);
    CHECK(j["vertex"] == 3);
    CHECK(j["kind"] == "interior");
    CHECK(j["classification"] == "saddle");
    CHECK(j["index"].is_number_integer());
    CHECK_FALSE(j.contains("boundary_component"));
  }
}
