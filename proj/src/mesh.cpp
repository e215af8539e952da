#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace steklov {

namespace {

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  throw MeshError(os.str());
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

struct HalfEdge {
  int from;
  int to;
  int triangle;
};

}  // namespace

double BoundaryComponent::length() const {
  return std::accumulate(edge_lengths.begin(), edge_lengths.end(), 0.0);
}

std::array<int, 3> SurfaceMesh::triangle_dofs(int t) const {
  const auto& tri = data_.triangles[t];
  return {dof_of_[tri[0]], dof_of_[tri[1]], dof_of_[tri[2]]};
}

int SurfaceMesh::num_boundary_dofs() const {
  return static_cast<int>(std::count(on_boundary_.begin(), on_boundary_.end(), 1));
}

double SurfaceMesh::signed_area(int t) const {
  const auto& tri = data_.triangles[t];
  const Vec2 e1 = data_.vertices[tri[1]] - data_.vertices[tri[0]];
  const Vec2 e2 = data_.vertices[tri[2]] - data_.vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double SurfaceMesh::max_edge_length() const {
  double longest = 0.0;
  for (const auto& tri : data_.triangles) {
    for (int c = 0; c < 3; ++c) {
      longest = std::max(longest, (data_.vertices[tri[(c + 1) % 3]] - data_.vertices[tri[c]]).norm());
    }
  }
  return longest;
}

SurfaceMesh SurfaceMesh::create(MeshData data) {
  const int nv = static_cast<int>(data.vertices.size());
  const int nt = static_cast<int>(data.triangles.size());
  if (nv == 0 || nt == 0) fail("mesh has no vertices or no triangles");

  for (int v = 0; v < nv; ++v) {
    if (!data.vertices[v].allFinite()) fail("vertex ", v, " has non-finite coordinates");
  }
  for (int t = 0; t < nt; ++t) {
    for (int c = 0; c < 3; ++c) {
      const int v = data.triangles[t][c];
      if (v < 0 || v >= nv) fail("triangle ", t, " references vertex ", v, " out of range [0, ", nv, ")");
    }
  }
  if (data.metric.empty()) data.metric.assign(nt, Metric{});
  if (static_cast<int>(data.metric.size()) != nt) {
    fail("metric has ", data.metric.size(), " entries but mesh has ", nt, " triangles");
  }
  for (int t = 0; t < nt; ++t) {
    const Metric& g = data.metric[t];
    if (!std::isfinite(g.g11) || !std::isfinite(g.g12) || !std::isfinite(g.g22) || g.det() <= 0.0 ||
        g.trace() <= 0.0) {
      fail("metric of triangle ", t, " is not positive definite");
    }
  }
  if (data.rho.empty()) data.rho.assign(nv, 1.0);
  if (static_cast<int>(data.rho.size()) != nv) {
    fail("rho has ", data.rho.size(), " entries but mesh has ", nv, " vertices");
  }

  SurfaceMesh mesh;

  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < data.identifications.size(); ++i) {
    const auto [a, b] = data.identifications[i];
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
      fail("identification ", i, " (", a, ", ", b, ") is invalid");
    }
    const int ra = find_root(parent, a);
    const int rb = find_root(parent, b);
    // smallest raw index becomes the representative
    if (ra < rb) {
      parent[rb] = ra;
    } else if (rb < ra) {
      parent[ra] = rb;
    }
  }
  mesh.dof_of_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const int r = find_root(parent, v);
    if (r == v) {
      mesh.dof_of_[v] = static_cast<int>(mesh.representative_.size());
      mesh.representative_.push_back(v);
    }
  }
  for (int v = 0; v < nv; ++v) mesh.dof_of_[v] = mesh.dof_of_[find_root(parent, v)];
  const int nd = static_cast<int>(mesh.representative_.size());

  // Half-edges keyed by undirected DOF edge.
  std::vector<HalfEdge> halfedges;
  halfedges.reserve(3 * nt);
  std::vector<char> used(nd, 0);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = data.triangles[t];
    const std::array<int, 3> d{mesh.dof_of_[tri[0]], mesh.dof_of_[tri[1]], mesh.dof_of_[tri[2]]};
    if (d[0] == d[1] || d[1] == d[2] || d[0] == d[2]) {
      fail("triangle ", t, " collapses after identifications");
    }
    for (int c = 0; c < 3; ++c) {
      halfedges.push_back({d[c], d[(c + 1) % 3], t});
      used[d[c]] = 1;
    }
  }
  for (int d = 0; d < nd; ++d) {
    if (!used[d]) fail("vertex ", mesh.representative_[d], " belongs to no triangle");
  }
  std::sort(halfedges.begin(), halfedges.end(), [](const HalfEdge& x, const HalfEdge& y) {
    const auto kx = std::minmax(x.from, x.to);
    const auto ky = std::minmax(y.from, y.to);
    return std::tie(kx.first, kx.second, x.triangle) < std::tie(ky.first, ky.second, y.triangle);
  });

  std::vector<HalfEdge> boundary_halfedges;
  for (std::size_t i = 0; i < halfedges.size();) {
    const auto key = std::minmax(halfedges[i].from, halfedges[i].to);
    std::size_t j = i;
    while (j < halfedges.size() && std::minmax(halfedges[j].from, halfedges[j].to) == key) ++j;
    const std::size_t count = j - i;
    if (count > 2) {
      fail("edge (", key.first, ", ", key.second, ") belongs to ", count, " triangles");
    }
    if (count == 2 && halfedges[i].from == halfedges[i + 1].from) {
      fail("triangles ", halfedges[i].triangle, " and ", halfedges[i + 1].triangle,
           " have inconsistent orientation across edge (", key.first, ", ", key.second, ")");
    }
    if (count == 1) boundary_halfedges.push_back(halfedges[i]);
    mesh.edges_.push_back({key.first, key.second});
    i = j;
  }

  // Boundary loops.
  mesh.on_boundary_.assign(nd, 0);
  std::vector<int> next(nd, -1);
  std::vector<int> prev(nd, -1);
  std::vector<int> next_triangle(nd, -1);
  for (const auto& h : boundary_halfedges) {
    if (next[h.from] != -1 || prev[h.to] != -1) {
      fail("boundary edges do not close into simple loops at vertex ",
           mesh.representative_[next[h.from] != -1 ? h.from : h.to]);
    }
    next[h.from] = h.to;
    prev[h.to] = h.from;
    next_triangle[h.from] = h.triangle;
    mesh.on_boundary_[h.from] = 1;
    mesh.on_boundary_[h.to] = 1;
  }
  for (int d = 0; d < nd; ++d) {
    if (mesh.on_boundary_[d] && (next[d] == -1 || prev[d] == -1)) {
      fail("boundary edges do not close into loops at vertex ", mesh.representative_[d]);
    }
  }
  std::vector<char> visited(nd, 0);
  for (int start = 0; start < nd; ++start) {
    if (!mesh.on_boundary_[start] || visited[start]) continue;
    BoundaryComponent loop;
    int d = start;
    do {
      visited[d] = 1;
      loop.dofs.push_back(d);
      // metric length measured inside the triangle owning the edge
      const int t = next_triangle[d];
      const auto& tri = data.triangles[t];
      int ca = -1;
      int cb = -1;
      for (int c = 0; c < 3; ++c) {
        if (mesh.dof_of_[tri[c]] == d) ca = tri[c];
        if (mesh.dof_of_[tri[c]] == next[d]) cb = tri[c];
      }
      const Vec2 e = data.vertices[cb] - data.vertices[ca];
      const double len2 = e.dot(data.metric[t].matrix() * e);
      if (!(len2 > 0.0)) fail("boundary edge (", ca, ", ", cb, ") has zero length");
      loop.edge_lengths.push_back(std::sqrt(len2));
      d = next[d];
    } while (d != start);
    mesh.boundary_.push_back(std::move(loop));
  }

  for (int d = 0; d < nd; ++d) {
    if (!mesh.on_boundary_[d]) continue;
    const double w = data.rho[mesh.representative_[d]];
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail("rho must be positive at boundary vertex ", mesh.representative_[d], " (got ", w, ")");
    }
  }

  // Ordered links from the edges opposite each DOF.
  std::vector<std::vector<std::pair<int, int>>> opposite(nd);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = data.triangles[t];
    const std::array<int, 3> d{mesh.dof_of_[tri[0]], mesh.dof_of_[tri[1]], mesh.dof_of_[tri[2]]};
    for (int c = 0; c < 3; ++c) opposite[d[c]].emplace_back(d[(c + 1) % 3], d[(c + 2) % 3]);
  }
  mesh.links_.resize(nd);
  for (int d = 0; d < nd; ++d) {
    auto& arcs = opposite[d];
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t i = 1; i < arcs.size(); ++i) {
      if (arcs[i].first == arcs[i - 1].first) fail("vertex ", mesh.representative_[d], " is non-manifold");
    }
    auto successor = [&](int a) {
      const auto it = std::lower_bound(arcs.begin(), arcs.end(), std::make_pair(a, -1));
      return (it != arcs.end() && it->first == a) ? it->second : -1;
    };
    const int start = mesh.on_boundary_[d] ? next[d] : arcs.front().first;
    std::vector<int>& link = mesh.links_[d];
    int w = start;
    const std::size_t expected = arcs.size() + (mesh.on_boundary_[d] ? 1 : 0);
    while (w != -1 && link.size() <= expected) {
      link.push_back(w);
      w = successor(w);
      if (w == start) break;
    }
    const bool ok = mesh.on_boundary_[d] ? (link.size() == expected && link.back() == prev[d])
                                         : (link.size() == expected && w == start);
    if (!ok) fail("vertex ", mesh.representative_[d], " does not have a single link cycle");
  }

  mesh.data_ = std::move(data);
  return mesh;
}

int euler_characteristic(const SurfaceMesh& mesh) {
  return mesh.num_dofs() - mesh.num_edges() + mesh.num_triangles();
}

const std::vector<BoundaryComponent>& boundary_components(const SurfaceMesh& mesh) {
  return mesh.boundary();
}

void require_counterclockwise(const SurfaceMesh& mesh) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) {
      fail("triangle ", t, " is degenerate or clockwise (signed area ", mesh.signed_area(t), ")");
    }
  }
}

}  // namespace steklov
