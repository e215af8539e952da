#include "steklov/mesh.hpp"

namespace steklov {

SurfaceMesh double_mesh(const SurfaceMesh& mesh) {
  if (mesh.closed()) throw MeshError("cannot double a closed mesh");

  const int n = mesh.num_vertices();
  MeshData data;
  data.vertices = mesh.vertices();
  data.vertices.insert(data.vertices.end(), mesh.vertices().begin(), mesh.vertices().end());
  data.triangles = mesh.triangles();
  for (const auto& tri : mesh.triangles()) data.triangles.push_back({tri[0] + n, tri[2] + n, tri[1] + n});
  data.metric = mesh.metric();
  data.metric.insert(data.metric.end(), mesh.metric().begin(), mesh.metric().end());
  data.rho = mesh.rho();
  data.rho.insert(data.rho.end(), mesh.rho().begin(), mesh.rho().end());
  data.identifications = mesh.identifications();
  for (const auto& [a, b] : mesh.identifications()) data.identifications.emplace_back(a + n, b + n);
  for (int v = 0; v < n; ++v) {
    if (mesh.is_boundary(mesh.dof(v))) data.identifications.emplace_back(v, v + n);
  }
  data.label = "double(" + mesh.label() + ")";
  return SurfaceMesh::create(std::move(data));
}

std::vector<int> double_source_dofs(const SurfaceMesh& mesh, const SurfaceMesh& doubled) {
  const int n = mesh.num_vertices();
  if (doubled.num_vertices() != 2 * n) {
    throw MeshError("mesh with " + std::to_string(doubled.num_vertices()) + " vertices is not the double of a mesh with " +
                    std::to_string(n) + " vertices");
  }
  std::vector<int> source(doubled.num_dofs());
  for (int d = 0; d < doubled.num_dofs(); ++d) source[d] = mesh.dof(doubled.representative(d) % n);
  return source;
}

Field reflect_function(const SurfaceMesh& mesh, const SurfaceMesh& doubled, const Field& u) {
  if (u.size() != mesh.num_dofs()) {
    throw MeshError("field has " + std::to_string(u.size()) + " values but mesh has " +
                    std::to_string(mesh.num_dofs()) + " DOFs");
  }
  const auto source = double_source_dofs(mesh, doubled);
  Field reflected(doubled.num_dofs());
  for (int d = 0; d < doubled.num_dofs(); ++d) reflected[d] = u[source[d]];
  return reflected;
}

}  // namespace steklov
