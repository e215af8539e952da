#pragma once

#include <filesystem>

#include <json.hpp>

#include "steklov/mesh.hpp"

namespace steklov {

inline constexpr int kMeshFormatVersion = 1;

// Mesh JSON, version 1:
//   {"version":1, "vertices":[[x,y],...], "triangles":[[i,j,k],...],
//    "identifications":[[a,b],...], "metric":[[g11,g12,g22],...], "rho":[...]}
// "metric" and "rho" are optional; "label" is an optional free-form string.

nlohmann::ordered_json mesh_to_json(const SurfaceMesh& mesh);

/// Parses and validates; MeshError names the first violation with indices.
SurfaceMesh mesh_from_json(const nlohmann::json& doc);

SurfaceMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path);

}  // namespace steklov
