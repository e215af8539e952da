#include "steklov/mesh_io.hpp"

#include <algorithm>
#include <fstream>

namespace steklov {

namespace {

const nlohmann::json& require_array(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw MeshError(std::string("mesh JSON: \"") + key + "\" must be an array");
  }
  return doc[key];
}

double number_at(const nlohmann::json& value, const char* key, std::size_t i) {
  if (!value.is_number()) {
    throw MeshError(std::string("mesh JSON: ") + key + "[" + std::to_string(i) + "] is not a number");
  }
  return value.get<double>();
}

int index_at(const nlohmann::json& value, const char* key, std::size_t i) {
  if (!value.is_number_integer()) {
    throw MeshError(std::string("mesh JSON: ") + key + "[" + std::to_string(i) + "] is not an integer");
  }
  return value.get<int>();
}

const nlohmann::json& tuple_at(const nlohmann::json& array, const char* key, std::size_t i, std::size_t arity) {
  const auto& item = array[i];
  if (!item.is_array() || item.size() != arity) {
    throw MeshError(std::string("mesh JSON: ") + key + "[" + std::to_string(i) + "] must have " +
                    std::to_string(arity) + " entries");
  }
  return item;
}

}  // namespace

nlohmann::ordered_json mesh_to_json(const SurfaceMesh& mesh) {
  nlohmann::ordered_json doc;
  doc["version"] = kMeshFormatVersion;
  doc["label"] = mesh.label();
  auto& vertices = doc["vertices"] = nlohmann::ordered_json::array();
  for (const auto& p : mesh.vertices()) vertices.push_back({p.x(), p.y()});
  auto& triangles = doc["triangles"] = nlohmann::ordered_json::array();
  for (const auto& t : mesh.triangles()) triangles.push_back({t[0], t[1], t[2]});
  auto& ids = doc["identifications"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : mesh.identifications()) ids.push_back({a, b});
  const bool euclidean = std::all_of(mesh.metric().begin(), mesh.metric().end(),
                                     [](const Metric& g) { return g == Metric{}; });
  if (!euclidean) {
    auto& metric = doc["metric"] = nlohmann::ordered_json::array();
    for (const auto& g : mesh.metric()) metric.push_back({g.g11, g.g12, g.g22});
  }
  const bool unit_rho = std::all_of(mesh.rho().begin(), mesh.rho().end(), [](double w) { return w == 1.0; });
  if (!unit_rho) doc["rho"] = mesh.rho();
  return doc;
}

SurfaceMesh mesh_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw MeshError("mesh JSON: document must be an object");
  if (!doc.contains("version") || doc["version"] != kMeshFormatVersion) {
    throw MeshError("mesh JSON: unsupported or missing version (expected 1)");
  }
  MeshData data;
  if (doc.contains("label") && doc["label"].is_string()) data.label = doc["label"].get<std::string>();

  const auto& vertices = require_array(doc, "vertices");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& p = tuple_at(vertices, "vertices", i, 2);
    data.vertices.emplace_back(number_at(p[0], "vertices", i), number_at(p[1], "vertices", i));
  }
  const auto& triangles = require_array(doc, "triangles");
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = tuple_at(triangles, "triangles", i, 3);
    data.triangles.push_back(
        {index_at(t[0], "triangles", i), index_at(t[1], "triangles", i), index_at(t[2], "triangles", i)});
  }
  if (doc.contains("identifications")) {
    const auto& ids = require_array(doc, "identifications");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& pair = tuple_at(ids, "identifications", i, 2);
      data.identifications.emplace_back(index_at(pair[0], "identifications", i),
                                        index_at(pair[1], "identifications", i));
    }
  }
  if (doc.contains("metric")) {
    const auto& metric = require_array(doc, "metric");
    for (std::size_t i = 0; i < metric.size(); ++i) {
      const auto& g = tuple_at(metric, "metric", i, 3);
      data.metric.push_back({number_at(g[0], "metric", i), number_at(g[1], "metric", i), number_at(g[2], "metric", i)});
    }
  }
  if (doc.contains("rho")) {
    const auto& rho = require_array(doc, "rho");
    for (std::size_t i = 0; i < rho.size(); ++i) data.rho.push_back(number_at(rho[i], "rho", i));
  }
  auto mesh = SurfaceMesh::create(std::move(data));
  require_counterclockwise(mesh);
  return mesh;
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw MeshError("mesh JSON parse error in " + path.string() + ": " + e.what());
  }
  return mesh_from_json(doc);
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out << mesh_to_json(mesh).dump() << '\n';
}

}  // namespace steklov
