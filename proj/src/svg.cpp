#include "steklov/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>

namespace steklov {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 40.0;

class Frame {
 public:
  explicit Frame(const SurfaceMesh& mesh) {
    lo_ = hi_ = mesh.vertices().front();
    for (const auto& p : mesh.vertices()) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    const Vec2 extent = (hi_ - lo_).cwiseMax(Vec2::Constant(1e-12));
    scale_ = (kCanvas - 2.0 * kMargin) / std::max(extent.x(), extent.y());
    width_ = extent.x() * scale_ + 2.0 * kMargin;
    height_ = extent.y() * scale_ + 2.0 * kMargin;
  }

  // y grows upward in parameter space and downward in SVG
  std::string point(const Vec2& p) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", kMargin + (p.x() - lo_.x()) * scale_,
                  height_ - kMargin - (p.y() - lo_.y()) * scale_);
    return buf;
  }
  std::string attrs(const Vec2& p, const char* x, const char* y) const {
    const std::string s = point(p);
    const auto comma = s.find(',');
    return std::string(x) + "=\"" + s.substr(0, comma) + "\" " + y + "=\"" + s.substr(comma + 1) + "\"";
  }
  std::string center(const Vec2& p) const { return attrs(p, "cx", "cy"); }
  double width() const { return width_; }
  double height() const { return height_; }

 private:
  Vec2 lo_;
  Vec2 hi_;
  double scale_ = 1.0;
  double width_ = kCanvas;
  double height_ = kCanvas;
};

// Raw-coordinate segments of boundary edges, keyed by their DOF pair.
std::map<std::pair<int, int>, std::pair<Vec2, Vec2>> boundary_segments(const SurfaceMesh& mesh) {
  std::set<std::pair<int, int>> consecutive;
  for (const auto& loop : mesh.boundary()) {
    const int n = static_cast<int>(loop.dofs.size());
    for (int i = 0; i < n; ++i) consecutive.insert({loop.dofs[i], loop.dofs[(i + 1) % n]});
  }
  std::map<std::pair<int, int>, std::pair<Vec2, Vec2>> segments;
  for (const auto& tri : mesh.triangles()) {
    for (int c = 0; c < 3; ++c) {
      const int a = tri[c];
      const int b = tri[(c + 1) % 3];
      const std::pair<int, int> key{mesh.dof(a), mesh.dof(b)};
      if (consecutive.count(key)) segments[key] = {mesh.vertices()[a], mesh.vertices()[b]};
    }
  }
  return segments;
}

const char* color(Classification c) {
  switch (c) {
    case Classification::minimum:
      return "#1a9641";
    case Classification::maximum:
      return "#d7191c";
    case Classification::saddle:
      return "#2b83ba";
    case Classification::degenerate:
      return "#984ea3";
  }
  return "#000000";
}

}  // namespace

void write_overlay_svg(const SurfaceMesh& mesh, const FieldAnalysis& a, std::ostream& out) {
  const Frame f(mesh);
  char header[256];
  std::snprintf(header, sizeof header,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                f.width(), f.height() + 30.0, f.width(), f.height() + 30.0);
  out << header;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const auto segments = boundary_segments(mesh);
  out << "<g id=\"outline\" stroke=\"#000000\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (const auto& [key, seg] : segments) {
    out << "<line " << f.attrs(seg.first, "x1", "y1") << " " << f.attrs(seg.second, "x2", "y2") << "/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"negative-arcs\" stroke=\"#d7191c\" stroke-width=\"4\" stroke-opacity=\"0.6\" fill=\"none\">\n";
  for (std::size_t j = 0; j < mesh.boundary().size() && j < a.negative.loops.size(); ++j) {
    const auto& dofs = mesh.boundary()[j].dofs;
    const int n = static_cast<int>(dofs.size());
    for (const auto& arc : a.negative.loops[j].negative) {
      const int start = static_cast<int>(std::find(dofs.begin(), dofs.end(), arc.first_dof) - dofs.begin());
      const int edges = arc.full_loop ? n : arc.length - 1;
      std::string path;
      for (int e = 0; e < edges; ++e) {
        const auto it = segments.find({dofs[(start + e) % n], dofs[(start + e + 1) % n]});
        if (it == segments.end()) continue;
        path += "M" + f.point(it->second.first) + "L" + f.point(it->second.second);
      }
      if (!path.empty()) out << "<path d=\"" << path << "\"/>\n";
    }
  }
  out << "</g>\n";

  out << "<g id=\"nodal-set\" stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
  std::string nodal;
  for (const auto& s : nodal_segments(mesh, a.u)) nodal += "M" + f.point(s.a) + "L" + f.point(s.b);
  if (!nodal.empty()) out << "<path d=\"" << nodal << "\"/>\n";
  out << "</g>\n";

  out << "<g id=\"interior-critical\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  for (const auto& p : a.interior) {
    out << "<circle " << f.center(p.location) << " r=\"6\" fill=\"" << color(p.classification) << "\"><title>"
        << to_string(p.classification) << " index " << p.index << "</title></circle>\n";
  }
  out << "</g>\n";

  out << "<g id=\"boundary-extrema\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  for (const auto& p : a.extrema.points) {
    out << "<rect " << f.attrs(p.location, "x", "y") << " width=\"8\" height=\"8\" transform=\"translate(-4,-4)\" fill=\""
        << color(p.classification) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"singular-zeros\" fill=\"#fdae61\" stroke=\"#000000\" stroke-width=\"1\">\n";
  for (const auto& p : a.singular_zeros) out << "<circle " << f.center(p.location) << " r=\"8\"/>\n";
  out << "</g>\n";

  char legend[512];
  std::snprintf(legend, sizeof legend,
                "<text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"13\">interior critical: %zu "
                "(index sum %d), boundary extrema: %zu, singular zeros: %zu, sum ell: %d</text>\n",
                kMargin, f.height() + 15.0, a.interior.size(), a.interior_index_sum, a.extrema.points.size(),
                a.singular_zeros.size(), a.negative.sum_ell);
  out << legend << "</svg>\n";
}

}  // namespace steklov
