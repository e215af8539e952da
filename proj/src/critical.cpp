#include "steklov/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steklov {

namespace {

double sup_norm(const Field& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

double trace_sup_norm(const SurfaceMesh& mesh, const Field& u) {
  double s = 0.0;
  for (const auto& loop : mesh.boundary()) {
    for (int d : loop.dofs) s = std::max(s, std::abs(u[d]));
  }
  return s;
}

void require_field(const SurfaceMesh& mesh, const Field& u) {
  if (u.size() != mesh.num_dofs()) {
    throw std::invalid_argument("field has " + std::to_string(u.size()) + " values but mesh has " +
                                std::to_string(mesh.num_dofs()) + " DOFs");
  }
  if (!u.allFinite()) throw std::invalid_argument("field contains non-finite values");
}

int sign_of(double v, double threshold) { return v > threshold ? 1 : (v < -threshold ? -1 : 0); }

}  // namespace

const char* to_string(PointKind kind) {
  switch (kind) {
    case PointKind::interior:
      return "interior";
    case PointKind::boundary_trace:
      return "boundary_trace";
    case PointKind::boundary_singular_zero:
      return "boundary_singular_zero";
  }
  return "unknown";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::minimum:
      return "minimum";
    case Classification::maximum:
      return "maximum";
    case Classification::saddle:
      return "saddle";
    case Classification::degenerate:
      return "degenerate";
  }
  return "unknown";
}

VertexOrder::VertexOrder(const Field& u, double zero_tol, std::vector<std::int64_t> tiebreak)
    : bin_(u.size()), key_(std::move(tiebreak)) {
  if (!(zero_tol > 0.0)) throw std::invalid_argument("zero_tol must be positive");
  const double s = sup_norm(u);
  scale_ = s > 0.0 ? s : 1.0;
  const double width = zero_tol * scale_;
  for (Eigen::Index i = 0; i < u.size(); ++i) bin_[i] = static_cast<std::int64_t>(std::floor(u[i] / width));
  if (key_.empty()) {
    key_.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) key_[i] = i;
  }
  if (key_.size() != bin_.size()) throw std::invalid_argument("tie-break keys do not match the field size");
}

bool VertexOrder::constant() const {
  return std::all_of(bin_.begin(), bin_.end(), [&](std::int64_t b) { return b == bin_.front(); });
}

int link_sign_changes(const SurfaceMesh& mesh, const VertexOrder& order, int dof) {
  const auto& link = mesh.link(dof);
  const bool cyclic = !mesh.is_boundary(dof);
  const std::size_t n = link.size();
  int changes = 0;
  for (std::size_t i = 0; i + (cyclic ? 0 : 1) < n; ++i) {
    const bool a = order.above(link[i], dof);
    const bool b = order.above(link[(i + 1) % n], dof);
    if (a != b) ++changes;
  }
  return changes;
}

std::vector<CriticalPoint> interior_critical_points(const SurfaceMesh& mesh, const Field& u, double zero_tol) {
  require_field(mesh, u);
  const VertexOrder order(u, zero_tol);
  std::vector<CriticalPoint> points;
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    if (mesh.is_boundary(d)) continue;
    const int sc = link_sign_changes(mesh, order, d);
    if (sc == 2) continue;
    CriticalPoint p;
    p.dof = d;
    p.location = mesh.position(d);
    p.kind = PointKind::interior;
    p.link_sign_changes = sc;
    p.index = 1 - sc / 2;
    p.value = u[d];
    if (sc == 0) {
      p.classification = order.above(mesh.link(d).front(), d) ? Classification::minimum : Classification::maximum;
    } else if (sc == 4) {
      p.classification = Classification::saddle;
    } else {
      p.classification = Classification::degenerate;
    }
    points.push_back(p);
  }
  return points;
}

int pl_index_sum(const SurfaceMesh& mesh, const Field& u, double zero_tol, std::vector<std::int64_t> tiebreak) {
  if (!mesh.closed()) throw std::invalid_argument("PL index sum requires a closed mesh");
  require_field(mesh, u);
  const VertexOrder order(u, zero_tol, std::move(tiebreak));
  int sum = 0;
  for (int d = 0; d < mesh.num_dofs(); ++d) sum += 1 - link_sign_changes(mesh, order, d) / 2;
  return sum;
}

TraceExtrema boundary_trace_extrema(const SurfaceMesh& mesh, const Field& u, double zero_tol) {
  require_field(mesh, u);
  const double tol = zero_tol * trace_sup_norm(mesh, u);
  TraceExtrema result;
  for (int li = 0; li < static_cast<int>(mesh.boundary().size()); ++li) {
    const auto& dofs = mesh.boundary()[li].dofs;
    const int n = static_cast<int>(dofs.size());
    auto value = [&](int i) { return u[dofs[((i % n) + n) % n]]; };
    // a run starts where the step from the previous vertex exceeds tol
    int start = -1;
    for (int i = 0; i < n; ++i) {
      if (std::abs(value(i) - value(i - 1)) > tol) {
        start = i;
        break;
      }
    }
    if (start < 0) {
      result.degenerate_loops.push_back(li);
      continue;
    }
    struct Run {
      int first;
      int last;
    };
    std::vector<Run> runs;
    for (int k = 0; k < n; ++k) {
      const int i = start + k;
      if (k == 0 || std::abs(value(i) - value(i - 1)) > tol) {
        runs.push_back({i, i});
      } else {
        runs.back().last = i;
      }
    }
    const int p = static_cast<int>(runs.size());
    for (int j = 0; j < p; ++j) {
      const Run& prev = runs[(j + p - 1) % p];
      const Run& cur = runs[j];
      const Run& next = runs[(j + 1) % p];
      const bool rises_in = value(cur.first) > value(prev.last);
      const bool rises_out = value(next.first) > value(cur.last);
      if (rises_in == rises_out) continue;
      CriticalPoint pt;
      pt.dof = dofs[cur.first % n];
      pt.location = mesh.position(pt.dof);
      pt.kind = PointKind::boundary_trace;
      pt.value = u[pt.dof];
      pt.loop = li;
      if (rises_in) {
        pt.index = -1;
        pt.classification = Classification::maximum;
      } else {
        pt.index = 1;
        pt.classification = Classification::minimum;
      }
      result.points.push_back(pt);
    }
  }
  return result;
}

bool BoundarySignData::degenerate() const {
  return std::any_of(loops.begin(), loops.end(), [](const LoopSigns& l) { return l.degenerate; });
}

LoopSigns classify_loop_signs(std::span<const double> values, double threshold, std::span<const char> forced_zero,
                              std::span<const int> dofs) {
  const int n = static_cast<int>(values.size());
  LoopSigns out;
  if (n == 0) {
    out.degenerate = true;
    return out;
  }
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  std::vector<int> sign(n);
  for (int i = 0; i < n; ++i) {
    const bool forced = !forced_zero.empty() && forced_zero[i];
    sign[i] = forced ? 0 : sign_of(values[i], threshold);
    if (sign[i] == 0) {
      ++out.snapped;
    } else if (scale > 0.0) {
      const double rel = std::abs(values[i]) / scale;
      out.margin = std::min(out.margin, rel);
      if (std::abs(values[i]) <= 10.0 * threshold) out.near_threshold = true;
    }
  }
  int first_nonzero = -1;
  for (int i = 0; i < n; ++i) {
    if (sign[i] != 0) {
      first_nonzero = i;
      break;
    }
  }
  if (first_nonzero < 0) {
    out.degenerate = true;
    return out;
  }

  // Absorb zero runs bounded by equal signs; count opposite-sign transitions.
  std::vector<int> absorbed(sign);
  int prev_sign = 0;
  for (int k = 0; k < n; ++k) {
    const int i = (first_nonzero + k) % n;
    if (sign[i] == 0) continue;
    if (prev_sign != 0 && prev_sign != sign[i]) ++out.crossings;
    prev_sign = sign[i];
  }
  if (prev_sign != sign[first_nonzero]) ++out.crossings;  // wrap-around
  for (int k = 0; k < n;) {
    const int i = (first_nonzero + k) % n;
    if (sign[i] != 0) {
      ++k;
      continue;
    }
    int len = 0;
    while (k + len < n && sign[(first_nonzero + k + len) % n] == 0) ++len;
    const int before = sign[(first_nonzero + k - 1 + n) % n];
    const int after = sign[(first_nonzero + k + len) % n];
    if (before == after) {
      for (int t = 0; t < len; ++t) absorbed[(first_nonzero + k + t) % n] = before;
    }
    k += len;
  }
  out.ell = out.crossings / 2;

  auto dof_at = [&](int i) { return dofs.empty() ? i : dofs[i]; };
  if (std::all_of(absorbed.begin(), absorbed.end(), [](int s) { return s < 0; })) {
    out.negative.push_back({dof_at(0), dof_at(n - 1), n, true});
    return out;
  }
  // start scanning right after a non-negative position so arcs never wrap
  int start = 0;
  while (absorbed[start] < 0) ++start;
  for (int k = 1; k <= n; ++k) {
    const int i = (start + k) % n;
    if (absorbed[i] < 0 && absorbed[(i + n - 1) % n] >= 0) {
      NegativeArc arc;
      arc.first_dof = dof_at(i);
      int len = 0;
      while (absorbed[(i + len) % n] < 0) ++len;
      arc.length = len;
      arc.last_dof = dof_at((i + len - 1) % n);
      out.negative.push_back(arc);
    }
  }
  return out;
}

BoundarySignData boundary_sign_changes(const SurfaceMesh& mesh, const Field& u, double zero_tol,
                                       std::span<const int> forced_zero) {
  require_field(mesh, u);
  BoundarySignData data;
  data.threshold = zero_tol * trace_sup_norm(mesh, u);
  std::vector<char> forced(mesh.num_dofs(), 0);
  for (int d : forced_zero) forced.at(d) = 1;
  for (const auto& loop : mesh.boundary()) {
    std::vector<double> values;
    std::vector<char> flags;
    for (int d : loop.dofs) {
      values.push_back(u[d]);
      flags.push_back(forced[d]);
    }
    LoopSigns signs = classify_loop_signs(values, data.threshold, flags, loop.dofs);
    for (const auto& arc : signs.negative) data.chi_negative += arc.full_loop ? 0 : 1;
    data.sum_ell += signs.ell;
    data.changing_loops += signs.ell > 0 ? 1 : 0;
    data.loops.push_back(std::move(signs));
  }
  return data;
}

std::vector<CriticalPoint> boundary_singular_zeros(const SurfaceMesh& mesh, const Field& u, double zero_tol) {
  require_field(mesh, u);
  const double threshold = zero_tol * trace_sup_norm(mesh, u);
  std::vector<CriticalPoint> points;
  for (int li = 0; li < static_cast<int>(mesh.boundary().size()); ++li) {
    const auto& dofs = mesh.boundary()[li].dofs;
    const int n = static_cast<int>(dofs.size());
    for (int i = 0; i < n; ++i) {
      const int d = dofs[i];
      const double prev = u[dofs[(i + n - 1) % n]];
      const double next = u[dofs[(i + 1) % n]];
      const double here = u[d];
      const double step_in = here - prev;
      const double step_out = next - here;
      // tangential derivative vanishes: trace extremal at the vertex, or flat
      const bool flat = std::abs(next - prev) <= threshold;
      if (!(flat || step_in * step_out <= 0.0)) continue;
      // trace vanishes to the order of its local variation
      const double local = std::max({std::abs(step_in), std::abs(step_out), threshold});
      if (std::abs(here) > local) continue;
      // a nodal segment leaves the vertex into the interior
      bool positive = false;
      bool negative = false;
      bool interior_signed = false;
      for (int w : mesh.link(d)) {
        const int s = sign_of(u[w], threshold);
        positive |= s > 0;
        negative |= s < 0;
        interior_signed |= (s != 0 && !mesh.is_boundary(w) && s != sign_of(here, threshold));
      }
      if (!(positive && negative && interior_signed)) continue;
      CriticalPoint p;
      p.dof = d;
      p.location = mesh.position(d);
      p.kind = PointKind::boundary_singular_zero;
      p.value = here;
      p.loop = li;
      const bool is_min = step_in <= 0.0 && step_out >= 0.0;
      p.index = is_min ? 1 : -1;
      p.classification = is_min ? Classification::minimum : Classification::maximum;
      points.push_back(p);
    }
  }
  return points;
}

std::vector<NodalSegment> nodal_segments(const SurfaceMesh& mesh, const Field& u) {
  require_field(mesh, u);
  std::vector<NodalSegment> segments;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto dofs = mesh.triangle_dofs(t);
    Vec2 hits[3];
    int count = 0;
    for (int c = 0; c < 3; ++c) {
      const double ua = u[dofs[c]];
      const double ub = u[dofs[(c + 1) % 3]];
      if ((ua >= 0.0) == (ub >= 0.0)) continue;
      const double s = ua / (ua - ub);
      const Vec2& pa = mesh.vertices()[tri[c]];
      const Vec2& pb = mesh.vertices()[tri[(c + 1) % 3]];
      hits[count++] = pa + s * (pb - pa);
    }
    if (count == 2) segments.push_back({hits[0], hits[1]});
  }
  return segments;
}

nlohmann::ordered_json to_json(const CriticalPoint& p) {
  nlohmann::ordered_json j;
  j["vertex"] = p.dof;
  j["location"] = {p.location.x(), p.location.y()};
  j["kind"] = to_string(p.kind);
  j["index"] = p.index;
  j["link_sign_changes"] = p.link_sign_changes;
  j["value"] = p.value;
  j["classification"] = to_string(p.classification);
  if (p.loop >= 0) j["boundary_component"] = p.loop;
  return j;
}

nlohmann::ordered_json to_json(const std::vector<CriticalPoint>& points) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : points) arr.push_back(to_json(p));
  return arr;
}

}  // namespace steklov
