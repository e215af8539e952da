#pragma once

#include <iosfwd>

#include "steklov/identity.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// Static overlay in parameter coordinates: boundary outline, nodal polyline,
/// negative boundary arcs, interior critical vertices by index, boundary
/// extrema and singular boundary zeros.
void write_overlay_svg(const SurfaceMesh& mesh, const FieldAnalysis& analysis, std::ostream& out);

}  // namespace steklov
