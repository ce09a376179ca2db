// SVG rendering of vertex/value maps via the drawing embedding. One filled
// circle per vertex, edges between adjacent support vertices, and a color
// legend; the negative branch is reflected upward as in the embedding.
#pragma once

#include <string>

#include "gasket/io.hpp"

namespace gasket::io {

std::string render_svg(const ValueMap& values, double scale = 40.0);

}  // namespace gasket::io
