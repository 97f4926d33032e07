#pragma once

#include <string>

#include "polykron/geometry.hpp"

namespace polykron {

// Surface spec JSON: either {"grid": [[0/1, ...], ...]} with row 0 the bottom
// row, or {"squares": s, "h_gluings": [...], "v_gluings": [...]}. Unknown
// fields are rejected; errors name the offending field.
PolysquareSurface surface_from_json(const std::string& text);
PolysquareSurface surface_from_file(const std::string& path);
std::string surface_to_json(const PolysquareSurface& surface);

}  // namespace polykron
