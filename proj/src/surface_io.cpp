#include "polykron/surface_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polykron/errors.hpp"

namespace polykron {

using nlohmann::json;

PolysquareSurface surface_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("surface spec is not valid JSON: ") + e.what(), "json");
  }
  if (!doc.is_object()) throw ConfigError("surface spec must be a JSON object", "json");

  const bool has_grid = doc.contains("grid");
  const bool has_explicit = doc.contains("squares");
  for (const auto& [key, _] : doc.items()) {
    if (key != "grid" && key != "squares" && key != "h_gluings" && key != "v_gluings") {
      throw ConfigError("surface spec has unknown field \"" + key + "\"", key);
    }
  }
  if (has_grid == has_explicit) {
    throw ConfigError("surface spec needs exactly one of \"grid\" or \"squares\"",
                      has_grid ? "grid" : "squares");
  }

  if (has_grid) {
    if (doc.contains("h_gluings") || doc.contains("v_gluings")) {
      throw ConfigError("grid specs carry no gluing tables", "h_gluings");
    }
    const auto& grid = doc["grid"];
    if (!grid.is_array() || grid.empty())
      throw ConfigError("\"grid\" must be a nonempty array of rows", "grid");
    std::vector<GridCell> cells;
    for (size_t r = 0; r < grid.size(); ++r) {
      if (!grid[r].is_array()) throw ConfigError("\"grid\" rows must be arrays", "grid");
      for (size_t c = 0; c < grid[r].size(); ++c) {
        const auto& v = grid[r][c];
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          throw ConfigError("\"grid\" entries must be 0 or 1", "grid");
        }
        if (v.get<int>() == 1) cells.push_back({static_cast<int>(c), static_cast<int>(r)});
      }
    }
    if (cells.empty()) throw ConfigError("\"grid\" selects no cells", "grid");
    return PolysquareSurface::from_grid(cells);
  }

  if (!doc.contains("h_gluings") || !doc.contains("v_gluings")) {
    throw ConfigError("explicit specs need \"h_gluings\" and \"v_gluings\"", "h_gluings");
  }
  if (!doc["squares"].is_number_integer() || doc["squares"].get<long>() < 1) {
    throw ConfigError("\"squares\" must be a positive integer", "squares");
  }
  auto read_perm = [&](const char* key) {
    const auto& arr = doc[key];
    if (!arr.is_array()) throw ConfigError(std::string("\"") + key + "\" must be an array", key);
    std::vector<int> out;
    for (const auto& v : arr) {
      if (!v.is_number_integer())
        throw ConfigError(std::string("\"") + key + "\" entries must be integers", key);
      out.push_back(v.get<int>());
    }
    return out;
  };
  return PolysquareSurface::from_gluings(doc["squares"].get<int>(), read_perm("h_gluings"),
                                         read_perm("v_gluings"));
}

PolysquareSurface surface_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("surface spec file \"" + path + "\" does not exist", "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return surface_from_json(ss.str());
}

std::string surface_to_json(const PolysquareSurface& surface) {
  json doc;
  doc["squares"] = surface.size();
  doc["h_gluings"] = surface.right_gluings();
  doc["v_gluings"] = surface.top_gluings();
  return doc.dump(2);
}

}  // namespace polykron
