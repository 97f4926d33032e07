#pragma once

#include <array>
#include <utility>
#include <vector>

namespace polykron {

struct GridCell {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Corners of a unit square, in counterclockwise rotation order.
enum class Corner : int { BottomLeft = 0, BottomRight = 1, TopRight = 2, TopLeft = 3 };

inline int corner_x(Corner c) {
  return (c == Corner::BottomRight || c == Corner::TopRight) ? 1 : 0;
}
inline int corner_y(Corner c) {
  return (c == Corner::TopRight || c == Corner::TopLeft) ? 1 : 0;
}

// Equivalence class of square corners identified by the gluings, listed in
// counterclockwise rotation order around the vertex. Each corner contributes
// a quarter turn, so the cone angle is corners.size() * pi/2; the vertex is a
// cone point exactly when the cycle length differs from 4.
struct VertexClass {
  std::vector<std::pair<int, Corner>> corners;
  bool singular() const { return corners.size() != 4; }
};

// A finite polysquare translation surface: unit squares with every right edge
// glued to a left edge and every top edge glued to a bottom edge by pure
// translations. Immutable after construction; safe to share across threads.
class PolysquareSurface {
 public:
  // Default state is the empty surface; build through the factories.
  PolysquareSurface() = default;

  // Wraparound gluing along each maximal horizontal/vertical run of cells
  // ("street" convention). Squares are indexed in (row, col) order.
  static PolysquareSurface from_grid(const std::vector<GridCell>& cells);

  // General gluing permutations: right edge of i -> left edge of
  // right_to_left[i], top edge of i -> bottom edge of top_to_bottom[i].
  static PolysquareSurface from_gluings(int squares, const std::vector<int>& right_to_left,
                                        const std::vector<int>& top_to_bottom);

  int size() const { return static_cast<int>(right_to_left_.size()); }
  double area() const { return static_cast<double>(size()); }

  int right_neighbor(int sq) const { return right_to_left_[sq]; }
  int left_neighbor(int sq) const { return left_to_right_[sq]; }
  int top_neighbor(int sq) const { return top_to_bottom_[sq]; }
  int bottom_neighbor(int sq) const { return bottom_to_top_[sq]; }

  const std::vector<VertexClass>& vertex_classes() const { return classes_; }
  int singular_class_count() const { return singular_count_; }
  int corner_class(int sq, Corner c) const { return corner_class_[4 * sq + static_cast<int>(c)]; }
  bool corner_is_singular(int sq, Corner c) const {
    return classes_[corner_class(sq, c)].singular();
  }
  bool has_singular_vertices() const { return singular_count_ > 0; }

  // Grid anchors when built from a grid spec; from_gluings synthesizes (i, 0).
  const std::vector<GridCell>& anchors() const { return anchors_; }
  bool has_grid_anchors() const { return has_anchors_; }

  const std::vector<int>& right_gluings() const { return right_to_left_; }
  const std::vector<int>& top_gluings() const { return top_to_bottom_; }

 private:
  void finalize();

  std::vector<int> right_to_left_, left_to_right_;
  std::vector<int> top_to_bottom_, bottom_to_top_;
  std::vector<GridCell> anchors_;
  bool has_anchors_ = false;
  std::vector<VertexClass> classes_;
  std::vector<int> corner_class_;
  int singular_count_ = 0;
};

// The product 3-manifold M = P x [0,1): each atomic square carries an atomic
// cube of unit volume, so the total volume equals the number of squares.
struct PolycubeManifold {
  PolysquareSurface base;
  double volume() const { return base.area(); }
  int size() const { return base.size(); }
};

inline PolycubeManifold product_with_circle(PolysquareSurface surface) {
  return PolycubeManifold{std::move(surface)};
}

// A location on P as (square index, local coordinates in [0,1)^2).
struct SurfacePoint {
  int square = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

// A location on M = P x [0,1): surface point plus circle coordinate.
struct ManifoldPoint {
  SurfacePoint base;
  double z = 0.0;
  friend bool operator==(const ManifoldPoint&, const ManifoldPoint&) = default;
};

void validate_point(const PolysquareSurface& surface, const SurfacePoint& p);
void validate_point(const PolycubeManifold& manifold, const ManifoldPoint& p);

// Coordinate-wise mod-1 projection to the unit torus. Local coordinates are
// already the mod-1 image for grid-anchored surfaces.
inline std::array<double, 2> project_to_unit_torus(const SurfacePoint& p) {
  return {p.x, p.y};
}
inline std::array<double, 3> project_to_unit_torus(const ManifoldPoint& p) {
  return {p.base.x, p.base.y, p.z};
}

// The s preimages of a torus point under projection, one per atomic square.
std::vector<SurfacePoint> lifts_of(const PolysquareSurface& surface, double qx, double qy);

}  // namespace polykron
