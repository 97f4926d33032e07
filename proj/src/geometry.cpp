#include "polykron/geometry.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "polykron/errors.hpp"

namespace polykron {

namespace {

// One counterclockwise step of the corner-rotation permutation: crossing the
// edge that bounds the current quarter-turn wedge lands in the adjacent
// square's wedge. The cycles of this permutation are the vertex classes.
std::pair<int, Corner> rotate_corner(const PolysquareSurface& s, int sq, Corner c) {
  switch (c) {
    case Corner::BottomLeft:
      return {s.left_neighbor(sq), Corner::BottomRight};
    case Corner::BottomRight:
      return {s.bottom_neighbor(sq), Corner::TopRight};
    case Corner::TopRight:
      return {s.right_neighbor(sq), Corner::TopLeft};
    case Corner::TopLeft:
      return {s.top_neighbor(sq), Corner::BottomLeft};
  }
  return {sq, c};
}

void check_permutation(const std::vector<int>& perm, int n, const char* kind) {
  std::vector<int> hits(n, 0);
  for (int i = 0; i < n; ++i) {
    int j = perm[i];
    if (j < 0 || j >= n) {
      throw IndexOutOfRangeError(std::string(kind) + " gluing of square " + std::to_string(i) +
                                 " targets square " + std::to_string(j) + " out of range 0.." +
                                 std::to_string(n - 1));
    }
    ++hits[j];
  }
  for (int j = 0; j < n; ++j) {
    if (hits[j] != 1) {
      throw NotAMatchingError(std::string(kind) + " gluing is not a perfect matching: edge of square " +
                              std::to_string(j) + " is glued " + std::to_string(hits[j]) + " times");
    }
  }
}

std::vector<int> invert(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (int i = 0; i < static_cast<int>(perm.size()); ++i) inv[perm[i]] = i;
  return inv;
}

}  // namespace

PolysquareSurface PolysquareSurface::from_grid(const std::vector<GridCell>& cells) {
  if (cells.empty()) throw EmptySpecError("grid spec contains no cells");

  std::vector<GridCell> sorted = cells;
  std::sort(sorted.begin(), sorted.end(), [](const GridCell& a, const GridCell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const int n = static_cast<int>(sorted.size());
  std::map<std::pair<int, int>, int> index;  // (col,row) -> square id
  for (int i = 0; i < n; ++i) index[{sorted[i].col, sorted[i].row}] = i;

  std::vector<int> h(n, -1), v(n, -1);

  // Horizontal streets: within each maximal run of a row, each right edge
  // glues to the next cell's left edge and the run wraps around.
  for (int i = 0; i < n; ++i) {
    auto it = index.find({sorted[i].col + 1, sorted[i].row});
    if (it != index.end()) {
      h[i] = it->second;
    } else {
      int c = sorted[i].col;
      while (index.count({c - 1, sorted[i].row})) --c;
      h[i] = index.at({c, sorted[i].row});
    }
  }
  // Vertical streets, same convention per column.
  for (int i = 0; i < n; ++i) {
    auto it = index.find({sorted[i].col, sorted[i].row + 1});
    if (it != index.end()) {
      v[i] = it->second;
    } else {
      int r = sorted[i].row;
      while (index.count({sorted[i].col, r - 1})) --r;
      v[i] = index.at({sorted[i].col, r});
    }
  }

  PolysquareSurface s;
  s.right_to_left_ = std::move(h);
  s.top_to_bottom_ = std::move(v);
  s.anchors_ = std::move(sorted);
  s.has_anchors_ = true;
  s.finalize();
  return s;
}

PolysquareSurface PolysquareSurface::from_gluings(int squares, const std::vector<int>& right_to_left,
                                                  const std::vector<int>& top_to_bottom) {
  if (squares <= 0) throw EmptySpecError("surface needs at least one square");
  if (static_cast<int>(right_to_left.size()) != squares ||
      static_cast<int>(top_to_bottom.size()) != squares) {
    throw NotAMatchingError("gluing tables must list exactly one target per square");
  }
  check_permutation(right_to_left, squares, "horizontal");
  check_permutation(top_to_bottom, squares, "vertical");

  PolysquareSurface s;
  s.right_to_left_ = right_to_left;
  s.top_to_bottom_ = top_to_bottom;
  s.anchors_.resize(squares);
  for (int i = 0; i < squares; ++i) s.anchors_[i] = GridCell{i, 0};
  s.has_anchors_ = false;
  s.finalize();
  return s;
}

void PolysquareSurface::finalize() {
  const int n = size();
  check_permutation(right_to_left_, n, "horizontal");
  check_permutation(top_to_bottom_, n, "vertical");
  left_to_right_ = invert(right_to_left_);
  bottom_to_top_ = invert(top_to_bottom_);

  corner_class_.assign(4 * n, -1);
  classes_.clear();
  singular_count_ = 0;
  for (int sq = 0; sq < n; ++sq) {
    for (int ci = 0; ci < 4; ++ci) {
      if (corner_class_[4 * sq + ci] >= 0) continue;
      VertexClass vc;
      int id = static_cast<int>(classes_.size());
      int cur_sq = sq;
      Corner cur_c = static_cast<Corner>(ci);
      do {
        corner_class_[4 * cur_sq + static_cast<int>(cur_c)] = id;
        vc.corners.emplace_back(cur_sq, cur_c);
        auto next = rotate_corner(*this, cur_sq, cur_c);
        cur_sq = next.first;
        cur_c = next.second;
      } while (cur_sq != sq || cur_c != static_cast<Corner>(ci));
      if (vc.singular()) ++singular_count_;
      classes_.push_back(std::move(vc));
    }
  }
}

void validate_point(const PolysquareSurface& surface, const SurfacePoint& p) {
  if (p.square < 0 || p.square >= surface.size()) {
    throw IndexOutOfRangeError("square index " + std::to_string(p.square) + " out of range 0.." +
                               std::to_string(surface.size() - 1));
  }
  if (!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0)) {
    throw IndexOutOfRangeError("local coordinates must lie in [0,1)");
  }
}

void validate_point(const PolycubeManifold& manifold, const ManifoldPoint& p) {
  validate_point(manifold.base, p.base);
  if (!(p.z >= 0.0 && p.z < 1.0)) {
    throw IndexOutOfRangeError("circle coordinate must lie in [0,1)");
  }
}

std::vector<SurfacePoint> lifts_of(const PolysquareSurface& surface, double qx, double qy) {
  if (!(qx >= 0.0 && qx < 1.0 && qy >= 0.0 && qy < 1.0)) {
    throw IndexOutOfRangeError("torus point must lie in [0,1)^2");
  }
  std::vector<SurfacePoint> out;
  out.reserve(surface.size());
  for (int sq = 0; sq < surface.size(); ++sq) out.push_back(SurfacePoint{sq, qx, qy});
  return out;
}

}  // namespace polykron
