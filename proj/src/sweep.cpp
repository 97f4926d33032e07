#include "polykron/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "polykron/errors.hpp"

namespace polykron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Pieces whose chart clip integrates below this are spawn routes blocked by a
// singular cut: the exact clip is empty and quadrature only sees roundoff
// slivers (~1e-30). They must not propagate, or their descendants would claim
// chart windows that belong to the other route around the cone point.
constexpr double kEmptyPieceTol = 1e-14;

struct Vec2 {
  double x, y;
};

using Poly = std::vector<Vec2>;

double poly_area(const Poly& p) {
  double a = 0.0;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % n];
    a += u.x * v.y - v.x * u.y;
  }
  return 0.5 * a;
}

// Keep the side nx*x + ny*y <= d (Sutherland-Hodgman step).
Poly clip_halfplane(const Poly& p, double nx, double ny, double d) {
  Poly out;
  const size_t n = p.size();
  if (n == 0) return out;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    const double da = nx * a.x + ny * a.y - d;
    const double db = nx * b.x + ny * b.y - d;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(Vec2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

Poly clip_unit_square(Poly p) {
  p = clip_halfplane(p, -1.0, 0.0, 0.0);  // x >= 0
  p = clip_halfplane(p, 1.0, 0.0, 1.0);   // x <= 1
  p = clip_halfplane(p, 0.0, -1.0, 0.0);  // y >= 0
  p = clip_halfplane(p, 0.0, 1.0, 1.0);   // y <= 1
  return p;
}

// A piece of the moving base box: the box restricted to a slab between two
// cuts parallel to the sweep direction, travelling through chart (sq, ox, oy)
// from time `birth` until it has fully left the square. All cuts ever applied
// are parallel, so the slab bounds identify the piece exactly and give a
// stable deduplication key for the two spawn routes around a flat vertex.
struct Piece {
  int sq = 0;
  int ox = 0, oy = 0;
  double wlo = -kInf, whi = kInf;
  double birth = 0.0;
};

struct SweepBuilder {
  const PolysquareSurface& surf;
  double v1, v2;
  double bx0, bx1, by0, by1;  // base box S
  SweepSet* out;

  std::set<std::tuple<int, int, int, uint64_t, uint64_t>> visited;
  std::deque<Piece> queue;

  double w_of(double qx, double qy) const { return -v2 * qx + v1 * qy; }

  Poly piece_polygon(const Piece& pc) const {
    Poly p{{bx0, by0}, {bx1, by0}, {bx1, by1}, {bx0, by1}};
    // Slab clips; w is constant along the sweep direction.
    if (pc.wlo > -kInf) p = clip_halfplane(p, v2, -v1, -pc.wlo);   // w >= wlo
    if (pc.whi < kInf) p = clip_halfplane(p, -v2, v1, pc.whi);     // w <= whi
    return p;
  }

  void enqueue(Piece pc) {
    if (pc.birth >= 1.0) return;
    auto key = std::make_tuple(pc.sq, pc.ox, pc.oy, std::bit_cast<uint64_t>(pc.wlo),
                               std::bit_cast<uint64_t>(pc.whi));
    if (!visited.insert(key).second) return;
    queue.push_back(pc);
  }

  void run() {
    size_t guard = 0;
    while (!queue.empty()) {
      if (++guard > 200000) throw std::runtime_error("sweep decomposition did not terminate");
      Piece pc = queue.front();
      queue.pop_front();
      process(pc);
    }
  }

  void process(const Piece& pc) {
    Poly poly = piece_polygon(pc);
    if (poly.size() < 3 || std::abs(poly_area(poly)) < 1e-18) return;

    double minx = kInf, maxx = -kInf, miny = kInf, maxy = -kInf;
    for (const auto& q : poly) {
      minx = std::min(minx, q.x);
      maxx = std::max(maxx, q.x);
      miny = std::min(miny, q.y);
      maxy = std::max(maxy, q.y);
    }

    // Death: first time the polygon's chart extent stops overlapping [0,1].
    double death = 1.0;
    if (v1 > 0.0) {
      death = std::min(death, (1.0 + pc.ox - minx) / v1);
    } else if (v1 < 0.0) {
      death = std::min(death, (pc.ox - maxx) / v1);
    } else if (maxx - pc.ox < 0.0 || minx - pc.ox > 1.0) {
      return;
    }
    if (v2 > 0.0) {
      death = std::min(death, (1.0 + pc.oy - miny) / v2);
    } else if (v2 < 0.0) {
      death = std::min(death, (pc.oy - maxy) / v2);
    } else if (maxy - pc.oy < 0.0 || miny - pc.oy > 1.0) {
      return;
    }
    if (!(death > pc.birth)) return;

    // Cut along the ray through any cone point the moving piece sweeps over:
    // the two sides continue through different gluing routes.
    if ((v1 != 0.0 || v2 != 0.0) && surf.has_singular_vertices()) {
      for (int ci = 0; ci < 4; ++ci) {
        const Corner c = static_cast<Corner>(ci);
        if (!surf.corner_is_singular(pc.sq, c)) continue;
        const double cxd = corner_x(c) + pc.ox;
        const double cyd = corner_y(c) + pc.oy;
        const double wc = w_of(cxd, cyd);
        if (!(wc > pc.wlo && wc < pc.whi)) continue;
        if (!corner_swept(pc, poly, cxd, cyd, death)) continue;
        out->hits_singular_locus = true;
        ++out->singular_cuts;
        Piece lo = pc, hi = pc;
        lo.whi = wc;
        hi.wlo = wc;
        enqueue(lo);
        enqueue(hi);
        return;
      }
    }

    if (!emit(pc, poly, death)) return;

    // Children: spawned the moment the leading edge pokes across a glued edge.
    if (v1 > 0.0) {
      const double t = (1.0 + pc.ox - maxx) / v1;
      if (t < death && t < 1.0)
        enqueue(Piece{surf.right_neighbor(pc.sq), pc.ox + 1, pc.oy, pc.wlo, pc.whi,
                      std::max(t, pc.birth)});
    } else if (v1 < 0.0) {
      const double t = (pc.ox - minx) / v1;
      if (t < death && t < 1.0)
        enqueue(Piece{surf.left_neighbor(pc.sq), pc.ox - 1, pc.oy, pc.wlo, pc.whi,
                      std::max(t, pc.birth)});
    }
    if (v2 > 0.0) {
      const double t = (1.0 + pc.oy - maxy) / v2;
      if (t < death && t < 1.0)
        enqueue(Piece{surf.top_neighbor(pc.sq), pc.ox, pc.oy + 1, pc.wlo, pc.whi,
                      std::max(t, pc.birth)});
    } else if (v2 < 0.0) {
      const double t = (pc.oy - miny) / v2;
      if (t < death && t < 1.0)
        enqueue(Piece{surf.bottom_neighbor(pc.sq), pc.ox, pc.oy - 1, pc.wlo, pc.whi,
                      std::max(t, pc.birth)});
    }
  }

  // Does the cone point at developed position (cxd, cyd) pass strictly inside
  // the moving piece during its lifetime? In piece coordinates the corner
  // travels q_c(t) = (cxd - t*v1, cyd - t*v2).
  bool corner_swept(const Piece& pc, const Poly& poly, double cxd, double cyd,
                    double death) const {
    double t_lo = pc.birth, t_hi = std::min(death, 1.0);
    const auto clip_axis = [&](double c, double v, double lo, double hi) {
      if (v == 0.0) return c > lo && c < hi;
      double a = (c - hi) / v;
      double b = (c - lo) / v;
      if (a > b) std::swap(a, b);
      t_lo = std::max(t_lo, a);
      t_hi = std::min(t_hi, b);
      return true;
    };
    double minx = kInf, maxx = -kInf, miny = kInf, maxy = -kInf;
    for (const auto& q : poly) {
      minx = std::min(minx, q.x);
      maxx = std::max(maxx, q.x);
      miny = std::min(miny, q.y);
      maxy = std::max(maxy, q.y);
    }
    if (!clip_axis(cxd, v1, minx, maxx)) return false;
    if (!clip_axis(cyd, v2, miny, maxy)) return false;
    return t_hi - t_lo > 1e-15;
  }

  bool emit(const Piece& pc, const Poly& poly, double death) {
    SweepPrism prism;
    prism.square = pc.sq;
    prism.z_lo = pc.birth;
    prism.z_hi = std::min(death, 1.0);
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      // Outward normal of a CCW polygon edge; constraint n.q <= d pulled back
      // through q = (x - z v1 + ox, y - z v2 + oy).
      const double nx = b.y - a.y;
      const double ny = a.x - b.x;
      const double d = nx * a.x + ny * a.y;
      prism.cons.push_back(
          {nx, ny, -(nx * v1 + ny * v2), d - nx * pc.ox - ny * pc.oy});
    }
    prism.volume = cell_volume(pc, poly, prism);
    if (!(prism.volume > kEmptyPieceTol)) return false;
    out->prisms.push_back(std::move(prism));
    return true;
  }

  // Volume of the cell: integral over z of the clipped polygon area, which is
  // piecewise quadratic in z; Simpson is exact between breakpoints.
  double cell_volume(const Piece& pc, const Poly& poly, const SweepPrism& prism) const {
    std::vector<double> cuts{prism.z_lo, prism.z_hi};
    auto push = [&](double z) {
      if (z > prism.z_lo + 1e-15 && z < prism.z_hi - 1e-15) cuts.push_back(z);
    };
    // Polygon vertices crossing the chart edge lines: q + z*v - o on x or y
    // in {0, 1}.
    for (const auto& q : poly) {
      if (v1 != 0.0) {
        push((1.0 + pc.ox - q.x) / v1);
        push((0.0 + pc.ox - q.x) / v1);
      }
      if (v2 != 0.0) {
        push((1.0 + pc.oy - q.y) / v2);
        push((0.0 + pc.oy - q.y) / v2);
      }
    }
    // Square corners crossing polygon edge lines.
    const size_t n = poly.size();
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) {
        const double cx = a + pc.ox;
        const double cy = b + pc.oy;
        for (size_t i = 0; i < n; ++i) {
          const Vec2& p = poly[i];
          const Vec2& q = poly[(i + 1) % n];
          const double nx = q.y - p.y;
          const double ny = p.x - q.x;
          const double d = nx * p.x + ny * p.y;
          const double denom = nx * v1 + ny * v2;
          if (denom != 0.0) push((nx * cx + ny * cy - d) / denom);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               cuts.end());

    auto area_at = [&](double z) {
      Poly chart;
      chart.reserve(poly.size());
      for (const auto& q : poly)
        chart.push_back(Vec2{q.x + z * v1 - pc.ox, q.y + z * v2 - pc.oy});
      chart = clip_unit_square(std::move(chart));
      return chart.size() >= 3 ? std::abs(poly_area(chart)) : 0.0;
    };

    double vol = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      const double h = b - a;
      if (h <= 0.0) continue;
      vol += h / 6.0 * (area_at(a) + 4.0 * area_at(0.5 * (a + b)) + area_at(b));
    }
    return vol;
  }
};

}  // namespace

double SweepSet::volume() const {
  double v = 0.0;
  for (const auto& p : prisms) v += p.volume;
  return v;
}

bool SweepSet::contains(int square, double x, double y, double z) const {
  for (const auto& p : prisms) {
    if (p.square != square || z < p.z_lo || z > p.z_hi) continue;
    bool inside = true;
    for (const auto& c : p.cons) {
      if (c[0] * x + c[1] * y + c[2] * z > c[3]) {
        inside = false;
        break;
      }
    }
    if (inside) return true;
  }
  return false;
}

SweepSet sweep(const PolysquareSurface& surface, const BoxSet& base, const Direction3& dir) {
  if (base.square < 0 || base.square >= surface.size())
    throw IndexOutOfRangeError("sweep base square out of range");
  if (!(base.x0 >= 0.0 && base.x0 < base.x1 && base.x1 <= 1.0 && base.y0 >= 0.0 &&
        base.y0 < base.y1 && base.y1 <= 1.0))
    throw ZeroMeasureSetError("sweep base must be a nondegenerate box inside one atomic square");
  if (dir.v3 != 1.0) throw std::invalid_argument("sweep direction must have third component 1");

  SweepSet out;
  out.base_square = base.square;
  out.x0 = base.x0;
  out.x1 = base.x1;
  out.y0 = base.y0;
  out.y1 = base.y1;
  out.v1 = dir.v1;
  out.v2 = dir.v2;

  SweepBuilder builder{surface, dir.v1, dir.v2, base.x0, base.x1, base.y0, base.y1, &out, {}, {}};
  builder.enqueue(Piece{base.square, 0, 0, -kInf, kInf, 0.0});
  builder.run();
  return out;
}

namespace {

// Clip the parameter interval [0, seg.dt] of a straight segment against a set
// of linear constraints in chart coordinates. Returns (lo, hi), empty when
// lo >= hi.
std::pair<double, double> clip_segment(const TraceSegment& seg,
                                       const std::vector<std::array<double, 4>>& cons,
                                       double z_lo, double z_hi) {
  const double dt = seg.dt;
  const double ux = (seg.x1 - seg.x0) / dt;
  const double uy = (seg.y1 - seg.y0) / dt;
  const double uz = (seg.z1 - seg.z0) / dt;
  double lo = 0.0, hi = dt;
  auto apply = [&](double a, double b) {
    // a + t*b <= 0
    if (b == 0.0) {
      if (a > 0.0) lo = hi + 1.0;
      return;
    }
    const double t = -a / b;
    if (b > 0.0) {
      hi = std::min(hi, t);
    } else {
      lo = std::max(lo, t);
    }
  };
  apply(z_lo - seg.z0, -uz);  // z >= z_lo
  apply(seg.z0 - z_hi, uz);   // z <= z_hi
  for (const auto& c : cons) {
    if (lo >= hi) break;
    apply(c[0] * seg.x0 + c[1] * seg.y0 + c[2] * seg.z0 - c[3], c[0] * ux + c[1] * uy + c[2] * uz);
  }
  return {lo, hi};
}

}  // namespace

double time_in_set(const GeodesicTrace& trace, const SweepSet& sset) {
  double total = 0.0;
  for (const auto& seg : trace.segments) {
    if (seg.dt <= 0.0) continue;
    for (const auto& prism : sset.prisms) {
      if (prism.square != seg.square) continue;
      auto [lo, hi] = clip_segment(seg, prism.cons, prism.z_lo, prism.z_hi);
      if (hi > lo) total += hi - lo;
    }
  }
  return total;
}

double time_in_box(const GeodesicTrace& trace, const BoxSet& box) {
  double total = 0.0;
  for (const auto& [lo, hi] : intervals_in_box(trace, box)) total += hi - lo;
  return total;
}

std::vector<std::pair<double, double>> intervals_in_box(const GeodesicTrace& trace,
                                                        const BoxSet& box) {
  std::vector<std::array<double, 4>> cons{
      {-1.0, 0.0, 0.0, -box.x0}, {1.0, 0.0, 0.0, box.x1},
      {0.0, -1.0, 0.0, -box.y0}, {0.0, 1.0, 0.0, box.y1}};
  const double z_lo = box.has_z ? box.z0 : -1.0;
  const double z_hi = box.has_z ? box.z1 : 2.0;
  std::vector<std::pair<double, double>> out;
  for (const auto& seg : trace.segments) {
    if (seg.square != box.square || seg.dt <= 0.0) continue;
    auto [lo, hi] = clip_segment(seg, cons, z_lo, z_hi);
    if (hi > lo) out.emplace_back(seg.t0 + lo, seg.t0 + hi);
  }
  return out;
}

double monte_carlo_volume(const SweepSet& sset, int squares, long samples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> square(0, squares - 1);
  long inside = 0;
  for (long i = 0; i < samples; ++i) {
    if (sset.contains(square(rng), unit(rng), unit(rng), unit(rng))) ++inside;
  }
  return static_cast<double>(squares) * static_cast<double>(inside) /
         static_cast<double>(samples);
}

}  // namespace polykron
