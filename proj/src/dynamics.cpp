#include "polykron/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polykron/errors.hpp"
#include "polykron/realmath.hpp"

namespace polykron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Coarse gate on crossing coordinates before the exact distance test. A path
// within kSingularHitTol of a vertex crosses at least one adjacent grid line
// within sqrt(2) times that distance of it, so the gate cannot miss a hit.
constexpr double kCornerGate = 1e-9;

// State of the chart walk: positions live on the developed line and the
// integer offsets track the gluings applied, so local coordinates are always
// developed minus offset and every chart update is exact. Crossings are
// processed in path order; at an exact vertex crossing the two axis crossings
// coincide and processing them back to back continues the geodesic straight
// through the flat vertex (the gluings around a cycle of length 4 commute).
struct Walk {
  const PolysquareSurface* surf;
  int sq;
  int mx = 0, my = 0;

  void cross_x(bool positive) {
    if (positive) {
      sq = surf->right_neighbor(sq);
      ++mx;
    } else {
      sq = surf->left_neighbor(sq);
      --mx;
    }
  }
  void cross_y(bool positive) {
    if (positive) {
      sq = surf->top_neighbor(sq);
      ++my;
    } else {
      sq = surf->bottom_neighbor(sq);
      --my;
    }
  }

  Corner chart_corner(long line_x, long line_y) const {
    const long cx = line_x - mx;
    const long cy = line_y - my;
    if (cx == 0 && cy == 0) return Corner::BottomLeft;
    if (cx == 1 && cy == 0) return Corner::BottomRight;
    if (cx == 1 && cy == 1) return Corner::TopRight;
    if (cx == 0 && cy == 1) return Corner::TopLeft;
    throw NumericalDegeneracyError(
        "crossing cannot be classified: vertex candidate outside the current chart");
  }
};

struct CornerHit {
  bool hit = false;
  double t = 0.0;  // closest-approach parameter, clamped to [0, tmax]
};

// Exact distance test between the base-plane segment p0 + t*(vx,vy),
// t in [0, tmax], and the developed vertex (cx, cy); reports a hit when the
// vertex is singular and the segment passes within kSingularHitTol of it.
CornerHit probe_vertex(const PolysquareSurface& surf, const Walk& walk, double x0, double y0,
                       double vx, double vy, double tmax, double cx, double cy) {
  CornerHit out;
  const double rx = cx - x0;
  const double ry = cy - y0;
  const double sp2 = vx * vx + vy * vy;
  double t = sp2 > 0.0 ? (rx * vx + ry * vy) / sp2 : 0.0;
  t = std::clamp(t, 0.0, tmax);
  const double dx = rx - t * vx;
  const double dy = ry - t * vy;
  if (dx * dx + dy * dy >= kSingularHitTol * kSingularHitTol) return out;
  Corner c = walk.chart_corner(std::llround(cx), std::llround(cy));
  if (!surf.corner_is_singular(walk.sq, c)) return out;
  out.hit = true;
  out.t = t;
  return out;
}

double next_line(int m, bool positive) { return positive ? m + 1.0 : static_cast<double>(m); }

}  // namespace

ShiftResult<SurfacePoint> v_shift(const PolysquareSurface& surface, const SurfacePoint& p,
                                  const Direction2& v) {
  validate_point(surface, p);
  const double vx = v.v1;
  const double vy = v.v2;
  const double speed = std::hypot(vx, vy);
  // Developed endpoint; exactly one rounding per axis.
  const double gx = p.x + vx;
  const double gy = p.y + vy;

  Walk walk{&surface, p.square};
  const bool has_singular = surface.has_singular_vertices();

  while (true) {
    double tx = kInf, ty = kInf;
    if (vx > 0.0) {
      const double line = walk.mx + 1.0;
      if (gx >= line) tx = (line - p.x) / vx;
    } else if (vx < 0.0) {
      const double line = walk.mx;
      if (gx < line) tx = (line - p.x) / vx;
    }
    if (vy > 0.0) {
      const double line = walk.my + 1.0;
      if (gy >= line) ty = (line - p.y) / vy;
    } else if (vy < 0.0) {
      const double line = walk.my;
      if (gy < line) ty = (line - p.y) / vy;
    }
    if (tx == kInf && ty == kInf) break;

    if (tx <= ty) {
      const double cross_y = p.y + tx * vy;
      if (has_singular && dist_to_int(cross_y) < kCornerGate) {
        auto hit = probe_vertex(surface, walk, p.x, p.y, vx, vy, 1.0, next_line(walk.mx, vx > 0.0),
                                std::nearbyint(cross_y));
        if (hit.hit) return {SurfacePoint{}, true, hit.t * speed};
      }
      walk.cross_x(vx > 0.0);
    } else {
      const double cross_x = p.x + ty * vx;
      if (has_singular && dist_to_int(cross_x) < kCornerGate) {
        auto hit = probe_vertex(surface, walk, p.x, p.y, vx, vy, 1.0, std::nearbyint(cross_x),
                                next_line(walk.my, vy > 0.0));
        if (hit.hit) return {SurfacePoint{}, true, hit.t * speed};
      }
      walk.cross_y(vy > 0.0);
    }
  }

  SurfacePoint out{walk.sq, gx - walk.mx, gy - walk.my};
  // A step whose endpoint lands within tolerance of a cone point hits it.
  if (has_singular) {
    const double ex = std::min(out.x, 1.0 - out.x);
    const double ey = std::min(out.y, 1.0 - out.y);
    if (ex < kCornerGate && ey < kCornerGate) {
      const int cx = out.x >= 0.5 ? 1 : 0;
      const int cy = out.y >= 0.5 ? 1 : 0;
      if (std::hypot(out.x - cx, out.y - cy) < kSingularHitTol &&
          surface.corner_is_singular(out.square, walk.chart_corner(walk.mx + cx, walk.my + cy))) {
        return {SurfacePoint{}, true, speed};
      }
    }
  }
  return {out, false, 0.0};
}

ShiftResult<ManifoldPoint> w_shift(const PolycubeManifold& manifold, const ManifoldPoint& p,
                                   const Direction2& v, double w3) {
  validate_point(manifold, p);
  auto base = v_shift(manifold.base, p.base, v);
  if (base.hit_singularity) return {ManifoldPoint{}, true, base.hit_time};
  return {ManifoldPoint{base.point, wrap_unit(p.z + w3)}, false, 0.0};
}

Orbit2 orbit(const PolysquareSurface& surface, const SurfacePoint& start, const Direction2& v,
             long n) {
  if (n < 0) throw IndexOutOfRangeError("orbit length must be nonnegative");
  Orbit2 out;
  if (n == 0) return out;
  validate_point(surface, start);
  out.points.reserve(static_cast<size_t>(n));
  SurfacePoint p = start;
  out.points.push_back(p);
  for (long j = 1; j < n; ++j) {
    auto step = v_shift(surface, p, v);
    if (step.hit_singularity) {
      out.pathological = true;
      out.hit_index = j;
      out.hit_time = step.hit_time;
      return out;
    }
    p = step.point;
    out.points.push_back(p);
  }
  return out;
}

Orbit3 orbit(const PolycubeManifold& manifold, const ManifoldPoint& start, const Direction2& v,
             double w3, long n) {
  if (n < 0) throw IndexOutOfRangeError("orbit length must be nonnegative");
  Orbit3 out;
  if (n == 0) return out;
  validate_point(manifold, start);
  out.points.reserve(static_cast<size_t>(n));
  ManifoldPoint p = start;
  out.points.push_back(p);
  for (long j = 1; j < n; ++j) {
    auto step = w_shift(manifold, p, v, w3);
    if (step.hit_singularity) {
      out.pathological = true;
      out.hit_index = j;
      out.hit_time = step.hit_time;
      return out;
    }
    p = step.point;
    out.points.push_back(p);
  }
  return out;
}

namespace {

// Shared tracer for surface and manifold geodesics. Velocity components form
// the unit-speed direction; track_z == false gives the surface case. Segment
// positions are evaluated from the developed line, never accumulated.
GeodesicTrace trace_walk(const PolysquareSurface& surface, int square, double x0, double y0,
                         double z0, double ux, double uy, double uz, double tmax, bool track_z) {
  GeodesicTrace trace;
  trace.three_dimensional = track_z;

  Walk walk{&surface, square};
  int mz = 0;
  double t_cur = 0.0;
  double sx = x0, sy = y0, sz = z0;  // segment start locals

  auto local_x = [&](double t) { return x0 + t * ux - walk.mx; };
  auto local_y = [&](double t) { return y0 + t * uy - walk.my; };
  auto local_z = [&](double t) { return z0 + t * uz - mz; };

  auto emit = [&](double t_end, double ex, double ey, double ez) {
    if (t_end > t_cur) {
      trace.segments.push_back(TraceSegment{walk.sq, sx, sy, sz, ex, ey, ez, t_cur, t_end - t_cur});
    }
    t_cur = t_end;
  };

  const bool has_singular = surface.has_singular_vertices();

  while (true) {
    double tx = kInf, ty = kInf, tz = kInf;
    if (ux > 0.0) {
      tx = (walk.mx + 1.0 - x0) / ux;
    } else if (ux < 0.0) {
      tx = (walk.mx - x0) / ux;
    }
    if (uy > 0.0) {
      ty = (walk.my + 1.0 - y0) / uy;
    } else if (uy < 0.0) {
      ty = (walk.my - y0) / uy;
    }
    if (track_z) {
      if (uz > 0.0) {
        tz = (mz + 1.0 - z0) / uz;
      } else if (uz < 0.0) {
        tz = (mz - z0) / uz;
      }
    }

    const double tnext = std::min({tx, ty, tz});
    if (tnext > tmax) {
      emit(tmax, local_x(tmax), local_y(tmax), local_z(tmax));
      trace.total_time = tmax;
      if (has_singular) {
        const double fx = local_x(tmax);
        const double fy = local_y(tmax);
        if (std::min(fx, 1.0 - fx) < kCornerGate && std::min(fy, 1.0 - fy) < kCornerGate) {
          const int cx = fx >= 0.5 ? 1 : 0;
          const int cy = fy >= 0.5 ? 1 : 0;
          if (std::hypot(fx - cx, fy - cy) < kSingularHitTol &&
              surface.corner_is_singular(walk.sq, walk.chart_corner(walk.mx + cx, walk.my + cy))) {
            trace.termination = Termination::HitSingularity;
            trace.hit_time = tmax;
          }
        }
      }
      return trace;
    }

    if (tz <= tx && tz <= ty) {
      // Circle wrap: same square, z restarts across the cube face.
      const bool up = uz > 0.0;
      emit(tz, local_x(tz), local_y(tz), up ? 1.0 : 0.0);
      mz += up ? 1 : -1;
      sx = local_x(tz);
      sy = local_y(tz);
      sz = up ? 0.0 : 1.0;
      continue;
    }

    if (tx <= ty) {
      const double cross_y = y0 + tx * uy;
      if (has_singular && dist_to_int(cross_y) < kCornerGate) {
        auto hit = probe_vertex(surface, walk, x0, y0, ux, uy, tmax, next_line(walk.mx, ux > 0.0),
                                std::nearbyint(cross_y));
        if (hit.hit) {
          emit(hit.t, local_x(hit.t), local_y(hit.t), local_z(hit.t));
          trace.total_time = hit.t;
          trace.termination = Termination::HitSingularity;
          trace.hit_time = hit.t;
          return trace;
        }
      }
      const bool pos = ux > 0.0;
      emit(tx, pos ? 1.0 : 0.0, local_y(tx), local_z(tx));
      walk.cross_x(pos);
      sx = pos ? 0.0 : 1.0;
      sy = local_y(tx);
      sz = local_z(tx);
    } else {
      const double cross_x = x0 + ty * ux;
      if (has_singular && dist_to_int(cross_x) < kCornerGate) {
        auto hit = probe_vertex(surface, walk, x0, y0, ux, uy, tmax, std::nearbyint(cross_x),
                                next_line(walk.my, uy > 0.0));
        if (hit.hit) {
          emit(hit.t, local_x(hit.t), local_y(hit.t), local_z(hit.t));
          trace.total_time = hit.t;
          trace.termination = Termination::HitSingularity;
          trace.hit_time = hit.t;
          return trace;
        }
      }
      const bool pos = uy > 0.0;
      emit(ty, local_x(ty), pos ? 1.0 : 0.0, local_z(ty));
      walk.cross_y(pos);
      sx = local_x(ty);
      sy = pos ? 0.0 : 1.0;
      sz = local_z(ty);
    }
  }
}

}  // namespace

GeodesicTrace geodesic_flow(const PolysquareSurface& surface, const SurfacePoint& start,
                            const Direction2& dir, double time) {
  validate_point(surface, start);
  const double n = dir.norm();
  if (!(n > 0.0)) throw IndexOutOfRangeError("direction must be nonzero");
  if (!(time >= 0.0)) throw IndexOutOfRangeError("flow time must be nonnegative");
  return trace_walk(surface, start.square, start.x, start.y, 0.0, dir.v1 / n, dir.v2 / n, 0.0,
                    time, false);
}

GeodesicTrace geodesic_flow(const PolycubeManifold& manifold, const ManifoldPoint& start,
                            const Direction3& dir, double time) {
  validate_point(manifold, start);
  const double n = dir.norm();
  if (!(n > 0.0)) throw IndexOutOfRangeError("direction must be nonzero");
  if (!(time >= 0.0)) throw IndexOutOfRangeError("flow time must be nonnegative");
  return trace_walk(manifold.base, start.base.square, start.base.x, start.base.y, start.z,
                    dir.v1 / n, dir.v2 / n, dir.v3 / n, time, true);
}

}  // namespace polykron
