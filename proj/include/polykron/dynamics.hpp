#pragma once

#include <cmath>
#include <vector>

#include "polykron/geometry.hpp"

namespace polykron {

struct Direction2 {
  double v1 = 0.0;
  double v2 = 0.0;
  double norm() const { return std::hypot(v1, v2); }
};

// Direction of a geodesic in M = P x [0,1); the Kronecker normal form has
// v3 = 1.
struct Direction3 {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double norm() const { return std::sqrt(v1 * v1 + v2 * v2 + v3 * v3); }
};

enum class Termination { Completed, HitSingularity };

// One maximal straight piece of a geodesic between identifications. Start and
// end are local coordinates in the closed chart of `square` (an endpoint may
// sit on an edge); z components are 0 for surface traces.
struct TraceSegment {
  int square = 0;
  double x0 = 0, y0 = 0, z0 = 0;
  double x1 = 0, y1 = 0, z1 = 0;
  double t0 = 0;
  double dt = 0;
};

struct GeodesicTrace {
  std::vector<TraceSegment> segments;
  double total_time = 0.0;  // elapsed arc length
  Termination termination = Termination::Completed;
  double hit_time = 0.0;  // arc-length time of the cone-point hit
  bool three_dimensional = false;

  bool completed() const { return termination == Termination::Completed; }
};

// Unit-speed geodesic on P. Crossing a glued edge applies the translation
// identification; a flat vertex is crossed straight through; passing within
// 1e-12 of a cone point terminates the trace.
GeodesicTrace geodesic_flow(const PolysquareSurface& surface, const SurfacePoint& start,
                            const Direction2& dir, double time);

// Unit-speed geodesic in M = P x [0,1). The singular locus is the cone points
// of P times the circle, so hits are decided by base-plane distance.
GeodesicTrace geodesic_flow(const PolycubeManifold& manifold, const ManifoldPoint& start,
                            const Direction3& dir, double time);

template <typename PointT>
struct ShiftResult {
  PointT point{};
  bool hit_singularity = false;
  double hit_time = 0.0;  // arc length along the step at which the hit occurred
};

// The discrete v-shift: the endpoint of the supporting geodesic segment of
// length |v| in direction v. The developed endpoint is computed with a single
// rounding per axis (x + v1, y + v2) and resolved through the gluings with
// exact integer chart steps, so on the torus the iteration is bit-identical
// to the classical mod-1 recurrence.
ShiftResult<SurfacePoint> v_shift(const PolysquareSurface& surface, const SurfacePoint& p,
                                  const Direction2& v);

// The w-shift on M: base advanced by the v-shift, circle coordinate advanced
// to {z + w3} independently of the base point.
ShiftResult<ManifoldPoint> w_shift(const PolycubeManifold& manifold, const ManifoldPoint& p,
                                   const Direction2& v, double w3);

struct Orbit2 {
  std::vector<SurfacePoint> points;
  bool pathological = false;
  long hit_index = -1;  // index of the first point that could not be produced
  double hit_time = 0.0;
};

struct Orbit3 {
  std::vector<ManifoldPoint> points;
  bool pathological = false;
  long hit_index = -1;
  double hit_time = 0.0;
};

// First n points of the Kronecker sequence start, start+v, start+2v, ...
Orbit2 orbit(const PolysquareSurface& surface, const SurfacePoint& start, const Direction2& v,
             long n);
Orbit3 orbit(const PolycubeManifold& manifold, const ManifoldPoint& start, const Direction2& v,
             double w3, long n);

// Tolerance below which a geodesic is deemed to pass through a vertex.
inline constexpr double kSingularHitTol = 1e-12;

}  // namespace polykron
