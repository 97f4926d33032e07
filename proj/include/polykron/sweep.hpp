#pragma once

#include <array>
#include <utility>
#include <vector>

#include "polykron/dynamics.hpp"
#include "polykron/geometry.hpp"

namespace polykron {

// Axis-parallel box inside one atomic square (or cube, when has_z is set).
// Point membership is half-open on every axis, so boxes that partition a
// square count every orbit point exactly once.
struct BoxSet {
  int square = 0;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  bool has_z = false;
  double z0 = 0.0, z1 = 1.0;

  double measure() const {
    return (x1 - x0) * (y1 - y0) * (has_z ? (z1 - z0) : 1.0);
  }
  bool contains(const SurfacePoint& p) const {
    return p.square == square && p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1;
  }
  bool contains(const ManifoldPoint& p) const {
    return contains(p.base) && (!has_z || (p.z >= z0 && p.z < z1));
  }
};

// One convex cell of a swept set: a piece of the moving base box clipped to a
// cube chart over a z interval. Each entry of cons is {cx, cy, cz, rhs}
// meaning cx*x + cy*y + cz*z <= rhs in the cube's chart coordinates; the cube
// bounds and the z range are kept separately.
struct SweepPrism {
  int square = 0;
  double z_lo = 0.0, z_hi = 0.0;
  std::vector<std::array<double, 4>> cons;
  double volume = 0.0;
};

// The set swept by S x {0} along a direction (v1, v2, 1) for one circle
// period, resolved through the gluings into convex cells of the atomic cubes.
// Its 3-volume equals the area of S.
struct SweepSet {
  int base_square = 0;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double v1 = 0.0, v2 = 0.0;
  std::vector<SweepPrism> prisms;
  // Set when the swept slab meets a singular vertical line; the pieces are
  // then cut along the rays through the cone points, not discarded.
  bool hits_singular_locus = false;
  int singular_cuts = 0;

  double volume() const;
  bool contains(int square, double x, double y, double z) const;
};

SweepSet sweep(const PolysquareSurface& surface, const BoxSet& base, const Direction3& dir);

// Lebesgue measure of the time a trace spends in the set, computed exactly
// per segment by interval intersection; a segment meets a convex cell in at
// most one parameter interval.
double time_in_set(const GeodesicTrace& trace, const SweepSet& sset);
double time_in_box(const GeodesicTrace& trace, const BoxSet& box);

// Global-time intervals the trace spends in the box, for checkpointed trends.
std::vector<std::pair<double, double>> intervals_in_box(const GeodesicTrace& trace,
                                                        const BoxSet& box);

// Independent Monte-Carlo estimate of the swept volume over the whole
// manifold of `squares` atomic cubes.
double monte_carlo_volume(const SweepSet& sset, int squares, long samples, unsigned long seed);

}  // namespace polykron
