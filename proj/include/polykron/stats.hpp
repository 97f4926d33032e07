#pragma once

#include <array>
#include <utility>
#include <vector>

#include "polykron/diophantine.hpp"
#include "polykron/sweep.hpp"

namespace polykron {

// Visit counts (discrete) or time measures (continuous) against a family of
// test boxes. Accumulation is associative: histograms over orbit chunks merge.
struct VisitHistogram {
  std::vector<BoxSet> test_sets;
  std::vector<double> counts;
  double total = 0.0;  // J or T
  int s = 1;
};

VisitHistogram accumulate(const std::vector<SurfacePoint>& orbit,
                          const std::vector<BoxSet>& sets, int s);
VisitHistogram accumulate(const std::vector<ManifoldPoint>& orbit,
                          const std::vector<BoxSet>& sets, int s);
VisitHistogram merge(VisitHistogram a, const VisitHistogram& b);

struct SetRatio {
  BoxSet set;
  double observed = 0.0;
  double expected = 0.0;  // total * lambda(S) / s
  double ratio = 0.0;
};

struct UniformityReport {
  std::vector<SetRatio> sets;
  double total = 0.0;
  int s = 1;
  double sup_deviation = 0.0;  // max |ratio - 1|
  // (checkpoint total, sup deviation at that prefix)
  std::vector<std::pair<double, double>> trend;
};

inline const std::vector<double> kDefaultCheckpoints{1e3, 1e4, 1e5, 1e6};

// Observed-over-expected visiting ratios; expectation is total*lambda(S)/s.
UniformityReport visiting_ratio(const std::vector<SurfacePoint>& orbit,
                                const std::vector<BoxSet>& sets, int s,
                                const std::vector<double>& checkpoints = kDefaultCheckpoints);
UniformityReport visiting_ratio(const std::vector<ManifoldPoint>& orbit,
                                const std::vector<BoxSet>& sets, int s,
                                const std::vector<double>& checkpoints = kDefaultCheckpoints);
UniformityReport visiting_ratio(const GeodesicTrace& trace, const std::vector<BoxSet>& sets,
                                int s,
                                const std::vector<double>& checkpoints = kDefaultCheckpoints);

// Both sides of the discrete-continuous equivalence: the orbit count in S and
// the time the supporting geodesic of direction (v1, v2, 1) spends in the
// swept set S*, which agree exactly up to the step length factor.
struct EquivalenceReport {
  long J = 0;
  double g = 0.0;  // (v1^2 + v2^2 + 1)^(1/2)
  double T = 0.0;  // J * g
  long count = 0;
  double time_in_sweep = 0.0;
  double identity_residual = 0.0;   // |time - g*count|
  double identity_tolerance = 0.0;  // 1e-9 * T
  bool identity_ok = true;
  double ratio_discrete = 0.0;    // count / (J lambda(S) / s)
  double ratio_continuous = 0.0;  // time / (T lambda(S*) / s)
  double sweep_volume = 0.0;
  bool sweep_hits_singular = false;
};

EquivalenceReport equivalence_check(const PolysquareSurface& surface, const SurfacePoint& start,
                                    const Direction2& v, const BoxSet& test_set, long J);

struct DiscrepancyResult {
  double value = 0.0;
  long boxes_evaluated = 0;
  long points = 0;
};

// Star discrepancy over a budgeted grid of anchored boxes whose corners are
// sampled from the point coordinates; exact in the limit of full budget.
DiscrepancyResult star_discrepancy_2d(const std::vector<std::array<double, 2>>& points,
                                      long budget = 1 << 20);

// Grid discretization of a shift into a functional graph on cell centers;
// components are the basins of its terminal cycles. k == 1 is the ergodic
// picture, rational steps give k > 1.
struct DecompositionReport {
  int grid_resolution = 0;
  std::vector<std::vector<long>> components;  // cell ids per component
  int k = 0;
  std::vector<double> measures;
  std::vector<long> singular_cells;  // centers whose shift hits a cone point
  long cells_total = 0;
};

DecompositionReport detect_decomposition(const PolysquareSurface& surface, const Direction2& v,
                                         int resolution);
DecompositionReport detect_decomposition(const PolycubeManifold& manifold, const Direction2& v,
                                         double w3, int resolution);

// Fraction of orbit points lying in the indicator set (a union of boxes).
double birkhoff_average(const std::vector<SurfacePoint>& orbit,
                        const std::vector<BoxSet>& indicator);
double birkhoff_average(const std::vector<ManifoldPoint>& orbit,
                        const std::vector<BoxSet>& indicator);

// Kolmogorov-Smirnov style deviation of circle values from uniform.
double uniform_deviation_1d(std::vector<double> values);

}  // namespace polykron
