#include "polykron/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "polykron/errors.hpp"
#include "polykron/realmath.hpp"

namespace polykron {

namespace {

void check_sets(const std::vector<BoxSet>& sets) {
  for (const auto& b : sets) {
    if (!(b.measure() > 0.0)) throw ZeroMeasureSetError("test set has zero Lebesgue measure");
  }
}

std::vector<double> usable_checkpoints(const std::vector<double>& checkpoints, double total) {
  std::vector<double> out;
  for (double c : checkpoints) {
    if (c > 0.0 && c <= total) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double sup_dev(const std::vector<double>& counts, const std::vector<BoxSet>& sets, double total,
               int s) {
  double dev = 0.0;
  for (size_t i = 0; i < sets.size(); ++i) {
    const double expected = total * sets[i].measure() / s;
    if (expected > 0.0) dev = std::max(dev, std::abs(counts[i] / expected - 1.0));
  }
  return dev;
}

template <typename PointT>
UniformityReport ratio_from_points(const std::vector<PointT>& orbit,
                                   const std::vector<BoxSet>& sets, int s,
                                   const std::vector<double>& checkpoints) {
  check_sets(sets);
  if (orbit.empty()) throw EmptyInputError("visiting_ratio needs a nonempty orbit");

  UniformityReport rep;
  rep.total = static_cast<double>(orbit.size());
  rep.s = s;

  std::vector<double> counts(sets.size(), 0.0);
  auto cps = usable_checkpoints(checkpoints, rep.total);
  size_t next_cp = 0;
  for (size_t j = 0; j < orbit.size(); ++j) {
    for (size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].contains(orbit[j])) counts[i] += 1.0;
    }
    while (next_cp < cps.size() && static_cast<double>(j + 1) >= cps[next_cp]) {
      rep.trend.emplace_back(cps[next_cp], sup_dev(counts, sets, cps[next_cp], s));
      ++next_cp;
    }
  }

  for (size_t i = 0; i < sets.size(); ++i) {
    SetRatio r;
    r.set = sets[i];
    r.observed = counts[i];
    r.expected = rep.total * sets[i].measure() / s;
    r.ratio = r.observed / r.expected;
    rep.sets.push_back(r);
  }
  rep.sup_deviation = sup_dev(counts, sets, rep.total, s);
  return rep;
}

}  // namespace

VisitHistogram accumulate(const std::vector<SurfacePoint>& orbit, const std::vector<BoxSet>& sets,
                          int s) {
  check_sets(sets);
  VisitHistogram h;
  h.test_sets = sets;
  h.counts.assign(sets.size(), 0.0);
  h.total = static_cast<double>(orbit.size());
  h.s = s;
  for (const auto& p : orbit) {
    for (size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].contains(p)) h.counts[i] += 1.0;
    }
  }
  return h;
}

VisitHistogram accumulate(const std::vector<ManifoldPoint>& orbit, const std::vector<BoxSet>& sets,
                          int s) {
  check_sets(sets);
  VisitHistogram h;
  h.test_sets = sets;
  h.counts.assign(sets.size(), 0.0);
  h.total = static_cast<double>(orbit.size());
  h.s = s;
  for (const auto& p : orbit) {
    for (size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].contains(p)) h.counts[i] += 1.0;
    }
  }
  return h;
}

VisitHistogram merge(VisitHistogram a, const VisitHistogram& b) {
  if (a.counts.size() != b.counts.size() || a.s != b.s)
    throw EmptyInputError("histograms over different test families cannot merge");
  for (size_t i = 0; i < a.counts.size(); ++i) a.counts[i] += b.counts[i];
  a.total += b.total;
  return a;
}

UniformityReport visiting_ratio(const std::vector<SurfacePoint>& orbit,
                                const std::vector<BoxSet>& sets, int s,
                                const std::vector<double>& checkpoints) {
  return ratio_from_points(orbit, sets, s, checkpoints);
}

UniformityReport visiting_ratio(const std::vector<ManifoldPoint>& orbit,
                                const std::vector<BoxSet>& sets, int s,
                                const std::vector<double>& checkpoints) {
  return ratio_from_points(orbit, sets, s, checkpoints);
}

UniformityReport visiting_ratio(const GeodesicTrace& trace, const std::vector<BoxSet>& sets,
                                int s, const std::vector<double>& checkpoints) {
  check_sets(sets);
  if (!(trace.total_time > 0.0)) throw EmptyInputError("visiting_ratio needs positive trace time");

  UniformityReport rep;
  rep.total = trace.total_time;
  rep.s = s;

  std::vector<std::vector<std::pair<double, double>>> per_set;
  per_set.reserve(sets.size());
  for (const auto& b : sets) per_set.push_back(intervals_in_box(trace, b));

  auto cps = usable_checkpoints(checkpoints, rep.total);
  std::vector<double> counts(sets.size(), 0.0);
  for (double cp : cps) {
    for (size_t i = 0; i < sets.size(); ++i) {
      double t = 0.0;
      for (const auto& [lo, hi] : per_set[i]) {
        if (lo >= cp) break;
        t += std::min(hi, cp) - lo;
      }
      counts[i] = t;
    }
    rep.trend.emplace_back(cp, sup_dev(counts, sets, cp, s));
  }

  std::vector<double> totals(sets.size(), 0.0);
  for (size_t i = 0; i < sets.size(); ++i) {
    SetRatio r;
    r.set = sets[i];
    for (const auto& [lo, hi] : per_set[i]) r.observed += hi - lo;
    totals[i] = r.observed;
    r.expected = rep.total * sets[i].measure() / s;
    r.ratio = r.observed / r.expected;
    rep.sets.push_back(r);
  }
  rep.sup_deviation = sup_dev(totals, sets, rep.total, s);
  return rep;
}

EquivalenceReport equivalence_check(const PolysquareSurface& surface, const SurfacePoint& start,
                                    const Direction2& v, const BoxSet& test_set, long J) {
  if (!(test_set.measure() > 0.0)) throw ZeroMeasureSetError("test set has zero measure");
  if (J < 0) throw IndexOutOfRangeError("J must be nonnegative");

  EquivalenceReport rep;
  rep.J = J;
  rep.g = std::sqrt(v.v1 * v.v1 + v.v2 * v.v2 + 1.0);
  rep.T = static_cast<double>(J) * rep.g;
  rep.identity_tolerance = 1e-9 * rep.T;
  if (J == 0) return rep;

  auto orb = orbit(surface, start, v, J);
  if (orb.pathological) {
    throw PathologicalStartError("orbit hits a cone point at step " + std::to_string(orb.hit_index),
                                 orb.hit_index, orb.hit_time);
  }
  for (const auto& p : orb.points) {
    if (test_set.contains(p)) ++rep.count;
  }

  const PolycubeManifold manifold{surface};
  auto trace = geodesic_flow(manifold, ManifoldPoint{start, 0.0}, Direction3{v.v1, v.v2, 1.0},
                             rep.T);
  if (!trace.completed()) {
    throw PathologicalStartError("supporting geodesic hits the singular locus", -1,
                                 trace.hit_time);
  }

  auto sset = sweep(surface, test_set, Direction3{v.v1, v.v2, 1.0});
  rep.time_in_sweep = time_in_set(trace, sset);
  rep.sweep_volume = sset.volume();
  rep.sweep_hits_singular = sset.hits_singular_locus;

  rep.identity_residual = std::abs(rep.time_in_sweep - rep.g * static_cast<double>(rep.count));
  rep.identity_ok = rep.identity_residual <= rep.identity_tolerance;

  const int s = surface.size();
  rep.ratio_discrete =
      static_cast<double>(rep.count) / (static_cast<double>(J) * test_set.measure() / s);
  rep.ratio_continuous = rep.time_in_sweep / (rep.T * test_set.measure() / s);
  return rep;
}

DiscrepancyResult star_discrepancy_2d(const std::vector<std::array<double, 2>>& points,
                                      long budget) {
  if (points.empty()) throw EmptyInputError("star discrepancy needs at least one point");
  if (budget < 1) budget = 1;
  const long n = static_cast<long>(points.size());

  // Candidate corners are rank-sampled point coordinates plus 1.0; both the
  // open-box and closed-box counts are evaluated at every corner to catch the
  // sup from either side.
  const long per_axis = std::max<long>(1, static_cast<long>(std::sqrt(static_cast<double>(budget))));
  auto candidates = [&](int axis) {
    std::vector<double> coords(points.size());
    for (size_t i = 0; i < points.size(); ++i) coords[i] = points[i][axis];
    std::sort(coords.begin(), coords.end());
    std::vector<double> out;
    if (per_axis >= n) {
      out = coords;
    } else {
      for (long k = 0; k < per_axis; ++k) out.push_back(coords[(k * n) / per_axis]);
    }
    out.push_back(1.0);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto gx = candidates(0);
  const auto gy = candidates(1);

  // Distinct y values index a Fenwick tree of counts.
  std::vector<double> ys(points.size());
  for (size_t i = 0; i < points.size(); ++i) ys[i] = points[i][1];
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const long m = static_cast<long>(ys.size());
  std::vector<long> fenwick(m + 1, 0);
  auto add = [&](long i) {
    for (++i; i <= m; i += i & -i) ++fenwick[i];
  };
  auto prefix = [&](long i) {  // count of ranks < i
    long t = 0;
    for (; i > 0; i -= i & -i) t += fenwick[i];
    return t;
  };
  auto rank_lt = [&](double y) {
    return static_cast<long>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin());
  };
  auto rank_le = [&](double y) {
    return static_cast<long>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin());
  };

  std::vector<std::array<double, 2>> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });

  DiscrepancyResult res;
  res.points = n;
  size_t ptr = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double cx : gx) {
    while (ptr < sorted.size() && sorted[ptr][0] < cx) add(rank_lt(sorted[ptr++][1]));
    size_t ptr_closed = ptr;
    // Evaluate with the strict-x set, then with x == cx included.
    for (int closed_x = 0; closed_x < 2; ++closed_x) {
      if (closed_x) {
        while (ptr_closed < sorted.size() && sorted[ptr_closed][0] <= cx)
          add(rank_lt(sorted[ptr_closed++][1]));
      }
      for (double cy : gy) {
        const double area = cx * cy;
        const double lt = static_cast<double>(prefix(rank_lt(cy)));
        const double le = static_cast<double>(prefix(rank_le(cy)));
        res.value = std::max(res.value, std::abs(lt * inv_n - area));
        res.value = std::max(res.value, std::abs(le * inv_n - area));
        res.boxes_evaluated += 2;
      }
    }
    // Rebuild is avoided by processing closed-x additions permanently; points
    // with px == cx are strictly below the next candidate anyway.
    ptr = ptr_closed;
  }
  return res;
}

namespace {

struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) {
    for (long i = 0; i < n; ++i) parent[i] = i;
  }
  long find(long x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// The shift maps each grid cell onto a translated cell-sized box; sampling an
// in-cell grid with near-edge offsets recovers every cell that box overlaps,
// up to slivers thinner than a sixteenth of a cell. Components are the cell
// families closed under these image edges. A plain center map would
// discretize any torus shift to a rigid grid rotation and could never report
// a single component, so the edges must carry the set-valued image.
constexpr double kSampleOffsets[4] = {0.0625, 0.375, 0.625, 0.9375};

DecompositionReport finish_decomposition(UnionFind& uf, const std::vector<char>& flagged,
                                         long cell_count, int resolution, double cell_measure) {
  DecompositionReport rep;
  rep.grid_resolution = resolution;
  rep.cells_total = cell_count;

  std::map<long, long> root_to_comp;
  for (long c = 0; c < cell_count; ++c) {
    if (flagged[c]) {
      rep.singular_cells.push_back(c);
      continue;
    }
    const long root = uf.find(c);
    auto [it, inserted] = root_to_comp.try_emplace(root, static_cast<long>(rep.components.size()));
    if (inserted) rep.components.emplace_back();
    rep.components[it->second].push_back(c);
  }
  rep.k = static_cast<int>(rep.components.size());
  for (const auto& cells : rep.components)
    rep.measures.push_back(static_cast<double>(cells.size()) * cell_measure);
  return rep;
}

void check_resolution(int resolution, double step_norm) {
  if (resolution < 8)
    throw ResolutionTooCoarseError("decomposition grid needs at least 8 cells per unit");
  const double half_diag = std::sqrt(2.0) / (2.0 * resolution);
  if (step_norm < half_diag) {
    throw ResolutionTooCoarseError(
        "step length " + std::to_string(step_norm) +
        " is below half a cell diagonal; cells would map onto themselves degenerately");
  }
}

}  // namespace

DecompositionReport detect_decomposition(const PolysquareSurface& surface, const Direction2& v,
                                         int resolution) {
  check_resolution(resolution, v.norm());
  const long res = resolution;
  const long per_square = res * res;
  const long cell_count = surface.size() * per_square;

  std::vector<std::vector<long>> targets(cell_count);
  std::vector<char> flagged(cell_count, 0);
  for (long c = 0; c < cell_count; ++c) {
    const int sq = static_cast<int>(c / per_square);
    const long j = (c % per_square) / res;
    const long i = c % res;
    auto& out = targets[c];
    for (double oy : kSampleOffsets) {
      for (double ox : kSampleOffsets) {
        SurfacePoint p{sq, (i + ox) / res, (j + oy) / res};
        auto step = v_shift(surface, p, v);
        if (step.hit_singularity) continue;
        const long ni = std::min<long>(res - 1, static_cast<long>(step.point.x * res));
        const long nj = std::min<long>(res - 1, static_cast<long>(step.point.y * res));
        out.push_back(step.point.square * per_square + nj * res + ni);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) flagged[c] = 1;
  }

  UnionFind uf(cell_count);
  for (long c = 0; c < cell_count; ++c) {
    if (flagged[c]) continue;
    for (long t : targets[c]) {
      if (!flagged[t]) uf.unite(c, t);
    }
  }
  return finish_decomposition(uf, flagged, cell_count, resolution,
                              1.0 / static_cast<double>(per_square));
}

DecompositionReport detect_decomposition(const PolycubeManifold& manifold, const Direction2& v,
                                         double w3, int resolution) {
  check_resolution(resolution, std::sqrt(v.v1 * v.v1 + v.v2 * v.v2 + w3 * w3));
  const long res = resolution;
  const long per_cube = res * res * res;
  const long cell_count = manifold.size() * per_cube;

  std::vector<std::vector<long>> targets(cell_count);
  std::vector<char> flagged(cell_count, 0);
  for (long c = 0; c < cell_count; ++c) {
    const int sq = static_cast<int>(c / per_cube);
    long rem = c % per_cube;
    const long kz = rem / (res * res);
    rem %= res * res;
    const long j = rem / res;
    const long i = rem % res;
    auto& out = targets[c];
    for (double oz : kSampleOffsets) {
      for (double oy : kSampleOffsets) {
        for (double ox : kSampleOffsets) {
          ManifoldPoint p{{sq, (i + ox) / res, (j + oy) / res}, (kz + oz) / res};
          auto step = w_shift(manifold, p, v, w3);
          if (step.hit_singularity) continue;
          const long ni = std::min<long>(res - 1, static_cast<long>(step.point.base.x * res));
          const long nj = std::min<long>(res - 1, static_cast<long>(step.point.base.y * res));
          const long nk = std::min<long>(res - 1, static_cast<long>(step.point.z * res));
          out.push_back(step.point.base.square * per_cube + nk * res * res + nj * res + ni);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) flagged[c] = 1;
  }

  UnionFind uf(cell_count);
  for (long c = 0; c < cell_count; ++c) {
    if (flagged[c]) continue;
    for (long t : targets[c]) {
      if (!flagged[t]) uf.unite(c, t);
    }
  }
  return finish_decomposition(uf, flagged, cell_count, resolution,
                              1.0 / static_cast<double>(per_cube));
}

double birkhoff_average(const std::vector<SurfacePoint>& orbit,
                        const std::vector<BoxSet>& indicator) {
  if (orbit.empty()) throw EmptyInputError("birkhoff_average needs a nonempty orbit");
  long hits = 0;
  for (const auto& p : orbit) {
    for (const auto& b : indicator) {
      if (b.contains(p)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(orbit.size());
}

double birkhoff_average(const std::vector<ManifoldPoint>& orbit,
                        const std::vector<BoxSet>& indicator) {
  if (orbit.empty()) throw EmptyInputError("birkhoff_average needs a nonempty orbit");
  long hits = 0;
  for (const auto& p : orbit) {
    for (const auto& b : indicator) {
      if (b.contains(p)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(orbit.size());
}

double uniform_deviation_1d(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("deviation needs at least one value");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double dev = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    dev = std::max(dev, std::abs((i + 1.0) / n - values[i]));
    dev = std::max(dev, std::abs(values[i] - i / n));
  }
  return dev;
}

}  // namespace polykron
