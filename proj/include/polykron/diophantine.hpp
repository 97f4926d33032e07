#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polykron/dynamics.hpp"

namespace polykron {

// Residual below which an integer combination counts as a rational relation.
inline constexpr double kRelationTol = 1e-9;

// Height-bounded certificate that v1, ..., vd, 1 admit no small integer
// relation: a reproducible precondition check, never a proof of linear
// independence.
struct KroneckerCertificate {
  std::vector<double> components;
  int height = 0;
  bool relation_found = false;
  // When found: coefficients (a0, a1, ..., ad) with |a0 + sum ai*vi| < 1e-9.
  std::vector<long long> relation;
  double residual = 0.0;
  long long evaluations = 0;
  std::string method;  // "exhaustive" or "lattice"

  bool kronecker() const { return !relation_found; }
};

// Search all integer coefficient vectors of height <= H for a relation
// a0 + a1 v1 + ... + ad vd = 0 (within 1e-9). Only the nearest integer can
// serve as a0, so the scan is (2H+1)^d evaluations; above the budget a
// lattice-reduction prefilter proposes candidates that are then verified.
KroneckerCertificate certify_kronecker(const std::vector<double>& v, int height,
                                       long long budget = 100'000'000);

// Largest gap between circularly consecutive points of [0,1).
double circular_gap(std::vector<double> points);

// Increasing integers m with ||m v1|| < eps and ||m v2|| < eps whose
// fractional multiples {m w} are eps-dense on the circle.
struct DenseMultiplesResult {
  double eps = 0.0;
  std::vector<long long> m;
  long long k = 0;         // m.size()
  double max_gap = 0.0;    // circular gap of {m w}
  long long scanned = 0;   // values of m examined
};

// Scans m = 1, 2, 3, ... keeping the simultaneous-approximation subsequence
// and stopping once the collected {m w} values have circular gap < eps
// (strictly stronger than visiting every eps-arc). eps >= 1 degenerates to
// the whole circle and returns [1].
DenseMultiplesResult dense_multiples_search(double v1, double v2, double w, double eps,
                                            long long scan_budget = 10'000'000);

// Test-vector factory from square-free seeds: (sqrt(a), sqrt(b)) and, with a
// third seed, the lift w3 = sqrt(c); certified at height 100.
struct QuadraticVectors {
  Direction2 v;             // (sqrt(a), sqrt(b))
  double w3 = 0.0;          // sqrt(c) when a third seed is given
  bool has_w3 = false;
  KroneckerCertificate certificate;
};

QuadraticVectors quadratic_kronecker(const std::vector<int>& seeds, int height = 100);

}  // namespace polykron
