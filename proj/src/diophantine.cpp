#include "polykron/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "polykron/errors.hpp"
#include "polykron/realmath.hpp"

namespace polykron {

namespace {

double relation_residual(const std::vector<double>& v, const std::vector<long long>& coeffs) {
  double r = static_cast<double>(coeffs[0]);
  for (size_t i = 0; i < v.size(); ++i) r += static_cast<double>(coeffs[i + 1]) * v[i];
  return std::abs(r);
}

// Plain LLL (delta = 0.75) on the integer-relation lattice for (v, 1), with
// the last column scaled by C. The integer rows double as the coefficient
// vectors, so candidates read off directly. Dimensions here are at most 4.
std::vector<std::vector<long long>> lattice_candidates(const std::vector<double>& v) {
  const int d = static_cast<int>(v.size());
  const int rows = d + 1;
  const int cols = d + 2;
  const double scale = 1e12;

  std::vector<std::vector<double>> b(rows, std::vector<double>(cols, 0.0));
  for (int i = 0; i < d; ++i) {
    b[i][i] = 1.0;
    b[i][cols - 1] = std::nearbyint(scale * v[i]);
  }
  b[rows - 1][rows - 1] = 1.0;
  b[rows - 1][cols - 1] = scale;

  auto dot = [cols](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int i = 0; i < cols; ++i) s += x[i] * y[i];
    return s;
  };

  std::vector<std::vector<double>> gs(rows, std::vector<double>(cols));
  std::vector<std::vector<double>> mu(rows, std::vector<double>(rows, 0.0));
  std::vector<double> norms(rows, 0.0);
  auto gram_schmidt = [&]() {
    for (int i = 0; i < rows; ++i) {
      gs[i] = b[i];
      for (int j = 0; j < i; ++j) {
        mu[i][j] = norms[j] > 0.0 ? dot(b[i], gs[j]) / norms[j] : 0.0;
        for (int c = 0; c < cols; ++c) gs[i][c] -= mu[i][j] * gs[j][c];
      }
      norms[i] = dot(gs[i], gs[i]);
    }
  };

  gram_schmidt();
  int k = 1;
  int guard = 0;
  while (k < rows && ++guard < 10000) {
    for (int j = k - 1; j >= 0; --j) {
      const double m = std::nearbyint(mu[k][j]);
      if (m != 0.0) {
        for (int c = 0; c < cols; ++c) b[k][c] -= m * b[j][c];
        gram_schmidt();
      }
    }
    if (norms[k] >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt();
      k = std::max(k - 1, 1);
    }
  }

  std::vector<std::vector<long long>> out;
  for (int i = 0; i < rows; ++i) {
    std::vector<long long> coeffs(d + 1, 0);
    // Row layout is (a1, ..., ad, a0, scaled residual).
    coeffs[0] = static_cast<long long>(std::llround(b[i][rows - 1]));
    for (int j = 0; j < d; ++j) coeffs[j + 1] = static_cast<long long>(std::llround(b[i][j]));
    out.push_back(std::move(coeffs));
  }
  return out;
}

}  // namespace

KroneckerCertificate certify_kronecker(const std::vector<double>& v, int height,
                                       long long budget) {
  if (height < 1) throw HeightTooLargeError("certification height must be at least 1");
  const int d = static_cast<int>(v.size());
  if (d < 1 || d > 3) throw IndexOutOfRangeError("certification supports dimensions 1..3");

  KroneckerCertificate cert;
  cert.components = v;
  cert.height = height;

  const double side = 2.0 * height + 1.0;
  double cost = 1.0;
  for (int i = 0; i < d; ++i) cost *= side;

  if (cost <= static_cast<double>(budget)) {
    cert.method = "exhaustive";
    std::vector<long long> a(d, -height);
    while (true) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += static_cast<double>(a[i]) * v[i];
      const long long a0 = std::llround(-s);
      ++cert.evaluations;
      const double res = std::abs(static_cast<double>(a0) + s);
      bool all_zero = a0 == 0;
      for (int i = 0; all_zero && i < d; ++i) all_zero = a[i] == 0;
      if (!all_zero && std::llabs(a0) <= height && res < kRelationTol) {
        cert.relation_found = true;
        cert.relation.assign(1, a0);
        for (int i = 0; i < d; ++i) cert.relation.push_back(a[i]);
        cert.residual = res;
        return cert;
      }
      int i = 0;
      while (i < d && a[i] == height) a[i++] = -height;
      if (i == d) break;
      ++a[i];
    }
    return cert;
  }

  if (height > (1 << 26)) {
    throw HeightTooLargeError("height " + std::to_string(height) +
                              " exceeds what double-precision candidates can certify");
  }

  // Above the exhaustive budget a reduced lattice proposes candidates; a
  // negative result is then heuristic, which the method field records.
  cert.method = "lattice";
  for (const auto& coeffs : lattice_candidates(v)) {
    ++cert.evaluations;
    bool all_zero = true;
    long long max_abs = 0;
    for (long long c : coeffs) {
      all_zero = all_zero && c == 0;
      max_abs = std::max(max_abs, std::llabs(c));
    }
    if (all_zero || max_abs > height) continue;
    const double res = relation_residual(v, coeffs);
    if (res < kRelationTol) {
      cert.relation_found = true;
      cert.relation = coeffs;
      cert.residual = res;
      return cert;
    }
  }
  return cert;
}

double circular_gap(std::vector<double> points) {
  if (points.empty()) throw EmptyInputError("circular_gap needs at least one point");
  for (double p : points) {
    if (!(p >= 0.0 && p < 1.0)) throw IndexOutOfRangeError("circle points must lie in [0,1)");
  }
  if (points.size() == 1) return 1.0;
  std::sort(points.begin(), points.end());
  double gap = points.front() + 1.0 - points.back();
  for (size_t i = 0; i + 1 < points.size(); ++i) gap = std::max(gap, points[i + 1] - points[i]);
  return gap;
}

DenseMultiplesResult dense_multiples_search(double v1, double v2, double w, double eps,
                                            long long scan_budget) {
  if (!(eps > 0.0)) throw IndexOutOfRangeError("eps must be positive");
  {
    auto cert = certify_kronecker({v1, v2, w}, 50);
    if (cert.relation_found) {
      throw CertificationFailedError(
          "(v1, v2, w, 1) fails height-50 certification; the density argument needs a Kronecker "
          "vector");
    }
  }

  DenseMultiplesResult out;
  out.eps = eps;
  if (eps >= 1.0) {
    // The whole circle is the only arc of length 1.
    out.m = {1};
    out.k = 1;
    out.max_gap = 1.0;
    out.scanned = 1;
    return out;
  }

  std::vector<double> values;  // kept sorted
  for (long long m = 1; m <= scan_budget; ++m) {
    out.scanned = m;
    if (dist_to_int(m * v1) >= eps || dist_to_int(m * v2) >= eps) continue;
    out.m.push_back(m);
    const double val = wrap_unit(m * w);
    values.insert(std::upper_bound(values.begin(), values.end(), val), val);
    if (values.size() >= 2) {
      double gap = values.front() + 1.0 - values.back();
      for (size_t i = 0; i + 1 < values.size(); ++i)
        gap = std::max(gap, values[i + 1] - values[i]);
      if (gap < eps) {
        out.k = static_cast<long long>(out.m.size());
        out.max_gap = gap;
        return out;
      }
    }
  }
  throw BudgetExceededError("no eps-dense multiple list within a scan of " +
                            std::to_string(scan_budget) + " integers; eps may be too small");
}

QuadraticVectors quadratic_kronecker(const std::vector<int>& seeds, int height) {
  if (seeds.size() != 2 && seeds.size() != 3)
    throw IndexOutOfRangeError("quadratic seeds come in pairs or triples");
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] < 2) throw IndexOutOfRangeError("seeds must be integers >= 2");
    for (size_t j = i + 1; j < seeds.size(); ++j) {
      if (seeds[i] == seeds[j]) throw IndexOutOfRangeError("seeds must be distinct");
    }
  }

  std::vector<double> comps;
  comps.reserve(seeds.size());
  for (int s : seeds) comps.push_back(std::sqrt(static_cast<double>(s)));

  QuadraticVectors out;
  out.certificate = certify_kronecker(comps, height);
  if (out.certificate.relation_found) {
    std::ostringstream msg;
    msg << "seed combination admits an integer relation (";
    for (size_t i = 0; i < out.certificate.relation.size(); ++i) {
      if (i) msg << ", ";
      msg << out.certificate.relation[i];
    }
    msg << ")";
    throw CertificationFailedError(msg.str());
  }
  out.v = Direction2{comps[0], comps[1]};
  if (comps.size() == 3) {
    out.w3 = comps[2];
    out.has_w3 = true;
  }
  return out;
}

}  // namespace polykron
