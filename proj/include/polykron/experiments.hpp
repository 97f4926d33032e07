#pragma once

#include <string>
#include <vector>

#include "polykron/stats.hpp"
#include "polykron/surface_io.hpp"

namespace polykron {

// A step vector or direction, as configured: named quadratic seeds computed
// to full double precision, or decimal strings used verbatim as binary
// doubles. The certificate covers the components actually used (after any
// mod-1 reduction).
struct StepSpec {
  Direction2 v;
  double w3 = 0.0;
  bool has_w3 = false;
  bool mod1 = true;
  std::string source;
  KroneckerCertificate certificate;
};

struct ExperimentConfig {
  PolysquareSurface surface;
  StepSpec step;
  std::vector<ManifoldPoint> starts;  // z is meaningful only for manifold runs
  bool manifold = false;              // a start carried a circle coordinate
  bool has_J = false;
  long J = 0;
  bool has_T = false;
  double T = 0.0;
  std::vector<BoxSet> test_sets;
  std::vector<double> checkpoints = kDefaultCheckpoints;
  int height = 100;
  double eps = 0.0;      // dense-multiples search
  int resolution = 16;   // decomposition grid
  long long scan_budget = 10'000'000;
};

// Strict parser: unknown fields are rejected and errors name the field.
// Relative surface file references resolve against base_dir.
ExperimentConfig config_from_json(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig config_from_file(const std::string& path);

// Test sets defaulting to the partition into atomic squares (or cubes).
std::vector<BoxSet> default_partition(const PolysquareSurface& surface, bool cubes);

struct OrbitRun {
  bool manifold = false;
  Orbit2 orbit2;
  Orbit3 orbit3;
  UniformityReport report;
  DiscrepancyResult projection_discrepancy;
};
OrbitRun run_orbit(const ExperimentConfig& cfg, size_t start_index = 0);

struct GeodesicRun {
  bool manifold = false;
  GeodesicTrace trace;
  UniformityReport report;
};
GeodesicRun run_geodesic(const ExperimentConfig& cfg, size_t start_index = 0);

EquivalenceReport run_equivalence(const ExperimentConfig& cfg, size_t start_index = 0);

struct StepupRun {
  long J = 0;
  UniformityReport surface_report;
  UniformityReport manifold_report;
  bool base_projection_equal = false;  // M-orbit base equals the P-orbit bit for bit
  double z_marginal_deviation = 0.0;
};
StepupRun run_stepup(const ExperimentConfig& cfg, size_t start_index = 0);

struct DenseRun {
  DenseMultiplesResult result;
  bool bounds_ok = false;  // independent oracle re-check of every bound
};
DenseRun run_dense_search(double v1, double v2, double w, double eps, long long scan_budget);

DecompositionReport run_decompose(const ExperimentConfig& cfg);

// Machine-readable outputs. Every report embeds the certification height and
// the tolerances in force.
std::string dense_run_to_json(const DenseRun& run);
std::string uniformity_to_json(const UniformityReport& rep, const StepSpec& step);
std::string equivalence_to_json(const EquivalenceReport& rep, const StepSpec& step);
std::string stepup_to_json(const StepupRun& run, const StepSpec& step);
std::string decomposition_to_json(const DecompositionReport& rep, const StepSpec& step);
std::string certificate_to_json(const KroneckerCertificate& cert);

void write_text_file(const std::string& path, const std::string& text);
void write_orbit_csv(const std::string& path, const OrbitRun& run);
void write_trace_csv(const std::string& path, const GeodesicTrace& trace);
void write_uniformity_csv(const std::string& path, const UniformityReport& rep);
void write_trend_csv(const std::string& path, const UniformityReport& rep);

}  // namespace polykron
