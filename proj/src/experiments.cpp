#include "polykron/experiments.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polykron/errors.hpp"
#include "polykron/realmath.hpp"

namespace polykron {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + " has unknown field \"" + key + "\"", key);
  }
}

double parse_decimal(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw ConfigError("\"" + field + "\" is not a decimal number: " + s, field);
    return d;
  }
  throw ConfigError("\"" + field + "\" must be a number or decimal string", field);
}

StepSpec parse_step(const json& obj, int height) {
  reject_unknown(obj, {"seeds", "v", "w3", "mod1"}, "\"step\"");
  StepSpec spec;
  if (obj.contains("mod1")) {
    if (!obj["mod1"].is_boolean()) throw ConfigError("\"mod1\" must be a boolean", "mod1");
    spec.mod1 = obj["mod1"].get<bool>();
  }

  std::vector<double> comps;
  if (obj.contains("seeds")) {
    if (obj.contains("v")) throw ConfigError("\"step\" takes seeds or v, not both", "v");
    std::vector<int> seeds;
    for (const auto& s : obj["seeds"]) {
      if (!s.is_number_integer()) throw ConfigError("\"seeds\" must be integers", "seeds");
      seeds.push_back(s.get<int>());
    }
    if (seeds.size() != 2 && seeds.size() != 3)
      throw ConfigError("\"seeds\" needs 2 or 3 entries", "seeds");
    for (int s : seeds) comps.push_back(std::sqrt(static_cast<double>(s)));
    std::ostringstream src;
    src << "seeds [";
    for (size_t i = 0; i < seeds.size(); ++i) src << (i ? "," : "") << seeds[i];
    src << "]" << (spec.mod1 ? " mod 1" : "");
    spec.source = src.str();
    spec.has_w3 = seeds.size() == 3;
  } else if (obj.contains("v")) {
    const auto& arr = obj["v"];
    if (!arr.is_array() || arr.size() != 2)
      throw ConfigError("\"v\" must be an array of two components", "v");
    comps.push_back(parse_decimal(arr[0], "v"));
    comps.push_back(parse_decimal(arr[1], "v"));
    if (obj.contains("w3")) {
      comps.push_back(parse_decimal(obj["w3"], "w3"));
      spec.has_w3 = true;
    }
    spec.source = std::string("decimal") + (spec.mod1 ? " mod 1" : "");
  } else {
    throw ConfigError("\"step\" needs \"seeds\" or \"v\"", "step");
  }

  if (spec.mod1) {
    for (double& c : comps) c = wrap_unit(c);
  }
  spec.v = Direction2{comps[0], comps[1]};
  if (spec.has_w3) spec.w3 = comps[2];
  spec.certificate = certify_kronecker(comps, height);
  return spec;
}

ManifoldPoint parse_start(const json& obj, bool* has_z) {
  reject_unknown(obj, {"square", "x", "y", "z"}, "\"start\"");
  for (const char* k : {"square", "x", "y"}) {
    if (!obj.contains(k)) throw ConfigError(std::string("\"start\" needs \"") + k + "\"", k);
  }
  ManifoldPoint p;
  p.base.square = obj["square"].get<int>();
  p.base.x = parse_decimal(obj["x"], "x");
  p.base.y = parse_decimal(obj["y"], "y");
  if (obj.contains("z")) {
    p.z = parse_decimal(obj["z"], "z");
    *has_z = true;
  }
  return p;
}

BoxSet parse_box(const json& obj) {
  reject_unknown(obj, {"square", "box", "z"}, "\"test_sets\" entry");
  if (!obj.contains("square") || !obj.contains("box"))
    throw ConfigError("test set needs \"square\" and \"box\"", "test_sets");
  BoxSet b;
  b.square = obj["square"].get<int>();
  const auto& box = obj["box"];
  if (!box.is_array() || box.size() != 4)
    throw ConfigError("\"box\" must be [x0, x1, y0, y1]", "box");
  b.x0 = parse_decimal(box[0], "box");
  b.x1 = parse_decimal(box[1], "box");
  b.y0 = parse_decimal(box[2], "box");
  b.y1 = parse_decimal(box[3], "box");
  if (obj.contains("z")) {
    const auto& z = obj["z"];
    if (!z.is_array() || z.size() != 2) throw ConfigError("\"z\" must be [z0, z1]", "z");
    b.has_z = true;
    b.z0 = parse_decimal(z[0], "z");
    b.z1 = parse_decimal(z[1], "z");
  }
  if (!(b.measure() > 0.0)) throw ConfigError("test set has zero measure", "box");
  return b;
}

const char* kToleranceNote = "relation 1e-9; singular hit 1e-12; identity 1e-9*T";

json step_json(const StepSpec& step) {
  json j;
  j["v"] = {step.v.v1, step.v.v2};
  if (step.has_w3) j["w3"] = step.w3;
  j["source"] = step.source;
  j["height"] = step.certificate.height;
  j["kronecker"] = step.certificate.kronecker();
  j["certification_method"] = step.certificate.method;
  if (step.certificate.relation_found) j["relation"] = step.certificate.relation;
  return j;
}

json uniformity_json(const UniformityReport& rep) {
  json j;
  j["total"] = rep.total;
  j["s"] = rep.s;
  j["sup_deviation"] = rep.sup_deviation;
  json sets = json::array();
  for (const auto& r : rep.sets) {
    json e;
    e["square"] = r.set.square;
    e["box"] = {r.set.x0, r.set.x1, r.set.y0, r.set.y1};
    if (r.set.has_z) e["z"] = {r.set.z0, r.set.z1};
    e["observed"] = r.observed;
    e["expected"] = r.expected;
    e["ratio"] = r.ratio;
    sets.push_back(e);
  }
  j["sets"] = sets;
  json trend = json::array();
  for (const auto& [cp, dev] : rep.trend) trend.push_back({cp, dev});
  j["trend"] = trend;
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "json");
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object", "json");
  reject_unknown(doc,
                 {"surface", "step", "start", "starts", "J", "T", "test_sets", "checkpoints",
                  "height", "eps", "resolution", "scan_budget"},
                 "config");

  ExperimentConfig cfg;
  if (doc.contains("height")) cfg.height = doc["height"].get<int>();

  if (!doc.contains("surface")) throw ConfigError("config needs \"surface\"", "surface");
  const auto& surf = doc["surface"];
  if (surf.is_object() && surf.contains("file")) {
    reject_unknown(surf, {"file"}, "\"surface\"");
    std::filesystem::path p = surf["file"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    cfg.surface = surface_from_file(p.string());
  } else {
    cfg.surface = surface_from_json(surf.dump());
  }

  if (!doc.contains("step")) throw ConfigError("config needs \"step\"", "step");
  cfg.step = parse_step(doc["step"], cfg.height);

  bool any_z = false;
  if (doc.contains("start") && doc.contains("starts"))
    throw ConfigError("config takes \"start\" or \"starts\", not both", "starts");
  if (doc.contains("start")) cfg.starts.push_back(parse_start(doc["start"], &any_z));
  if (doc.contains("starts")) {
    for (const auto& s : doc["starts"]) cfg.starts.push_back(parse_start(s, &any_z));
  }
  cfg.manifold = any_z || cfg.step.has_w3;

  cfg.has_J = doc.contains("J");
  cfg.has_T = doc.contains("T");
  // Exactly one horizon per run; searches and decompositions take none.
  if (cfg.has_J && cfg.has_T)
    throw ConfigError("config takes exactly one of \"J\" or \"T\"", "T");
  if (cfg.has_J) {
    cfg.J = doc["J"].get<long>();
    if (cfg.J < 0) throw ConfigError("\"J\" must be nonnegative", "J");
  }
  if (cfg.has_T) {
    cfg.T = parse_decimal(doc["T"], "T");
    if (!(cfg.T >= 0.0)) throw ConfigError("\"T\" must be nonnegative", "T");
  }

  if (doc.contains("test_sets")) {
    for (const auto& t : doc["test_sets"]) cfg.test_sets.push_back(parse_box(t));
  }
  if (doc.contains("checkpoints")) {
    cfg.checkpoints.clear();
    for (const auto& c : doc["checkpoints"]) cfg.checkpoints.push_back(c.get<double>());
  }
  if (doc.contains("eps")) cfg.eps = parse_decimal(doc["eps"], "eps");
  if (doc.contains("resolution")) cfg.resolution = doc["resolution"].get<int>();
  if (doc.contains("scan_budget")) cfg.scan_budget = doc["scan_budget"].get<long long>();

  for (const auto& p : cfg.starts) {
    if (cfg.manifold) {
      validate_point(PolycubeManifold{cfg.surface}, p);
    } else {
      validate_point(cfg.surface, p.base);
    }
  }
  for (const auto& b : cfg.test_sets) {
    if (b.square < 0 || b.square >= cfg.surface.size())
      throw ConfigError("test set square out of range", "test_sets");
  }
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file \"" + path + "\" does not exist", "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<BoxSet> default_partition(const PolysquareSurface& surface, bool cubes) {
  std::vector<BoxSet> out;
  for (int sq = 0; sq < surface.size(); ++sq) {
    BoxSet b;
    b.square = sq;
    b.has_z = cubes;
    out.push_back(b);
  }
  return out;
}

OrbitRun run_orbit(const ExperimentConfig& cfg, size_t start_index) {
  if (!cfg.has_J) throw ConfigError("orbit runs need \"J\"", "J");
  if (start_index >= cfg.starts.size()) throw ConfigError("missing start point", "start");
  OrbitRun run;
  run.manifold = cfg.manifold;
  const auto& start = cfg.starts[start_index];
  auto sets = cfg.test_sets.empty() ? default_partition(cfg.surface, cfg.manifold)
                                    : cfg.test_sets;

  std::vector<std::array<double, 2>> projected;
  if (cfg.manifold) {
    run.orbit3 = orbit(PolycubeManifold{cfg.surface}, start, cfg.step.v, cfg.step.w3, cfg.J);
    if (!run.orbit3.points.empty())
      run.report = visiting_ratio(run.orbit3.points, sets, cfg.surface.size(), cfg.checkpoints);
    projected.reserve(run.orbit3.points.size());
    for (const auto& p : run.orbit3.points) projected.push_back({p.base.x, p.base.y});
  } else {
    run.orbit2 = orbit(cfg.surface, start.base, cfg.step.v, cfg.J);
    if (!run.orbit2.points.empty())
      run.report = visiting_ratio(run.orbit2.points, sets, cfg.surface.size(), cfg.checkpoints);
    projected.reserve(run.orbit2.points.size());
    for (const auto& p : run.orbit2.points) projected.push_back({p.x, p.y});
  }
  if (!projected.empty()) run.projection_discrepancy = star_discrepancy_2d(projected);
  return run;
}

GeodesicRun run_geodesic(const ExperimentConfig& cfg, size_t start_index) {
  if (!cfg.has_T) throw ConfigError("geodesic runs need \"T\"", "T");
  if (start_index >= cfg.starts.size()) throw ConfigError("missing start point", "start");
  GeodesicRun run;
  run.manifold = cfg.manifold;
  const auto& start = cfg.starts[start_index];
  auto sets = cfg.test_sets.empty() ? default_partition(cfg.surface, cfg.manifold)
                                    : cfg.test_sets;
  if (cfg.manifold) {
    run.trace = geodesic_flow(PolycubeManifold{cfg.surface}, start,
                              Direction3{cfg.step.v.v1, cfg.step.v.v2, 1.0}, cfg.T);
  } else {
    run.trace = geodesic_flow(cfg.surface, start.base, cfg.step.v, cfg.T);
  }
  if (run.trace.total_time > 0.0)
    run.report = visiting_ratio(run.trace, sets, cfg.surface.size(), cfg.checkpoints);
  return run;
}

EquivalenceReport run_equivalence(const ExperimentConfig& cfg, size_t start_index) {
  if (!cfg.has_J) throw ConfigError("equivalence runs need \"J\"", "J");
  if (start_index >= cfg.starts.size()) throw ConfigError("missing start point", "start");
  if (cfg.test_sets.empty()) throw ConfigError("equivalence runs need a test set", "test_sets");
  if (!cfg.step.certificate.kronecker())
    throw CertificationFailedError("equivalence check needs a certified Kronecker step");
  return equivalence_check(cfg.surface, cfg.starts[start_index].base, cfg.step.v,
                           cfg.test_sets[0], cfg.J);
}

StepupRun run_stepup(const ExperimentConfig& cfg, size_t start_index) {
  if (!cfg.has_J) throw ConfigError("stepup runs need \"J\"", "J");
  if (!cfg.step.has_w3) throw ConfigError("stepup runs need a third step component", "w3");
  if (start_index >= cfg.starts.size()) throw ConfigError("missing start point", "start");
  if (!cfg.step.certificate.kronecker())
    throw CertificationFailedError("stepup needs a certified Kronecker step (v, w3)");

  StepupRun run;
  run.J = cfg.J;
  const auto& start = cfg.starts[start_index];

  auto orb_p = orbit(cfg.surface, start.base, cfg.step.v, cfg.J);
  if (orb_p.pathological)
    throw PathologicalStartError("surface orbit hits a cone point", orb_p.hit_index,
                                 orb_p.hit_time);
  const PolycubeManifold manifold{cfg.surface};
  auto orb_m = orbit(manifold, start, cfg.step.v, cfg.step.w3, cfg.J);
  if (orb_m.pathological)
    throw PathologicalStartError("manifold orbit hits a cone point", orb_m.hit_index,
                                 orb_m.hit_time);

  std::vector<BoxSet> sets_p2;
  for (const auto& b : cfg.test_sets) {
    if (!b.has_z) sets_p2.push_back(b);
  }
  if (sets_p2.empty()) sets_p2 = default_partition(cfg.surface, false);
  auto sets_m = cfg.test_sets.empty() ? default_partition(cfg.surface, true) : cfg.test_sets;

  run.surface_report = visiting_ratio(orb_p.points, sets_p2, cfg.surface.size(), cfg.checkpoints);
  run.manifold_report = visiting_ratio(orb_m.points, sets_m, cfg.surface.size(), cfg.checkpoints);

  run.base_projection_equal = orb_p.points.size() == orb_m.points.size();
  for (size_t j = 0; run.base_projection_equal && j < orb_p.points.size(); ++j) {
    run.base_projection_equal = orb_m.points[j].base == orb_p.points[j];
  }

  std::vector<double> zs;
  zs.reserve(orb_m.points.size());
  for (const auto& p : orb_m.points) zs.push_back(p.z);
  run.z_marginal_deviation = uniform_deviation_1d(std::move(zs));
  return run;
}

DenseRun run_dense_search(double v1, double v2, double w, double eps, long long scan_budget) {
  DenseRun run;
  run.result = dense_multiples_search(v1, v2, w, eps, scan_budget);
  // Independent oracle: re-check every per-element bound and the gap by a
  // fresh sort of the circle values.
  run.bounds_ok = true;
  std::vector<double> vals;
  for (long long m : run.result.m) {
    run.bounds_ok = run.bounds_ok && dist_to_int(m * v1) < eps && dist_to_int(m * v2) < eps;
    vals.push_back(wrap_unit(m * w));
  }
  const double gap = circular_gap(vals);
  run.bounds_ok = run.bounds_ok && (eps >= 1.0 ? gap <= eps : gap < eps);
  return run;
}

DecompositionReport run_decompose(const ExperimentConfig& cfg) {
  if (cfg.manifold && cfg.step.has_w3) {
    return detect_decomposition(PolycubeManifold{cfg.surface}, cfg.step.v, cfg.step.w3,
                                cfg.resolution);
  }
  return detect_decomposition(cfg.surface, cfg.step.v, cfg.resolution);
}

std::string dense_run_to_json(const DenseRun& run) {
  json j;
  j["eps"] = run.result.eps;
  j["m"] = run.result.m;
  j["max_gap"] = run.result.max_gap;
  j["bounds_ok"] = run.bounds_ok;
  j["k"] = run.result.k;
  j["scanned"] = run.result.scanned;
  return j.dump(2);
}

std::string uniformity_to_json(const UniformityReport& rep, const StepSpec& step) {
  json j = uniformity_json(rep);
  j["step"] = step_json(step);
  j["tolerances"] = kToleranceNote;
  return j.dump(2);
}

std::string equivalence_to_json(const EquivalenceReport& rep, const StepSpec& step) {
  json j;
  j["J"] = rep.J;
  j["g"] = rep.g;
  j["T"] = rep.T;
  j["count"] = rep.count;
  j["time_in_sweep"] = rep.time_in_sweep;
  j["identity_residual"] = rep.identity_residual;
  j["identity_tolerance"] = rep.identity_tolerance;
  j["identity_ok"] = rep.identity_ok;
  j["ratio_discrete"] = rep.ratio_discrete;
  j["ratio_continuous"] = rep.ratio_continuous;
  j["sweep_volume"] = rep.sweep_volume;
  j["sweep_hits_singular"] = rep.sweep_hits_singular;
  j["step"] = step_json(step);
  j["tolerances"] = kToleranceNote;
  return j.dump(2);
}

std::string stepup_to_json(const StepupRun& run, const StepSpec& step) {
  json j;
  j["J"] = run.J;
  j["surface"] = uniformity_json(run.surface_report);
  j["manifold"] = uniformity_json(run.manifold_report);
  j["base_projection_equal"] = run.base_projection_equal;
  j["z_marginal_deviation"] = run.z_marginal_deviation;
  j["step"] = step_json(step);
  j["tolerances"] = kToleranceNote;
  return j.dump(2);
}

std::string decomposition_to_json(const DecompositionReport& rep, const StepSpec& step) {
  json j;
  j["grid_resolution"] = rep.grid_resolution;
  j["k"] = rep.k;
  j["measures"] = rep.measures;
  j["cells_total"] = rep.cells_total;
  j["singular_cells"] = rep.singular_cells.size();
  json comps = json::array();
  for (const auto& cells : rep.components) comps.push_back(cells.size());
  j["component_sizes"] = comps;
  j["step"] = step_json(step);
  return j.dump(2);
}

std::string certificate_to_json(const KroneckerCertificate& cert) {
  json j;
  j["components"] = cert.components;
  j["height"] = cert.height;
  j["kronecker"] = cert.kronecker();
  j["method"] = cert.method;
  j["evaluations"] = cert.evaluations;
  if (cert.relation_found) {
    j["relation"] = cert.relation;
    j["residual"] = cert.residual;
  }
  j["relation_tolerance"] = kRelationTol;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path + "\"", "out");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sidecar(const std::string& csv_path, const std::string& termination, double at) {
  json j;
  j["termination"] = termination;
  j["at"] = at;
  write_text_file(csv_path + ".meta.json", j.dump(2));
}

}  // namespace

void write_orbit_csv(const std::string& path, const OrbitRun& run) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path + "\"", "out");
  if (run.manifold) {
    out << "index,square,x,y,z\n";
    for (size_t j = 0; j < run.orbit3.points.size(); ++j) {
      const auto& p = run.orbit3.points[j];
      out << j << ',' << p.base.square << ',' << fmt(p.base.x) << ',' << fmt(p.base.y) << ','
          << fmt(p.z) << '\n';
    }
    write_sidecar(path, run.orbit3.pathological ? "pathological_start" : "completed",
                  run.orbit3.pathological ? static_cast<double>(run.orbit3.hit_index)
                                          : static_cast<double>(run.orbit3.points.size()));
  } else {
    out << "index,square,x,y\n";
    for (size_t j = 0; j < run.orbit2.points.size(); ++j) {
      const auto& p = run.orbit2.points[j];
      out << j << ',' << p.square << ',' << fmt(p.x) << ',' << fmt(p.y) << '\n';
    }
    write_sidecar(path, run.orbit2.pathological ? "pathological_start" : "completed",
                  run.orbit2.pathological ? static_cast<double>(run.orbit2.hit_index)
                                          : static_cast<double>(run.orbit2.points.size()));
  }
}

void write_trace_csv(const std::string& path, const GeodesicTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path + "\"", "out");
  if (trace.three_dimensional) {
    out << "time,square,x,y,z\n";
    for (const auto& seg : trace.segments) {
      out << fmt(seg.t0) << ',' << seg.square << ',' << fmt(seg.x0) << ',' << fmt(seg.y0) << ','
          << fmt(seg.z0) << '\n';
    }
    if (!trace.segments.empty()) {
      const auto& seg = trace.segments.back();
      out << fmt(seg.t0 + seg.dt) << ',' << seg.square << ',' << fmt(seg.x1) << ',' << fmt(seg.y1)
          << ',' << fmt(seg.z1) << '\n';
    }
  } else {
    out << "time,square,x,y\n";
    for (const auto& seg : trace.segments) {
      out << fmt(seg.t0) << ',' << seg.square << ',' << fmt(seg.x0) << ',' << fmt(seg.y0) << '\n';
    }
    if (!trace.segments.empty()) {
      const auto& seg = trace.segments.back();
      out << fmt(seg.t0 + seg.dt) << ',' << seg.square << ',' << fmt(seg.x1) << ',' << fmt(seg.y1)
          << '\n';
    }
  }
  write_sidecar(path, trace.completed() ? "completed" : "hit_singularity",
                trace.completed() ? trace.total_time : trace.hit_time);
}

void write_uniformity_csv(const std::string& path, const UniformityReport& rep) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path + "\"", "out");
  out << "square,x0,x1,y0,y1,z0,z1,observed,expected,ratio\n";
  for (const auto& r : rep.sets) {
    out << r.set.square << ',' << fmt(r.set.x0) << ',' << fmt(r.set.x1) << ',' << fmt(r.set.y0)
        << ',' << fmt(r.set.y1) << ',' << fmt(r.set.has_z ? r.set.z0 : 0.0) << ','
        << fmt(r.set.has_z ? r.set.z1 : 1.0) << ',' << fmt(r.observed) << ',' << fmt(r.expected)
        << ',' << fmt(r.ratio) << '\n';
  }
}

void write_trend_csv(const std::string& path, const UniformityReport& rep) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write \"" + path + "\"", "out");
  out << "checkpoint,sup_deviation\n";
  for (const auto& [cp, dev] : rep.trend) out << fmt(cp) << ',' << fmt(dev) << '\n';
}

}  // namespace polykron
