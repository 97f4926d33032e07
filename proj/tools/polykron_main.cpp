#include <atomic>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polykron/errors.hpp"
#include "polykron/experiments.hpp"

using namespace polykron;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPathological = 3;
constexpr int kExitBudget = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  long seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts->config_path, "experiment config JSON");
  if (config_required) c->required();
  cmd->add_option("--out", opts->out_dir, "directory for CSV/JSON outputs");
  cmd->add_option("--jobs", opts->jobs, "parallel workers for multi-start runs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "seed for Monte-Carlo cross-checks");
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / name).string();
}

// Run fn(i) for i in [0, n) with at most `jobs` workers; rethrows the first
// exception. Outputs stay deterministic because each index owns its files.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::future<void>> futures;
  const size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
  for (size_t w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();
}

int cmd_surface(const std::string& spec_path) {
  auto surface = surface_from_file(spec_path);
  int singular = surface.singular_class_count();
  std::printf("s=%d, singular classes=%d\n", surface.size(), singular);
  std::printf("vertex classes:");
  for (const auto& vc : surface.vertex_classes()) {
    std::printf(" %zu%s", vc.corners.size(), vc.singular() ? "*" : "");
  }
  std::printf("\nh_gluings:");
  for (int g : surface.right_gluings()) std::printf(" %d", g);
  std::printf("\nv_gluings:");
  for (int g : surface.top_gluings()) std::printf(" %d", g);
  std::printf("\n");
  return kExitOk;
}

int cmd_orbit(const CommonOpts& opts) {
  auto cfg = config_from_file(opts.config_path);
  if (cfg.starts.empty()) throw ConfigError("orbit runs need a start point", "start");
  std::vector<OrbitRun> runs(cfg.starts.size());
  parallel_for(cfg.starts.size(), opts.jobs, [&](size_t i) { runs[i] = run_orbit(cfg, i); });

  bool pathological = false;
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const std::string tag = runs.size() > 1 ? "_" + std::to_string(i) : "";
    if (!opts.out_dir.empty()) {
      write_orbit_csv(out_path(opts, "orbit" + tag + ".csv"), run);
      write_text_file(out_path(opts, "report" + tag + ".json"),
                      uniformity_to_json(run.report, cfg.step));
      write_uniformity_csv(out_path(opts, "sets" + tag + ".csv"), run.report);
      write_trend_csv(out_path(opts, "trend" + tag + ".csv"), run.report);
    }
    const bool path_i = cfg.manifold ? run.orbit3.pathological : run.orbit2.pathological;
    const long hit_i = cfg.manifold ? run.orbit3.hit_index : run.orbit2.hit_index;
    if (path_i) {
      pathological = true;
      std::printf("start %zu: PathologicalStart at index %ld\n", i, hit_i);
    } else {
      std::printf("start %zu: J=%ld sup_deviation=%.6g discrepancy=%.6g\n", i, cfg.J,
                  run.report.sup_deviation, run.projection_discrepancy.value);
    }
  }
  return pathological ? kExitPathological : kExitOk;
}

int cmd_geodesic(const CommonOpts& opts) {
  auto cfg = config_from_file(opts.config_path);
  if (cfg.starts.empty()) throw ConfigError("geodesic runs need a start point", "start");
  std::vector<GeodesicRun> runs(cfg.starts.size());
  parallel_for(cfg.starts.size(), opts.jobs, [&](size_t i) { runs[i] = run_geodesic(cfg, i); });

  bool hit = false;
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const std::string tag = runs.size() > 1 ? "_" + std::to_string(i) : "";
    if (!opts.out_dir.empty()) {
      write_trace_csv(out_path(opts, "trace" + tag + ".csv"), run.trace);
      write_text_file(out_path(opts, "report" + tag + ".json"),
                      uniformity_to_json(run.report, cfg.step));
      write_uniformity_csv(out_path(opts, "sets" + tag + ".csv"), run.report);
      write_trend_csv(out_path(opts, "trend" + tag + ".csv"), run.report);
    }
    if (!run.trace.completed()) {
      hit = true;
      std::printf("start %zu: HitSingularity at t=%.17g\n", i, run.trace.hit_time);
    } else {
      std::printf("start %zu: T=%.17g segments=%zu sup_deviation=%.6g\n", i,
                  run.trace.total_time, run.trace.segments.size(), run.report.sup_deviation);
    }
  }
  return hit ? kExitPathological : kExitOk;
}

int cmd_equivalence(const CommonOpts& opts) {
  auto cfg = config_from_file(opts.config_path);
  if (cfg.starts.empty()) throw ConfigError("equivalence runs need a start point", "start");
  std::vector<EquivalenceReport> reports(cfg.starts.size());
  parallel_for(cfg.starts.size(), opts.jobs,
               [&](size_t i) { reports[i] = run_equivalence(cfg, i); });

  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    const std::string tag = reports.size() > 1 ? "_" + std::to_string(i) : "";
    if (!opts.out_dir.empty()) {
      write_text_file(out_path(opts, "equivalence" + tag + ".json"),
                      equivalence_to_json(rep, cfg.step));
    }
    std::printf(
        "start %zu: J=%ld count=%ld time=%.17g residual=%.3e (tolerance %.3e) "
        "ratio_discrete=%.6f ratio_continuous=%.6f\n",
        i, rep.J, rep.count, rep.time_in_sweep, rep.identity_residual, rep.identity_tolerance,
        rep.ratio_discrete, rep.ratio_continuous);
    if (!rep.identity_ok) return kExitPathological;
  }
  return kExitOk;
}

int cmd_stepup(const CommonOpts& opts) {
  auto cfg = config_from_file(opts.config_path);
  if (cfg.starts.empty()) throw ConfigError("stepup runs need a start point", "start");
  std::vector<StepupRun> runs(cfg.starts.size());
  parallel_for(cfg.starts.size(), opts.jobs, [&](size_t i) { runs[i] = run_stepup(cfg, i); });

  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const std::string tag = runs.size() > 1 ? "_" + std::to_string(i) : "";
    if (!opts.out_dir.empty()) {
      write_text_file(out_path(opts, "stepup" + tag + ".json"), stepup_to_json(run, cfg.step));
      write_uniformity_csv(out_path(opts, "stepup_surface" + tag + ".csv"), run.surface_report);
      write_uniformity_csv(out_path(opts, "stepup_manifold" + tag + ".csv"),
                           run.manifold_report);
    }
    std::printf(
        "start %zu: J=%ld sup_dev_P=%.6g sup_dev_M=%.6g base_projection_equal=%s "
        "z_marginal_dev=%.6g\n",
        i, run.J, run.surface_report.sup_deviation, run.manifold_report.sup_deviation,
        run.base_projection_equal ? "true" : "false", run.z_marginal_deviation);
  }
  return kExitOk;
}

int cmd_lemma34(double v1, double v2, double w, const std::vector<int>& seeds, double eps,
                long long budget, const CommonOpts& opts) {
  if (!seeds.empty()) {
    auto qv = quadratic_kronecker(seeds);
    if (!qv.has_w3) throw ConfigError("lemma34 needs three seeds", "seeds");
    v1 = qv.v.v1;
    v2 = qv.v.v2;
    w = qv.w3;
  }
  auto run = run_dense_search(v1, v2, w, eps, budget);
  const std::string text = dense_run_to_json(run);
  std::printf("%s\n", text.c_str());
  if (!opts.out_dir.empty()) write_text_file(out_path(opts, "lemma34.json"), text);
  return kExitOk;
}

int cmd_decompose(const CommonOpts& opts) {
  auto cfg = config_from_file(opts.config_path);
  auto rep = run_decompose(cfg);
  const std::string text = decomposition_to_json(rep, cfg.step);
  std::printf("%s\n", text.c_str());
  if (!opts.out_dir.empty()) {
    write_text_file(out_path(opts, "decomposition.json"), text);
    std::ostringstream csv;
    csv << "component,cells,measure\n";
    for (size_t i = 0; i < rep.components.size(); ++i) {
      csv << i << ',' << rep.components[i].size() << ',' << rep.measures[i] << '\n';
    }
    write_text_file(out_path(opts, "components.csv"), csv.str());
  }
  return kExitOk;
}

int cmd_certify(const std::vector<double>& components, const std::vector<int>& seeds, int height,
                const CommonOpts& opts) {
  KroneckerCertificate cert;
  if (!seeds.empty()) {
    std::vector<double> comps;
    for (int s : seeds) comps.push_back(std::sqrt(static_cast<double>(s)));
    cert = certify_kronecker(comps, height);
  } else {
    if (components.empty())
      throw ConfigError("certify needs --components or --seeds", "components");
    cert = certify_kronecker(components, height);
  }
  const std::string text = certificate_to_json(cert);
  std::printf("%s\n", text.c_str());
  if (!opts.out_dir.empty()) write_text_file(out_path(opts, "certificate.json"), text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polykron: equidistribution experiments on polysquare translation surfaces"};
  app.require_subcommand(1);

  std::string spec_path;
  auto* c_surface = app.add_subcommand("surface", "validate a surface spec and print a summary");
  c_surface->add_option("spec", spec_path, "surface spec JSON file")->required();

  CommonOpts orbit_opts;
  auto* c_orbit = app.add_subcommand("orbit", "discrete shift orbit with uniformity report");
  add_common(c_orbit, &orbit_opts);

  CommonOpts geo_opts;
  auto* c_geo = app.add_subcommand("geodesic", "continuous geodesic trace with occupancy report");
  add_common(c_geo, &geo_opts);

  CommonOpts eq_opts;
  auto* c_eq = app.add_subcommand("equivalence",
                                  "discrete count vs geodesic time in the swept set");
  add_common(c_eq, &eq_opts);

  CommonOpts su_opts;
  auto* c_su = app.add_subcommand("stepup", "paired uniformity on P and on M = P x [0,1)");
  add_common(c_su, &su_opts);

  CommonOpts l_opts;
  double v1 = 0, v2 = 0, w = 0, eps = 0.2;
  long long budget = 10'000'000;
  std::vector<int> l_seeds;
  auto* c_l = app.add_subcommand("lemma34",
                                 "simultaneous approximation multiples with dense circle values");
  c_l->add_option("--v1", v1, "first component");
  c_l->add_option("--v2", v2, "second component");
  c_l->add_option("--w", w, "circle step");
  c_l->add_option("--seeds", l_seeds, "three quadratic seeds, e.g. 2 3 5");
  c_l->add_option("--eps", eps, "arc length to cover")->required();
  c_l->add_option("--budget", budget, "scan budget");
  c_l->add_option("--out", l_opts.out_dir, "directory for JSON output");

  CommonOpts d_opts;
  auto* c_d = app.add_subcommand("decompose", "invariant components of the discretized shift");
  add_common(c_d, &d_opts);

  CommonOpts cert_opts;
  std::vector<double> components;
  std::vector<int> cert_seeds;
  int height = 100;
  auto* c_cert = app.add_subcommand("certify", "height-bounded Kronecker certification");
  c_cert->add_option("--components", components, "real components");
  c_cert->add_option("--seeds", cert_seeds, "square-free seeds");
  c_cert->add_option("--height", height, "coefficient height bound");
  c_cert->add_option("--out", cert_opts.out_dir, "directory for JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_surface->parsed()) return cmd_surface(spec_path);
    if (c_orbit->parsed()) return cmd_orbit(orbit_opts);
    if (c_geo->parsed()) return cmd_geodesic(geo_opts);
    if (c_eq->parsed()) return cmd_equivalence(eq_opts);
    if (c_su->parsed()) return cmd_stepup(su_opts);
    if (c_l->parsed()) return cmd_lemma34(v1, v2, w, l_seeds, eps, budget, l_opts);
    if (c_d->parsed()) return cmd_decompose(d_opts);
    if (c_cert->parsed()) return cmd_certify(components, cert_seeds, height, cert_opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const PathologicalStartError& e) {
    std::fprintf(stderr, "pathological start: %s (index %ld, t=%.17g)\n", e.what(), e.index,
                 e.time);
    return kExitPathological;
  } catch (const BudgetExceededError& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return kExitBudget;
  } catch (const CertificationFailedError& e) {
    std::fprintf(stderr, "certification failed: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
