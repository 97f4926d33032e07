// End-to-end checks of the polykron binary: exit codes, output files, and the
// printed contracts. argv[1] is the CLI path, argv[2] the configs directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

std::string g_cli;
std::string g_configs;
std::filesystem::path g_tmp;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string out_file = (g_tmp / "cmd_output.txt").string();
  const std::string cmd = g_cli + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult res;
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  return res;
}

void expect(bool ok, const std::string& what, const RunResult& res) {
  if (ok) {
    std::printf("ok: %s\n", what.c_str());
  } else {
    ++g_failures;
    std::printf("FAILED: %s\n  exit=%d output:\n%s\n", what.c_str(), res.exit_code,
                res.output.c_str());
  }
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::string path = (g_tmp / name).string();
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_integration <cli-path> <configs-dir>\n");
    return 2;
  }
  g_cli = argv[1];
  g_configs = argv[2];
  g_tmp = std::filesystem::temp_directory_path() / "polykron_cli_test";
  std::filesystem::create_directories(g_tmp);

  {
    auto res = run("surface " + g_configs + "/l_surface.json");
    expect(res.exit_code == 0 && res.output.find("s=3, singular classes=1") != std::string::npos,
           "surface summary for the L-surface", res);
  }
  {
    auto res = run("surface " + g_configs + "/torus.json");
    expect(res.exit_code == 0 && res.output.find("s=1, singular classes=0") != std::string::npos,
           "surface summary for the torus", res);
  }
  {
    const std::string bad = write_file("bad_surface.json", R"({"grid": [[1]], "oops": 3})");
    auto res = run("surface " + bad);
    expect(res.exit_code == 2 && res.output.find("oops") != std::string::npos,
           "malformed surface spec exits 2 and names the field", res);
  }
  {
    const std::string cfg = write_file("orbit.json", R"({
      "surface": {"grid": [[1, 1], [1, 0]]},
      "step": {"seeds": [2, 3]},
      "start": {"square": 0, "x": 0.21, "y": 0.55},
      "J": 20000,
      "height": 40
    })");
    const std::string out = (g_tmp / "orbit_out").string();
    auto res = run("orbit --config " + cfg + " --out " + out);
    const bool files = std::filesystem::exists(out + "/orbit.csv") &&
                       std::filesystem::exists(out + "/orbit.csv.meta.json") &&
                       std::filesystem::exists(out + "/report.json") &&
                       std::filesystem::exists(out + "/trend.csv");
    expect(res.exit_code == 0 && files && res.output.find("sup_deviation") != std::string::npos,
           "orbit run writes CSV, sidecar and report", res);
  }
  {
    // A geodesic aimed straight at the reentrant vertex of the L-surface.
    const std::string cfg = write_file("geodesic_hit.json", R"({
      "surface": {"grid": [[1, 1], [1, 0]]},
      "step": {"v": ["1.0", "1.0"], "mod1": false},
      "start": {"square": 0, "x": 0.5, "y": 0.5},
      "T": 5.0,
      "height": 5
    })");
    auto res = run("geodesic --config " + cfg);
    expect(res.exit_code == 3 && res.output.find("HitSingularity at t=") != std::string::npos,
           "geodesic into the cone point exits 3", res);
  }
  {
    const std::string cfg = write_file("equivalence.json", R"({
      "surface": {"grid": [[1, 1], [1, 0]]},
      "step": {"seeds": [2, 3]},
      "start": {"square": 0, "x": 0.37, "y": 0.81},
      "J": 2000,
      "test_sets": [{"square": 1, "box": [0.2, 0.7, 0.1, 0.6]}],
      "height": 40
    })");
    auto res = run("equivalence --config " + cfg);
    expect(res.exit_code == 0 && res.output.find("residual=") != std::string::npos,
           "equivalence run prints the identity residual", res);
  }
  {
    const std::string cfg = write_file("stepup.json", R"({
      "surface": {"grid": [[1, 1], [1, 0]]},
      "step": {"seeds": [2, 3, 5]},
      "start": {"square": 0, "x": 0.11, "y": 0.49, "z": 0.0},
      "J": 20000,
      "height": 40
    })");
    auto res = run("stepup --config " + cfg + " --jobs 2");
    expect(res.exit_code == 0 && res.output.find("base_projection_equal=true") != std::string::npos,
           "stepup reports bit-equal base projection", res);
  }
  {
    auto res = run("lemma34 --seeds 2 3 5 --eps 0.2");
    expect(res.exit_code == 0 && res.output.find("\"bounds_ok\": true") != std::string::npos,
           "lemma34 emits JSON with verified bounds", res);
  }
  {
    auto res = run("lemma34 --seeds 2 3 5 --eps 1e-9 --budget 100000");
    expect(res.exit_code == 4, "lemma34 with hopeless eps exits 4", res);
  }
  {
    const std::string cfg = write_file("decompose.json", R"({
      "surface": {"grid": [[1]]},
      "step": {"v": ["0.5", "0.0"], "mod1": false},
      "resolution": 16,
      "height": 10
    })");
    auto res = run("decompose --config " + cfg);
    expect(res.exit_code == 0 && res.output.find("\"k\": 128") != std::string::npos,
           "decompose reports 128 components for the half shift", res);
  }
  {
    auto res = run("certify --seeds 2 8 --height 10");
    expect(res.exit_code == 0 && res.output.find("\"kronecker\": false") != std::string::npos,
           "certify reports the sqrt(8) relation", res);
  }
  {
    auto res = run("certify --components 0.41421356237309515 0.7320508075688772 --height 50");
    expect(res.exit_code == 0 && res.output.find("\"kronecker\": true") != std::string::npos,
           "certify passes the quadratic pair", res);
  }

  {
    // Determinism: identical config, bit-identical outputs.
    const std::string cfg = write_file("det.json", R"({
      "surface": {"grid": [[1, 1], [1, 0]]},
      "step": {"seeds": [2, 3]},
      "start": {"square": 2, "x": 0.31, "y": 0.64},
      "J": 5000,
      "height": 30
    })");
    const std::string out_a = (g_tmp / "det_a").string();
    const std::string out_b = (g_tmp / "det_b").string();
    auto res_a = run("orbit --config " + cfg + " --out " + out_a);
    auto res_b = run("orbit --config " + cfg + " --out " + out_b);
    bool same = res_a.exit_code == 0 && res_b.exit_code == 0;
    for (const char* name : {"orbit.csv", "report.json", "sets.csv", "trend.csv"}) {
      std::ifstream fa(out_a + "/" + name), fb(out_b + "/" + name);
      std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
      std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
      same = same && !sa.empty() && sa == sb;
    }
    expect(same, "repeated runs write bit-identical outputs", res_b);
  }

  if (g_failures == 0) {
    std::printf("all cli checks passed\n");
    return 0;
  }
  std::printf("%d cli check(s) failed\n", g_failures);
  return 1;
}
