#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tlbm/cli.hpp"
#include "tlbm/config.hpp"
#include "tlbm/error.hpp"
#include "tlbm/kernels.hpp"
#include "tlbm/runtime.hpp"

using namespace tlbm;
namespace fs = std::filesystem;

namespace {

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tlbm");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("integer lists") {
  CHECK(parse_int_list("1-4") == std::vector<int>{1, 2, 3, 4});
  CHECK(parse_int_list("8,2,2,4-5") == std::vector<int>{2, 4, 5, 8});
  CHECK(parse_int_list("0-2", 0) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(parse_int_list("0-2"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("3-1"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("a"), ConfigError);
}

TEST_CASE("config layering: defaults, file, flags") {
  const fs::path file = fs::temp_directory_path() / "tlbm_cfg.json";
  std::ofstream(file) << R"({"simulate": {"Lx": 64, "tau": 0.9, "init": "uniform"}})";
  const auto cfg = merge_config("simulate", file, {{"tau", "0.75"}, {"periodic_y", "true"}});
  CHECK(cfg["Lx"] == 64);
  CHECK(cfg["Ly"] == 256);
  CHECK(cfg["tau"] == 0.75);
  CHECK(cfg["periodic_y"] == true);
  CHECK(cfg["init"] == "uniform");
  CHECK_THROWS_AS(merge_config("simulate", file, {{"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(merge_config("simulate", file, {{"Lx", "1.5"}}), ConfigError);
  std::ofstream(file) << R"({"Lx": "wide"})";
  CHECK_THROWS_AS(merge_config("simulate", file, {}), ConfigError);
  fs::remove(file);
  CHECK_THROWS_AS(merge_config("simulate", "/nonexistent/cfg.json", {}), ConfigError);
}

TEST_CASE("default simulation settings") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  const SimulateSettings s = simulate_settings(default_config("simulate"), vs);
  CHECK(s.sim.model == "D2Q37");
  CHECK(s.sim.physics.tau == 1.0);
  CHECK(s.sim.physics.gy == -1e-4);
  CHECK(s.sim.schedule == Schedule::Overlapped);
  CHECK(s.sim.Hx == 3);
  CHECK(s.sim.Hy == 3);
  CHECK(s.init == "rayleigh-taylor");
}

TEST_CASE("rayleigh-taylor preset starts hydrostatic and inside the wall temperatures") {
  const VelocitySet vs = build_velocity_set("D2Q37");
  nlohmann::json cfg = default_config("simulate");
  cfg["Lx"] = 32;
  cfg["Ly"] = 64;
  cfg["steps"] = 200;
  cfg["snapshot_every"] = 100;
  SimulateSettings s = simulate_settings(cfg, vs);
  const double T_hot = cfg["T_hot"], T_cold = cfg["T_cold"], g = cfg["gy"];
  CHECK(s.sim.physics.Twall_bot == T_hot);
  CHECK(s.sim.physics.Twall_top == T_cold);

  // Pressure along a column against a trapezoid integral of dp/dy = p g / T.
  const int x = 5;
  std::vector<SiteMoments> col;
  std::vector<double> f(vs.Q);
  for (int y = 0; y < 64; ++y) {
    s.sim.init(x, y, f);
    col.push_back(moments(f, vs));
  }
  double log_p = std::log(col[0].rho * col[0].T);
  for (int y = 1; y < 64; ++y) {
    for (int k = 0; k < 64; ++k) {
      const double yy = y - 1 + (k + 0.5) / 64.0;
      const double iface = 32 + 2.0 * std::cos(2 * 3.141592653589793 * (x + 0.5) / 32);
      log_p += g / (0.5 * (T_hot + T_cold) - 0.5 * (T_hot - T_cold) * std::tanh((yy + 0.5 - iface) / 1.5)) / 64.0;
    }
    CHECK(std::log(col[y].rho * col[y].T) == doctest::Approx(log_p).epsilon(1e-9));
  }

  double lo = 1e300, hi = -1e300, lo0 = 1e300, hi0 = -1e300;
  s.sim.snapshot_sink = [&](long long step, const MacroFields& m) {
    const auto [a, b] = std::minmax_element(m.T.begin(), m.T.end());
    (step == 0 ? lo0 : lo) = std::min(step == 0 ? lo0 : lo, *a);
    (step == 0 ? hi0 : hi) = std::max(step == 0 ? hi0 : hi, *b);
  };
  run(s.sim);
  CHECK(lo0 > T_cold - 1e-12);
  CHECK(hi0 < T_hot + 1e-12);
  // Compressive transients overshoot slightly; the raw moments also carry the g^2/D shift.
  CHECK(lo > T_cold - 1e-3);
  CHECK(hi < T_hot + 1e-3);
}

TEST_CASE("simulate writes metrics, summary and snapshots") {
  const fs::path dir = fs::temp_directory_path() / "tlbm_cli_sim";
  fs::remove_all(dir);
  CHECK(cli({"simulate", "--init", "uniform", "--gy", "0", "--Lx", "32", "--Ly", "32", "--steps", "4", "--ranks",
             "2", "--snapshot_every", "2", "--snapshot_csv", "true", "--tdp_watts", "65", "--output_dir",
             dir.string()}) == kExitOk);
  CHECK(slurp(dir / "metrics.csv").rfind("step,rank,comm_nc_s", 0) == 0);
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.find("mlups") != std::string::npos);
  CHECK(fs::exists(dir / "snapshot_00000004.pgm"));
  CHECK(slurp(dir / "snapshot_00000002.csv").rfind("x,y,rho,ux,uy,T", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identical configs give identical snapshots") {
  const fs::path a = fs::temp_directory_path() / "tlbm_cli_a", b = fs::temp_directory_path() / "tlbm_cli_b";
  for (const auto& d : {a, b}) {
    fs::remove_all(d);
    CHECK(cli({"simulate", "--Lx", "32", "--Ly", "32", "--steps", "6", "--snapshot_every", "6", "--snapshot_csv",
               "true", "--output_dir", d.string()}) == kExitOk);
  }
  CHECK(slurp(a / "snapshot_00000006.pgm") == slurp(b / "snapshot_00000006.pgm"));
  CHECK(slurp(a / "snapshot_00000006.csv") == slurp(b / "snapshot_00000006.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("large lattice config parses and dispatches") {
  const fs::path dir = fs::temp_directory_path() / "tlbm_cli_big";
  CHECK(cli({"simulate", "--model", "D2Q9", "--Lx", "1024", "--Ly", "8192", "--steps", "1", "--ranks", "4",
             "--init", "uniform", "--gy", "0", "--output_dir", dir.string()}) == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(cli({"simulate", "--Lx", "30", "--ranks", "4"}) == kExitConfig);
  CHECK(cli({"simulate", "--bogus", "1"}) == kExitConfig);
  CHECK(cli({"validate", "--suite", "nope"}) == kExitConfig);
  CHECK(cli({"validate"}) == kExitConfig);
  CHECK(cli({}) == kExitConfig);
  const fs::path out = fs::temp_directory_path() / "tlbm_report.json";
  CHECK(cli({"validate", "--suite", "moments", "--output", out.string()}) == kExitOk);
  CHECK(slurp(out).find("\"passed\": true") != std::string::npos);
  fs::remove(out);
}

TEST_CASE("plan writes the four model curves") {
  const fs::path out = fs::temp_directory_path() / "tlbm_plan.csv";
  CHECK(cli({"plan", "--beta", "1e-8", "--Bx", "1e9", "--By", "4e9", "--np", "1-8", "--output", out.string()}) ==
        kExitOk);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("Np,curve,T_total_s", 0) == 0);
  for (const char* c : {"1d,", "1d_overlap,", "2d,", "2d_overlap,"}) CHECK(csv.find(c) != std::string::npos);
  CHECK(cli({"plan", "--beta", "1e-8", "--Bx", "1e9", "--By", "4e9", "--Lx", "3600", "--Ly", "3600", "--np", "1-32",
             "--curves", "all", "--output", out.string()}) == kExitOk);
  CHECK(slurp(out).find(",2D,") != std::string::npos);
  fs::remove(out);
}
