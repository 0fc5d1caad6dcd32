#include "tlbm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tlbm/bench.hpp"
#include "tlbm/config.hpp"
#include "tlbm/error.hpp"
#include "tlbm/planner.hpp"
#include "tlbm/runtime.hpp"
#include "tlbm/validation.hpp"

namespace tlbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> flags;
};

void add_key_flags(Subcommand& sub) {
  sub.app->add_option("--config", sub.config_file, "JSON config file (keys as listed below)");
  const json defaults = default_config(sub.app->get_name());
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    std::string* slot = &sub.flags[it.key()];
    sub.app->add_option("--" + it.key(), *slot, "default: " + it.value().dump());
  }
}

json merged(const Subcommand& sub) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& [key, value] : sub.flags) {
    if (sub.app->get_option("--" + key)->count() > 0) overrides.emplace_back(key, value);
  }
  return merge_config(sub.app->get_name(), sub.config_file, overrides);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

int simulate(const json& cfg) {
  const VelocitySet vs = build_velocity_set(cfg["model"].get<std::string>());
  SimulateSettings s = simulate_settings(cfg, vs);

  long long snapshots = 0;
  double T_min = INFINITY, T_max = -INFINITY;
  s.sim.snapshot_sink = [&](long long step, const MacroFields& m) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(8) << std::setfill('0') << step;
    if (snapshots == 0) fs::create_directories(s.output_dir);
    write_temperature_pgm(m, s.output_dir / (name.str() + ".pgm"));
    if (s.snapshot_csv) write_macro_csv(m, s.output_dir / (name.str() + ".csv"));
    for (double T : m.T) {
      T_min = std::min(T_min, T);
      T_max = std::max(T_max, T);
    }
    ++snapshots;
  };

  const RunResult r = run(s.sim);

  std::ofstream metrics = open_output(s.output_dir / "metrics.csv");
  metrics << "step,rank,comm_nc_s,comm_c_s,bulk_s,border_s,negative_populations\n";
  for (const StepMetrics& m : r.metrics) {
    metrics << m.step << "," << m.rank << "," << m.times.comm_nc << "," << m.times.comm_c << "," << m.times.bulk
            << "," << m.times.border << "," << m.times.negative_populations << "\n";
  }

  const double uj_per_site = s.tdp_watts > 0 && r.mlups > 0 ? s.tdp_watts / (r.mlups * 1e6) * 1e6 : 0.0;
  std::ofstream summary = open_output(s.output_dir / "summary.csv");
  summary << "sites,steps,ranks,wall_s,mlups,uj_per_site,negative_populations\n"
          << r.sites << "," << r.steps << "," << s.sim.ranks << "," << r.wall_seconds << "," << r.mlups << ","
          << uj_per_site << "," << r.negative_populations << "\n";

  std::cout << s.sim.model << " " << s.sim.Lx << "x" << s.sim.Ly << " on " << s.sim.ranks << " rank(s), "
            << to_string(s.sim.tiling) << ", " << to_string(s.sim.schedule) << "\n"
            << "steps " << r.steps << "  wall " << r.wall_seconds << " s  MLUPS " << r.mlups << "\n";
  if (uj_per_site > 0) std::cout << "energy " << uj_per_site << " uJ/site (TDP " << s.tdp_watts << " W)\n";
  if (snapshots > 0) std::cout << snapshots << " snapshot(s), T in [" << T_min << ", " << T_max << "]\n";
  if (r.negative_populations > 0) std::cout << "warning: " << r.negative_populations << " negative populations\n";
  std::cout << "outputs in " << s.output_dir.string() << "\n";
  return kExitOk;
}

double calibrate_beta(const std::string& model) {
  const VelocitySet vs = build_velocity_set(model);
  SimulationConfig sim;
  sim.model = model;
  sim.Lx = sim.Ly = 128;
  sim.steps = 20;
  sim.gather_state = false;
  sim.schedule = Schedule::Staged;
  sim.init = uniform_equilibrium(vs, 1.0, 0.0, 0.0, vs.cs2);
  sim.physics.Twall_bot = sim.physics.Twall_top = vs.cs2;
  const RunResult r = run(sim);
  return r.wall_seconds / (static_cast<double>(r.sites) * r.steps);
}

int plan(const json& cfg) {
  const double Lx = cfg["Lx"], Ly = cfg["Ly"], S = cfg["S"];
  const std::vector<int> nps = parse_int_list(cfg["np"]);
  double beta = cfg["beta"];
  if (beta < 0) throw ConfigError("beta must be non-negative");
  if (beta == 0) {
    beta = calibrate_beta(cfg["calibration_model"]);
    std::cout << "calibrated beta " << beta << " s/site\n";
  }
  BandwidthTable table;
  const double Bx = cfg["Bx"], By = cfg["By"];
  const std::string table_path = cfg["bandwidth_table"];
  if (Bx > 0 && By > 0) {
    table = BandwidthTable::constant(By, Bx);
  } else if (!table_path.empty()) {
    table = BandwidthTable::load_csv(table_path);
  } else {
    BenchOptions opt;
    opt.warmups = 1;
    table = to_bandwidth_table(bench_halo_exchange({64, 256, 1024, 4096}, "D2Q37", opt));
    std::cout << "measured halo bandwidths on 4 edge lengths\n";
  }
  const CostModelInput in =
      CostModelInput::make(Lx, Ly, 1, table.noncontiguous(S * Lx), table.contiguous(S * Ly), beta, S);

  std::ofstream out = open_output(cfg["output"].get<std::string>());
  const std::string curves = cfg["curves"];
  if (curves == "model") {
    out << "Np,curve,T_total_s,scale_violation,np_times_T_s\n";
    for (const ModelCurvePoint& p : model_curves(in, nps, table)) {
      out << p.Np << "," << p.curve << "," << p.T_total << "," << p.scale_violation << "," << p.np_times_T << "\n";
    }
  } else if (curves == "all") {
    const auto rows = scaling_curve(in, nps, table);
    out << "Np,nx,ny,tiling,T_total_s,T_C_s,scale_violation,np_times_T_s\n";
    for (const CurveRow& r : rows) {
      out << r.Np << "," << r.nx << "," << r.ny << "," << r.tiling << "," << r.T_total << "," << r.T_C << ","
          << r.scale_violation << "," << r.np_times_T << "\n";
    }
    int crossover = 0;
    for (const TilingComparison& c : compare_tilings(rows)) {
      if (c.has_2d && c.best_2d.T_total < c.best_1d.T_total) {
        crossover = c.Np;
        break;
      }
    }
    if (crossover) {
      std::cout << "2D tiling first beats 1D at Np = " << crossover << "\n";
    } else {
      std::cout << "1D tiling is never beaten by 2D in this range\n";
    }
  } else {
    throw ConfigError("curves must be 'model' or 'all'");
  }
  std::cout << "wrote " << cfg["output"].get<std::string>() << "\n";
  return kExitOk;
}

int bench(const json& cfg) {
  BenchOptions opt;
  opt.repetitions = cfg["repetitions"];
  opt.warmups = cfg["warmups"];
  if (opt.warmups < 0) throw ConfigError("warmups must be non-negative");
  const fs::path dir = cfg["output_dir"].get<std::string>();
  const std::string kind = cfg["kind"];
  const std::string model = cfg["model"];
  if (kind != "all" && kind != "layout" && kind != "misalignment" && kind != "halo") {
    throw ConfigError("kind must be all, layout, misalignment or halo");
  }
  fs::create_directories(dir);
  int status = kExitOk;

  if (kind == "all" || kind == "layout") {
    const std::string k = cfg["kernel"];
    std::vector<BenchKernel> kernels;
    if (k == "both") {
      kernels = {BenchKernel::Propagate, BenchKernel::Collide};
    } else {
      kernels = {parse_bench_kernel(k)};
    }
    std::vector<BenchResult> results;
    for (BenchKernel kernel : kernels) {
      for (Layout layout : {Layout::SoA, Layout::AoS}) {
        results.push_back(bench_layout(cfg["Lx"], cfg["Ly"], kernel, layout, cfg["workers"], model, opt));
        const BenchResult& r = results.back();
        std::cout << std::left << std::setw(16) << r.name << " median " << r.median << " s  " << r.metric / 1e6
                  << " Msites/s\n";
      }
    }
    write_bench_csv(dir / "layout.csv", results);
  }

  if (kind == "all" || kind == "misalignment") {
    std::vector<BenchResult> results;
    const std::size_t bytes = cfg["bytes"].get<std::size_t>();
    for (int offset : parse_int_list(cfg["offsets"], 0)) {
      for (CopyMode mode : {CopyMode::Mraw, CopyMode::Armw}) {
        results.push_back(bench_misalignment(bytes, static_cast<std::size_t>(offset), mode, opt));
      }
    }
    write_bench_csv(dir / "misalignment.csv", results);
    std::cout << "misalignment sweep: " << results.size() << " points\n";
  }

  if (kind == "all" || kind == "halo") {
    const auto rows = bench_halo_exchange(parse_int_list(cfg["edges"]), model, opt);
    std::vector<BenchResult> flat;
    double previous = 0;
    for (const HaloBenchRow& r : rows) {
      flat.push_back(r.contiguous);
      flat.push_back(r.noncontiguous);
      const bool ordered = r.contiguous.metric >= 0.9 * r.noncontiguous.metric;
      std::cout << "edge " << std::setw(6) << r.edge << "  contiguous " << r.contiguous.metric / 1e9
                << " GB/s  non-contiguous " << r.noncontiguous.metric / 1e9 << " GB/s"
                << (ordered ? "" : "  FAIL: contiguous below non-contiguous") << "\n";
      if (!ordered) status = kExitValidation;
      if (r.contiguous.metric < 0.9 * previous) {
        std::cout << "warning: contiguous bandwidth drops at edge " << r.edge << "\n";
      }
      previous = std::max(previous, r.contiguous.metric);
    }
    write_bench_csv(dir / "halo.csv", flat);
    const BandwidthTable table = to_bandwidth_table(rows);
    table.save_csv(dir / "bandwidth.csv");
    BandwidthTable::load_csv(dir / "bandwidth.csv");
  }
  std::cout << "outputs in " << dir.string() << "\n";
  return status;
}

int validate(const json& cfg) {
  const std::string suite = cfg["suite"];
  if (suite.empty()) throw ConfigError("--suite is required");
  const std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  json report = json::array();
  bool passed = true;
  for (const std::string& name : names) {
    const SuiteReport r = run_suite(name);
    passed = passed && r.passed;
    report.push_back(json::parse(r.to_json()));
    std::cerr << name << ": " << (r.passed ? "pass" : "FAIL") << "\n";
  }
  const json out = names.size() == 1 ? report[0] : json{{"passed", passed}, {"suites", report}};
  const std::string path = cfg["output"];
  if (path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    open_output(path) << out.dump(2) << "\n";
  }
  return passed ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Thermal lattice Boltzmann engine with simulated multi-rank decomposition"};
  app.require_subcommand(1);
  std::map<std::string, Subcommand> subs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"simulate", "run a simulation and write metrics and snapshots"},
           {"plan", "predict scaling of 1D and 2D tilings"},
           {"bench", "layout, misalignment and halo-exchange micro-benchmarks"},
           {"validate", "run a property suite and print a JSON report"}}) {
    Subcommand& sub = subs[name];
    sub.app = app.add_subcommand(name, help);
    add_key_flags(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const json cfg = merged(sub);
      if (name == "simulate") return simulate(cfg);
      if (name == "plan") return plan(cfg);
      if (name == "bench") return bench(cfg);
      return validate(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedCase& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace tlbm
