#include "tlbm/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "tlbm/error.hpp"

namespace tlbm {

using nlohmann::json;

json default_config(const std::string& subcommand) {
  if (subcommand == "simulate") {
    return {{"model", "D2Q37"},
            {"Lx", 128},
            {"Ly", 256},
            {"steps", 1000},
            {"ranks", 1},
            {"tiling", "1d"},
            {"nx", 0},
            {"ny", 0},
            {"schedule", "overlapped"},
            {"tau", 1.0},
            {"gx", 0.0},
            {"gy", -1e-4},
            {"T_wall_top", 0.0},
            {"T_wall_bottom", 0.0},
            {"periodic_y", false},
            {"Hx", 3},
            {"Hy", 3},
            {"layout", "soa"},
            {"init", "rayleigh-taylor"},
            {"T_hot", 1.0},
            {"T_cold", 0.8},
            {"amplitude", 2.0},
            {"width", 1.5},
            {"pressure", 1.0},
            {"rho", 1.0},
            {"ux", 0.0},
            {"uy", 0.0},
            {"T", 0.0},
            {"noise", 0.01},
            {"seed", 1},
            {"u0", 0.01},
            {"snapshot_every", 0},
            {"snapshot_csv", false},
            {"output_dir", "out"},
            {"tdp_watts", 0.0},
            {"poison_halos", false},
            {"heartbeat_s", 120.0}};
  }
  if (subcommand == "plan") {
    return {{"Lx", 1940},
            {"Ly", 1940},
            {"np", "1-32"},
            {"S", 208.0},
            {"beta", 0.0},
            {"Bx", 0.0},
            {"By", 0.0},
            {"bandwidth_table", ""},
            {"curves", "model"},
            {"calibration_model", "D2Q37"},
            {"output", "plan.csv"}};
  }
  if (subcommand == "bench") {
    return {{"kind", "all"},
            {"model", "D2Q37"},
            {"Lx", 256},
            {"Ly", 256},
            {"workers", 1},
            {"kernel", "both"},
            {"edges", "64,128,256,512,1024,2048,4096"},
            {"bytes", 16777216},
            {"offsets", "0-64"},
            {"repetitions", 5},
            {"warmups", 3},
            {"output_dir", "bench_out"}};
  }
  if (subcommand == "validate") {
    return {{"suite", ""}, {"output", ""}};
  }
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

namespace {

json convert(const std::string& key, const json& like, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (like.type()) {
      case json::value_t::boolean:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
      case json::value_t::number_integer:
      case json::value_t::number_unsigned: {
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
        break;
      }
      case json::value_t::number_float: {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
        break;
      }
      default:
        return text;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("value '" + text + "' for '" + key + "' is not a valid " + std::string(like.type_name()));
}

void assign(json& target, const std::string& key, const json& value) {
  if (!target.contains(key)) throw ConfigError("unknown key '" + key + "'");
  const json& like = target[key];
  const bool both_numbers = like.is_number() && value.is_number();
  if (like.type() != value.type() && !both_numbers) {
    throw ConfigError("key '" + key + "' expects a " + std::string(like.type_name()) + ", got " +
                      std::string(value.type_name()));
  }
  if (like.is_number_integer() && !value.is_number_integer()) {
    throw ConfigError("key '" + key + "' expects an integer");
  }
  target[key] = like.is_number_float() ? json(value.get<double>()) : value;
}

}  // namespace

json merge_config(const std::string& subcommand, const std::filesystem::path& file,
                  const std::vector<std::pair<std::string, std::string>>& overrides) {
  json cfg = default_config(subcommand);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    json j;
    try {
      j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + file.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    if (j.contains(subcommand) && j[subcommand].is_object()) j = j[subcommand];
    for (auto it = j.begin(); it != j.end(); ++it) assign(cfg, it.key(), it.value());
  }
  for (const auto& [key, text] : overrides) {
    if (!cfg.contains(key)) throw ConfigError("unknown key '" + key + "'");
    cfg[key] = convert(key, cfg[key], text);
  }
  return cfg;
}

std::vector<int> parse_int_list(const std::string& text, int min_value) {
  std::set<int> out;
  std::size_t pos = 0;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < min_value) throw ConfigError("bad entry '" + s + "' in list '" + text + "'");
    return v;
  };
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos) {
      out.insert(number(item));
    } else {
      const int a = number(item.substr(0, dash)), b = number(item.substr(dash + 1));
      if (b < a) throw ConfigError("empty range '" + item + "'");
      for (int v = a; v <= b; ++v) out.insert(v);
    }
    pos = comma + 1;
  }
  return {out.begin(), out.end()};
}

SimulateSettings simulate_settings(const json& cfg, const VelocitySet& vs) {
  SimulateSettings s;
  SimulationConfig& sim = s.sim;
  sim.model = cfg["model"];
  sim.Lx = cfg["Lx"];
  sim.Ly = cfg["Ly"];
  sim.steps = cfg["steps"];
  sim.ranks = cfg["ranks"];
  const std::string tiling = cfg["tiling"];
  if (tiling == "1d") {
    sim.tiling = Tiling::one_d(sim.ranks);
  } else if (tiling == "2d") {
    const int nx = cfg["nx"], ny = cfg["ny"];
    if (nx * ny != sim.ranks) throw ConfigError("2d tiling needs nx * ny == ranks");
    sim.tiling = Tiling::two_d(nx, ny);
  } else {
    throw ConfigError("tiling must be 1d or 2d");
  }
  sim.schedule = parse_schedule(cfg["schedule"].get<std::string>());
  sim.physics.tau = cfg["tau"];
  sim.physics.gx = cfg["gx"];
  sim.physics.gy = cfg["gy"];
  sim.periodic_y = cfg["periodic_y"];
  sim.Hx = cfg["Hx"];
  sim.Hy = cfg["Hy"];
  sim.layout = parse_layout(cfg["layout"].get<std::string>());
  sim.snapshot_every = cfg["snapshot_every"];
  sim.poison_halos = cfg["poison_halos"];
  sim.gather_state = false;
  const double hb = cfg["heartbeat_s"];
  if (!(hb > 0)) throw ConfigError("heartbeat_s must be positive");
  sim.heartbeat = std::chrono::milliseconds(static_cast<long long>(hb * 1000));

  s.init = cfg["init"];
  const double T = cfg["T"].get<double>() > 0 ? cfg["T"].get<double>() : vs.cs2;
  double wall_bottom = T, wall_top = T;
  if (s.init == "rayleigh-taylor") {
    RayleighTaylorParams p;
    p.T_hot = cfg["T_hot"];
    p.T_cold = cfg["T_cold"];
    p.amplitude = cfg["amplitude"];
    p.width = cfg["width"];
    p.pressure = cfg["pressure"];
    p.gravity = sim.physics.gy;
    if (!(p.T_hot > 0 && p.T_cold > 0 && p.T_hot > p.T_cold)) throw ConfigError("need T_hot > T_cold > 0");
    sim.init = rayleigh_taylor(vs, sim.Lx, sim.Ly, p);
    wall_bottom = p.T_hot;
    wall_top = p.T_cold;
  } else if (s.init == "uniform") {
    sim.init = uniform_equilibrium(vs, cfg["rho"], cfg["ux"], cfg["uy"], T);
  } else if (s.init == "random") {
    sim.init = random_near_equilibrium(vs, cfg["seed"].get<std::uint64_t>(), cfg["noise"], cfg["rho"], cfg["ux"],
                                       cfg["uy"], T);
  } else if (s.init == "taylor-green") {
    sim.init = taylor_green(vs, sim.Lx, sim.Ly, cfg["u0"]);
    wall_bottom = wall_top = vs.cs2;
  } else {
    throw ConfigError("init must be rayleigh-taylor, uniform, random or taylor-green");
  }
  sim.physics.Twall_bot = cfg["T_wall_bottom"].get<double>() > 0 ? cfg["T_wall_bottom"].get<double>() : wall_bottom;
  sim.physics.Twall_top = cfg["T_wall_top"].get<double>() > 0 ? cfg["T_wall_top"].get<double>() : wall_top;

  s.output_dir = cfg["output_dir"].get<std::string>();
  s.snapshot_csv = cfg["snapshot_csv"];
  s.tdp_watts = cfg["tdp_watts"];
  if (s.tdp_watts < 0) throw ConfigError("tdp_watts must be non-negative");
  return s;
}

}  // namespace tlbm
