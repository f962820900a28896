#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccembed/digest.hpp"
#include "ccembed/errors.hpp"
#include "ccembed/random.hpp"

namespace ccembed::cli {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t kLibraryStream = 0x4c4942;
constexpr std::uint64_t kMonteCarloStream = 0x4d43;

constexpr const char* kSections[] = {"system",    "prior",    "disturbance", "dataset",
                                     "library",   "kernel",   "embedding",   "scenario",
                                     "montecarlo", "output"};

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

const json& section(const json& root, const char* name) {
  if (!root.contains(name) || !root[name].is_object()) {
    throw ConfigError(std::string("missing config section '") + name + "'");
  }
  return root[name];
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return obj[key];
}

double number(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::size_t count(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::size_t count_or(const json& obj, const std::string& where, const char* key,
                     std::size_t fallback) {
  return obj.contains(key) ? count(obj, where, key) : fallback;
}

std::string text_or(const json& obj, const std::string& where, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError(where + "." + key + " must be a string");
  return obj[key].get<std::string>();
}

Vector vec(const json& v, const std::string& where, std::size_t expected = 0) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  if (expected && v.size() != expected) {
    throw ConfigError(where + " must have " + std::to_string(expected) + " entries");
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) throw ConfigError(where + " must contain only numbers");
    out(static_cast<Eigen::Index>(k)) = v[k].get<double>();
  }
  return out;
}

Vector vec_field(const json& obj, const std::string& where, const char* key,
                 std::size_t expected = 0) {
  return vec(require(obj, where, key), where + "." + key, expected);
}

ScaledBeta beta(const json& obj, const std::string& where, const ScaledBeta& fallback) {
  ScaledBeta b = fallback;
  b.shape_a = number_or(obj, where, "shape_a", b.shape_a);
  b.shape_b = number_or(obj, where, "shape_b", b.shape_b);
  b.offset = number_or(obj, where, "offset", b.offset);
  b.scale = number_or(obj, where, "scale", b.scale);
  return b;
}

KernelSpec kernel(const json& obj, const std::string& where) {
  const std::string family = text_or(obj, where, "family", "gaussian");
  if (family != "gaussian") throw ConfigError(where + ".family: only 'gaussian' is supported");
  const std::string mode = text_or(obj, where, "bandwidth_mode", "median_heuristic");
  if (mode == "median_heuristic") return KernelSpec::median_heuristic();
  if (mode == "fixed") {
    const double bw = number(obj, where, "bandwidth");
    if (!(bw > 0.0)) throw ConfigError(where + ".bandwidth must be > 0");
    return KernelSpec::fixed(bw);
  }
  throw ConfigError(where + ".bandwidth_mode must be 'fixed' or 'median_heuristic'");
}

Obstacle obstacle(const json& obj, const std::string& where) {
  const json& steps = require(obj, where, "active_steps");
  if (!steps.is_array() || steps.size() != 2 || !steps[0].is_number_unsigned() ||
      !steps[1].is_number_unsigned()) {
    throw ConfigError(where + ".active_steps must be [first, last]");
  }
  const auto first = steps[0].get<std::size_t>();
  const auto last = steps[1].get<std::size_t>();
  if (obj.contains("box")) {
    const Vector b = vec(obj["box"], where + ".box", 4);
    return Obstacle::box(b(0), b(1), b(2), b(3), first, last);
  }
  const json& hs = require(obj, where, "halfspaces");
  if (!hs.is_array()) throw ConfigError(where + ".halfspaces must be an array");
  Obstacle o;
  o.first_step = first;
  o.last_step = last;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const std::string hw = where + ".halfspaces[" + std::to_string(k) + "]";
    const Vector normal = vec_field(hs[k], hw, "normal", 2);
    o.halfspaces.push_back({{normal(0), normal(1)}, number(hs[k], hw, "offset")});
  }
  return o;
}

void parse_scenario(const json& sec, RunConfig& cfg) {
  const std::string w = "scenario";
  Scenario& sc = cfg.scenario;
  sc.horizon = count(sec, w, "N");
  sc.dt = number(sec, w, "dt");
  cfg.x0 = vec_field(sec, w, "x0", 4);

  const json& deltas = require(sec, w, "deltas");
  cfg.deltas = std::vector<double>();
  const Vector d = vec(deltas, w + ".deltas");
  for (Eigen::Index k = 0; k < d.size(); ++k) cfg.deltas.push_back(d(k));

  const json& goal = require(sec, w, "goal");
  const Vector center = vec_field(goal, w + ".goal", "center", 2);
  sc.goal.center = {center(0), center(1)};
  sc.goal.radius = number(goal, w + ".goal", "radius");
  if (goal.contains("position_indices")) {
    const Vector idx = vec(goal["position_indices"], w + ".goal.position_indices", 2);
    sc.goal.position_indices = {static_cast<std::size_t>(idx(0)),
                                static_cast<std::size_t>(idx(1))};
  }

  if (sec.contains("obstacles")) {
    const json& obs = sec["obstacles"];
    if (!obs.is_array()) throw ConfigError("scenario.obstacles must be an array");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      sc.obstacles.push_back(obstacle(obs[k], w + ".obstacles[" + std::to_string(k) + "]"));
    }
  }

  if (sec.contains("costs")) {
    const json& costs = sec["costs"];
    if (costs.contains("state")) {
      const json& s = costs["state"];
      if (text_or(s, "scenario.costs.state", "kind", "quadratic_to_goal") != "quadratic_to_goal") {
        throw ConfigError("scenario.costs.state.kind must be 'quadratic_to_goal'");
      }
      sc.costs.stage_weight = number_or(s, "scenario.costs.state", "stage_weight", 0.0);
      sc.costs.terminal_weight = number_or(s, "scenario.costs.state", "terminal_weight", 1.0);
    }
    if (costs.contains("control")) {
      const json& c = costs["control"];
      if (text_or(c, "scenario.costs.control", "kind", "quadratic_effort") != "quadratic_effort") {
        throw ConfigError("scenario.costs.control.kind must be 'quadratic_effort'");
      }
      sc.costs.control_weight = number_or(c, "scenario.costs.control", "weight", 0.1);
    }
  }
}

void parse_dataset(const json& sec, RunConfig& cfg) {
  const std::string w = "dataset";
  DatasetGenConfig& d = cfg.dataset;
  d = DatasetGenConfig::quadrotor_default();
  d.sample_count = count(sec, w, "M");
  d.horizon = cfg.scenario.horizon;
  if (sec.contains("x0_low")) d.x0_low = vec_field(sec, w, "x0_low", 4);
  if (sec.contains("x0_high")) d.x0_high = vec_field(sec, w, "x0_high", 4);
  d.randomized_steps = count_or(sec, w, "randomized_steps", d.randomized_steps);
  if (sec.contains("control_low")) d.control_low = vec_field(sec, w, "control_low", 2);
  if (sec.contains("control_high")) d.control_high = vec_field(sec, w, "control_high", 2);
  if (sec.contains("gain_matrix")) {
    const json& rows = sec["gain_matrix"];
    if (!rows.is_array() || rows.size() != 2) throw ConfigError("dataset.gain_matrix must be 2x4");
    d.gain = Matrix(2, 4);
    for (std::size_t r = 0; r < 2; ++r) {
      d.gain.row(static_cast<Eigen::Index>(r)) = vec(rows[r], "dataset.gain_matrix", 4).transpose();
    }
  } else if (sec.contains("gain")) {
    const json& g = sec["gain"];
    d.gain = DatasetGenConfig::pd_gain(number(g, "dataset.gain", "kp"),
                                       number(g, "dataset.gain", "kd"));
  }
  if (sec.contains("target")) d.target = vec_field(sec, w, "target", 4);
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const Overrides& overrides,
                           const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at line " + std::to_string(line_of(text, e.byte)) +
                      ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  for (const char* name : kSections) section(root, name);

  if (overrides.seed) root["seed"] = *overrides.seed;
  if (overrides.delta) root["scenario"]["deltas"] = json::array({*overrides.delta});
  if (overrides.x0) root["scenario"]["x0"] = *overrides.x0;
  if (overrides.out_dir) root["output"]["dir"] = overrides.out_dir->string();

  RunConfig cfg;
  try {
    if (!root.contains("seed") || !root["seed"].is_number_unsigned()) {
      throw ConfigError("missing or invalid top-level 'seed' (non-negative integer)");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();

    const json& system = section(root, "system");
    if (system.contains("nominal_params")) {
      const json& np = system["nominal_params"];
      cfg.nominal.mass = number_or(np, "system.nominal_params", "mass", cfg.nominal.mass);
      cfg.nominal.drag = number_or(np, "system.nominal_params", "drag", cfg.nominal.drag);
    }

    const json& prior = section(root, "prior");
    if (prior.contains("mass")) cfg.prior.mass = beta(prior["mass"], "prior.mass", cfg.prior.mass);
    if (prior.contains("drag")) cfg.prior.drag = beta(prior["drag"], "prior.drag", cfg.prior.drag);

    const json& dist = section(root, "disturbance");
    cfg.disturbance = dist.contains("per_step_std")
                          ? DisturbanceSpec{vec_field(dist, "disturbance", "per_step_std", 4)}
                          : DisturbanceSpec::quadrotor_default();

    parse_scenario(section(root, "scenario"), cfg);
    parse_dataset(section(root, "dataset"), cfg);

    const json& lib = section(root, "library");
    const std::string mode = text_or(lib, "library", "mode", "grid");
    if (mode == "grid") {
      cfg.library.mode = LibraryMode::grid;
    } else if (mode == "uniform") {
      cfg.library.mode = LibraryMode::uniform;
    } else {
      throw ConfigError("library.mode must be 'grid' or 'uniform'");
    }
    cfg.library.grid_resolution = count_or(lib, "library", "grid_resolution", 4);
    cfg.library.count = count_or(lib, "library", "count", 1000);
    cfg.library.max_sequences = count_or(lib, "library", "max_sequences", 100000);
    cfg.library.x0 = cfg.x0;
    cfg.library.seed = derive_seed(cfg.seed, kLibraryStream);

    const json& kern = section(root, "kernel");
    cfg.state_kernel = kern.contains("state") ? kernel(kern["state"], "kernel.state")
                                              : KernelSpec::median_heuristic();
    cfg.control_kernel = kern.contains("control") ? kernel(kern["control"], "kernel.control")
                                                  : KernelSpec::median_heuristic();

    cfg.lambda = number(section(root, "embedding"), "embedding", "lambda");
    if (!(cfg.lambda > 0.0)) throw ConfigError("embedding.lambda must be > 0");

    const json& mc = section(root, "montecarlo");
    cfg.trials = count(mc, "montecarlo", "trials");
    if (cfg.trials == 0) throw ConfigError("montecarlo.trials must be >= 1");
    cfg.montecarlo_seed = mc.contains("seed") ? mc["seed"].get<std::uint64_t>()
                                              : derive_seed(cfg.seed, kMonteCarloStream);
    cfg.keep_trajectories = count_or(mc, "montecarlo", "keep_trajectories", 2000);

    const json& out = section(root, "output");
    std::filesystem::path dir = text_or(out, "output", "dir", "out");
    cfg.out_dir = dir.is_absolute() || base_dir.empty() ? dir : base_dir / dir;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }

  if (cfg.deltas.empty()) throw ConfigError("scenario.deltas must be non-empty");
  for (double d : cfg.deltas) {
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("every delta must lie in (0, 1)");
  }
  cfg.scenario.delta = cfg.deltas.front();
  try {
    cfg.scenario.validate();
    cfg.dataset.validate(4, 2);
    cfg.nominal.validate();
    cfg.prior.validate();
    cfg.disturbance.validate(4);
  } catch (const InputError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  // Output location does not affect results.
  json identity = root;
  identity.erase("output");
  cfg.digest = digest_hex(identity.dump());
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(0, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), overrides, path.parent_path());
}

}  // namespace ccembed::cli
