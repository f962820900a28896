#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ccembed/ccsolver.hpp"
#include "ccembed/datagen.hpp"
#include "ccembed/embedding.hpp"
#include "ccembed/errors.hpp"
#include "ccembed/policy_mc.hpp"

namespace ccembed::cli {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Write failures are IO errors, distinct from bad input files.
class WriteError : public Error {
 public:
  using Error::Error;
};

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteError("cannot write " + path.string());
  out << text;
  if (!out) throw WriteError("write failed for " + path.string());
}

std::optional<ojson> read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ojson::parse(buf.str());
  } catch (const ojson::parse_error&) {
    return std::nullopt;
  }
}

ojson require_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ojson::parse(buf.str());
  } catch (const ojson::parse_error& e) {
    throw LoadError(0, path.string() + ": malformed JSON: " + e.what());
  }
}

// A cached JSON-lines file is reusable when its header matches this run.
bool header_matches(const fs::path& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  std::string first;
  if (!in || !std::getline(in, first)) return false;
  try {
    const ojson h = ojson::parse(first);
    return h.value("config_digest", "") == cfg.digest &&
           h.value("master_seed", std::uint64_t{0}) == cfg.seed;
  } catch (const ojson::exception&) {
    return false;
  }
}

std::string csv_preamble(const RunConfig& cfg) {
  return "# config_digest=" + cfg.digest + " master_seed=" + std::to_string(cfg.seed) + "\n";
}

bool json_matches(const std::optional<ojson>& j, const RunConfig& cfg) {
  return j && j->is_object() && j->value("config_digest", "") == cfg.digest &&
         j->value("master_seed", std::uint64_t{0}) == cfg.seed;
}

QuadrotorModel true_model(const RunConfig& cfg) {
  return QuadrotorModel(cfg.scenario.dt, cfg.prior, cfg.disturbance);
}

void generate_files(const RunConfig& cfg, bool use_cache, std::ostream& log) {
  const OutputPaths paths{cfg.out_dir};
  if (use_cache && header_matches(paths.dataset(), cfg)) {
    log << "[generate] dataset: cached, skipped (" << paths.dataset().string() << ")\n";
  } else {
    const QuadrotorModel model = true_model(cfg);
    Dataset ds = generate_dataset(cfg.dataset, model, cfg.seed);
    ds.config_digest = cfg.digest;
    write_text(paths.dataset(), serialize_dataset(ds));
    log << "[generate] dataset: M=" << ds.size() << " n=" << ds.state_dim
        << " m=" << ds.control_dim << " N=" << ds.horizon << " seed=" << cfg.seed << " -> "
        << paths.dataset().string() << "\n";
  }
  if (use_cache && header_matches(paths.library(), cfg)) {
    log << "[generate] library: cached, skipped (" << paths.library().string() << ")\n";
  } else {
    ControlLibrary lib = generate_library(cfg.dataset, cfg.library, cfg.nominal, cfg.scenario.dt);
    lib.master_seed = cfg.seed;
    lib.config_digest = cfg.digest;
    write_text(paths.library(), serialize_library(lib));
    log << "[generate] library: P=" << lib.size() << " m=" << lib.control_dim
        << " N=" << lib.horizon << " -> " << paths.library().string() << "\n";
  }
}

struct SolveContext {
  std::shared_ptr<const ControlLibrary> library;
  std::optional<EmbeddingModel> model;
  std::optional<LPInstance> instance;
  std::string library_digest;
};

SolveContext load_for_solve(const RunConfig& cfg, std::ostream& log) {
  const OutputPaths paths{cfg.out_dir};
  auto ds = std::make_shared<const Dataset>(load_dataset(paths.dataset()));
  SolveContext ctx;
  ctx.library = std::make_shared<const ControlLibrary>(load_library(paths.library()));
  ctx.library_digest = library_digest(*ctx.library);
  ctx.model.emplace(fit(ds, cfg.state_kernel, cfg.control_kernel, cfg.lambda));
  log << "[solve] embedding: M=" << ctx.model->size()
      << " state bandwidth=" << ctx.model->state_kernel().bandwidth
      << " control bandwidth=" << ctx.model->control_kernel().bandwidth
      << " lambda=" << cfg.lambda << "\n";
  ctx.instance.emplace(assemble(*ctx.model, cfg.scenario, *ctx.library, cfg.x0));
  const SafetyDiagnostics& d = ctx.instance->diagnostics;
  log << "[solve] assembled P=" << ctx.instance->size() << " safety range [" << d.min_value
      << ", " << d.max_value << "], " << d.below_zero << " below 0, " << d.above_one
      << " above 1\n";
  return ctx;
}

// Returns true when feasible.
bool solve_delta(const RunConfig& cfg, SolveContext& ctx, double delta, std::ostream& log) {
  const LPInstance inst = with_delta(*ctx.instance, delta);
  const SolveResult result = solve_lp(inst);
  ojson j = ojson::parse(to_json(result, inst));
  j["delta"] = delta;
  j["x0"] = std::vector<double>(cfg.x0.data(), cfg.x0.data() + cfg.x0.size());
  j["library_digest"] = ctx.library_digest;
  j["model_digest"] = ctx.model->digest();
  j["config_digest"] = cfg.digest;
  j["master_seed"] = cfg.seed;
  const fs::path out = OutputPaths{cfg.out_dir}.policy(delta);
  write_text(out, j.dump(2) + "\n");

  log << "[solve] delta=" << delta_label(delta) << " status=" << to_string(result.status);
  if (result.status == SolveStatus::optimal) {
    log << " objective=" << result.objective << " support={";
    for (std::size_t k = 0; k < result.support.size(); ++k) {
      log << (k ? "," : "") << result.support[k] << ":"
          << result.weights(static_cast<Eigen::Index>(result.support[k]));
    }
    log << "}";
  }
  log << " -> " << out.string() << "\n";
  if (result.relies_on_superunit_safety) {
    log << "[solve] warning: delta=" << delta_label(delta)
        << " constraint met only through safety estimates above 1\n";
  }
  return result.status == SolveStatus::optimal;
}

struct ValidateOutcome {
  double success_rate = 0.0;
  double standard_error = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

ValidateOutcome validate_policy(const RunConfig& cfg, const ojson& policy,
                                const ControlLibrary& lib_in, std::ostream& log) {
  auto lib = std::make_shared<const ControlLibrary>(lib_in);
  const std::string expected = policy.value("library_digest", "");
  const std::string actual = library_digest(*lib);
  if (expected != actual) {
    throw InputError("policy was solved against library " + expected +
                     " but the library on disk has digest " + actual +
                     "; regenerate or re-solve before validating");
  }
  if (policy.value("status", "") != "optimal") {
    throw InputError("policy status is not optimal; nothing to validate");
  }
  Vector weights = Vector::Zero(static_cast<Eigen::Index>(lib->size()));
  for (const auto& entry : policy.at("weights")) {
    const auto idx = entry.at(0).get<std::size_t>();
    if (idx >= lib->size()) throw InputError("policy weight index out of range");
    weights(static_cast<Eigen::Index>(idx)) = entry.at(1).get<double>();
  }
  const auto x0v = policy.at("x0").get<std::vector<double>>();
  const Vector x0 = Eigen::Map<const Vector>(x0v.data(), static_cast<Eigen::Index>(x0v.size()));
  const double delta = policy.at("delta").get<double>();

  PolicyProvenance prov{x0, delta, policy.value("model_digest", "")};
  const MixedPolicy pol(weights, lib, prov);
  const QuadrotorModel model = true_model(cfg);
  const MonteCarloReport report = run_monte_carlo(pol, model, cfg.scenario, x0, cfg.trials,
                                                  cfg.montecarlo_seed, cfg.keep_trajectories);

  ojson j = ojson::parse(to_json(report));
  ojson out;
  out["delta"] = delta;
  out["library_digest"] = actual;
  out["config_digest"] = cfg.digest;
  out["master_seed"] = cfg.seed;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();

  const OutputPaths paths{cfg.out_dir};
  write_text(paths.report(delta), out.dump(2) + "\n");
  write_text(paths.trajectories(delta), csv_preamble(cfg) + trajectories_csv(report, 4));
  log << "[validate] delta=" << delta_label(delta) << " trials=" << report.trials
      << " success_rate=" << report.success_rate << " +/- " << report.standard_error
      << " wilson95=[" << report.wilson_low << ", " << report.wilson_high << "] -> "
      << paths.report(delta).string() << "\n";
  return {report.success_rate, report.standard_error, report.wilson_low, report.wilson_high};
}

}  // namespace

fs::path OutputPaths::policy(double delta) const {
  return dir / ("policy_delta_" + delta_label(delta) + ".json");
}
fs::path OutputPaths::report(double delta) const {
  return dir / ("report_delta_" + delta_label(delta) + ".json");
}
fs::path OutputPaths::trajectories(double delta) const {
  return dir / ("trajectories_delta_" + delta_label(delta) + ".csv");
}

std::string delta_label(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", delta);
  return buf;
}

int cmd_generate(const RunConfig& cfg, std::ostream& log) {
  generate_files(cfg, false, log);
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  SolveContext ctx = load_for_solve(cfg, log);
  bool all_feasible = true;
  for (double delta : cfg.deltas) all_feasible &= solve_delta(cfg, ctx, delta, log);
  return all_feasible ? kOk : kInfeasible;
}

int cmd_validate(const RunConfig& cfg, const fs::path& policy_path, std::ostream& log) {
  const ojson policy = require_json(policy_path);
  const ControlLibrary lib = load_library(OutputPaths{cfg.out_dir}.library());
  validate_policy(cfg, policy, lib, log);
  return kOk;
}

int cmd_experiment(const RunConfig& cfg, std::ostream& log) {
  const OutputPaths paths{cfg.out_dir};
  generate_files(cfg, true, log);

  std::optional<SolveContext> ctx;
  std::optional<ControlLibrary> library;
  ojson rows = ojson::array();
  std::string csv = csv_preamble(cfg) +
      "delta,status,objective,support_size,success_rate,standard_error,wilson_low,wilson_high\n";
  bool all_feasible = true;

  for (double delta : cfg.deltas) {
    std::optional<ojson> policy = read_json(paths.policy(delta));
    if (json_matches(policy, cfg)) {
      log << "[solve] delta=" << delta_label(delta) << ": cached, skipped\n";
    } else {
      if (!ctx) ctx = load_for_solve(cfg, log);
      solve_delta(cfg, *ctx, delta, log);
      policy = require_json(paths.policy(delta));
    }
    const bool optimal = policy->value("status", "") == "optimal";
    all_feasible &= optimal;

    ojson row;
    row["delta"] = delta;
    row["status"] = policy->value("status", "");
    row["objective"] = policy->at("objective");
    row["support_size"] = policy->at("weights").size();
    std::string line = delta_label(delta) + "," + row["status"].get<std::string>() + ",";
    if (optimal) {
      std::optional<ojson> report = read_json(paths.report(delta));
      if (json_matches(report, cfg) && report->value("trials", std::size_t{0}) == cfg.trials) {
        log << "[validate] delta=" << delta_label(delta) << ": cached, skipped\n";
      } else {
        if (!library) library = load_library(paths.library());
        validate_policy(cfg, *policy, *library, log);
        report = require_json(paths.report(delta));
      }
      row["success_rate"] = report->at("success_rate");
      row["standard_error"] = report->at("standard_error");
      row["wilson_95"] = report->at("wilson_95");
      line += row["objective"].dump() + "," + row["support_size"].dump() + "," +
              row["success_rate"].dump() + "," + row["standard_error"].dump() + "," +
              row["wilson_95"][0].dump() + "," + row["wilson_95"][1].dump();
    } else {
      row["success_rate"] = nullptr;
      line += ",0,,,,";
    }
    rows.push_back(row);
    csv += line + "\n";
  }

  ojson summary;
  summary["config_digest"] = cfg.digest;
  summary["master_seed"] = cfg.seed;
  summary["rows"] = rows;
  write_text(paths.summary_json(), summary.dump(2) + "\n");
  write_text(paths.summary_csv(), csv);
  log << "[experiment] summary -> " << paths.summary_csv().string() << "\n";
  return all_feasible ? kOk : kInfeasible;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const LoadError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const WriteError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "io error: malformed file: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace ccembed::cli
