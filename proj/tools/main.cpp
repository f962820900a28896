#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ccembed/errors.hpp"
#include "run_config.hpp"

namespace {

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ccembed::ConfigError("--x0: cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ccembed::ConfigError("--x0 is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ccembed::cli;

  CLI::App app{"Chance-constrained control from kernel embeddings of trajectory data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::string x0_text;
  std::string policy_path;

  auto add_common = [&](CLI::App* sub, bool with_solve_flags) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Master seed (overrides seed)");
    if (with_solve_flags) {
      sub->add_option("--delta", delta, "Single risk level replacing the configured list");
      sub->add_option("--x0", x0_text, "Initial state as comma-separated values");
    }
  };

  CLI::App* gen = app.add_subcommand("generate", "Generate the dataset and control library");
  add_common(gen, false);
  CLI::App* solve = app.add_subcommand("solve", "Fit the embedding and solve for each delta");
  add_common(solve, true);
  CLI::App* validate = app.add_subcommand("validate", "Monte-Carlo validation of a policy");
  add_common(validate, false);
  validate->add_option("--policy", policy_path, "Policy file written by solve")->required();
  CLI::App* exp = app.add_subcommand("experiment", "generate, solve and validate every delta");
  add_common(exp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  CLI::App* active = app.get_subcommands().front();
  return guarded(
      [&]() -> int {
        Overrides ov;
        if (active->count("--seed")) ov.seed = seed;
        if (active->count("--out-dir")) ov.out_dir = out_dir;
        if (active->get_option_no_throw("--delta") && active->count("--delta")) ov.delta = delta;
        if (active->get_option_no_throw("--x0") && active->count("--x0")) {
          ov.x0 = parse_vector(x0_text);
        }
        const RunConfig cfg = load_run_config(config_path, ov);
        if (active == gen) return cmd_generate(cfg, std::cout);
        if (active == solve) return cmd_solve(cfg, std::cout);
        if (active == validate) return cmd_validate(cfg, policy_path, std::cout);
        return cmd_experiment(cfg, std::cout);
      },
      std::cerr);
}
