// optdp: solve, evaluate, simulate and structure-check discounted models.
//
//   optdp solve --zoo inventory --param n_state=100
//   optdp oracle --model two_state.json --format structured --out result.json
//
// Exit codes: 0 success, 1 usage error, 2 validation failure,
// 3 non-convergence, 4 verifier-detected structure violation.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "optdp/cli.hpp"

int main(int argc, char** argv) {
  using namespace optdp::cli;

  CLI::App app{"Discounted dynamic programming solver and structure checker"};
  app.set_version_flag("--version", "optdp 1.0");

  std::string command;
  std::string model_path, zoo_name, format = "table", out_path, policy;
  std::vector<std::string> params;
  RunConfig cfg;
  std::size_t horizon = 0;

  app.add_option("command", command,
                 "solve | evaluate | rollout | check | oracle | zoo")
      ->required()
      ->check(CLI::IsMember({"solve", "evaluate", "rollout", "check", "oracle", "zoo"}));
  app.add_option("--model", model_path, "model file (JSON document)");
  app.add_option("--zoo", zoo_name, "registered model name (see `optdp zoo`)");
  app.add_option("--param", params, "zoo parameter k=v (repeatable)");
  app.add_option("--tol", cfg.tol, "solver tolerance in sup-norm")->capture_default_str();
  app.add_option("--max-iters", cfg.max_iterations, "value-iteration sweep limit")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for rollout and structure trials")
      ->capture_default_str();
  app.add_option("--horizon", horizon, "rollout or oracle horizon (default: from --tol)");
  app.add_option("--trajectories", cfg.trajectories, "rollout trajectories")
      ->capture_default_str();
  app.add_option("--trials", cfg.trials, "structure-check trials")->capture_default_str();
  app.add_option("--policy", policy, "comma-separated actions for evaluate/rollout");
  app.add_option("--state", cfg.initial_state, "rollout initial state")->capture_default_str();
  app.add_option("--format", format, "table | structured")
      ->check(CLI::IsMember({"table", "structured"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write results to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    cfg.command = *parse_command(command);
    if (!model_path.empty()) cfg.model_path = model_path;
    if (!zoo_name.empty()) cfg.zoo_name = zoo_name;
    for (const auto& p : params) add_param(cfg.params, p);
    if (horizon > 0) cfg.horizon = horizon;
    if (!policy.empty()) cfg.policy = parse_policy(policy);
    cfg.format = format == "structured" ? OutputFormat::structured : OutputFormat::table;
    if (!out_path.empty()) cfg.out_path = out_path;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  return run(cfg, std::cout, std::cerr);
}
