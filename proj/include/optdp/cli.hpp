#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optdp/fixed_point.hpp"
#include "optdp/mdp.hpp"
#include "optdp/model_zoo.hpp"

namespace optdp::cli {

enum class Command { solve, evaluate, rollout, check, oracle, zoo };
enum class OutputFormat { table, structured };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int validation = 2;
inline constexpr int non_convergence = 3;
inline constexpr int structure_violation = 4;
}  // namespace exit_code

struct RunConfig {
  Command command = Command::solve;
  std::optional<std::string> model_path;
  std::optional<std::string> zoo_name;
  ParamMap params;
  double tol = 1e-8;
  /// Cap on value-iteration sweeps; exceeding it exits with non_convergence.
  std::size_t max_iterations = kDefaultMaxIterations;
  std::uint64_t seed = 0;
  std::optional<std::size_t> horizon;
  std::size_t trajectories = 10000;
  std::size_t trials = 100;
  /// Policy for evaluate/rollout; the greedy policy of `solve` when absent.
  std::optional<std::vector<ActionIndex>> policy;
  StateIndex initial_state = 0;
  OutputFormat format = OutputFormat::table;
  std::optional<std::string> out_path;
};

std::optional<Command> parse_command(const std::string& name);

/// Splits "k=v" into a ParamMap entry; throws std::invalid_argument otherwise.
void add_param(ParamMap& params, const std::string& assignment);

/// Parses "0,1,1" into action indices.
std::vector<ActionIndex> parse_policy(const std::string& text);

/// Executes one command. Results go to `out` (or to config.out_path when set);
/// diagnostics go to `err`. Returns one of the exit_code values.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace optdp::cli
