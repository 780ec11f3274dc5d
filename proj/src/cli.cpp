#include "optdp/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "optdp/bellman.hpp"
#include "optdp/model_io.hpp"
#include "optdp/rollout.hpp"
#include "optdp/solver.hpp"
#include "optdp/structure.hpp"

namespace optdp::cli {

using Json = nlohmann::ordered_json;

std::optional<Command> parse_command(const std::string& name) {
  if (name == "solve") return Command::solve;
  if (name == "evaluate") return Command::evaluate;
  if (name == "rollout") return Command::rollout;
  if (name == "check") return Command::check;
  if (name == "oracle") return Command::oracle;
  if (name == "zoo") return Command::zoo;
  return std::nullopt;
}

void add_param(ParamMap& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--param expects k=v, got '" + assignment + "'");
  params[assignment.substr(0, eq)] = assignment.substr(eq + 1);
}

std::vector<ActionIndex> parse_policy(const std::string& text) {
  std::vector<ActionIndex> actions;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (!item.empty() && item.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw std::invalid_argument("policy entry '" + item + "' is not an action index");
    actions.push_back(static_cast<ActionIndex>(v));
  }
  if (actions.empty()) throw std::invalid_argument("policy is empty");
  return actions;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StructureViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  std::string source;
  GridModel grid;
  ClassTag tag = ClassTag::finite;
  bool counterexample = false;
};

LoadedModel load(const RunConfig& cfg) {
  if (cfg.model_path.has_value() == cfg.zoo_name.has_value())
    throw UsageError("exactly one of --model or --zoo is required");
  LoadedModel m;
  if (cfg.model_path) {
    if (!cfg.params.empty()) throw UsageError("--param applies only to --zoo models");
    m.source = "file:" + *cfg.model_path;
    try {
      m.grid = index_grid(read_model_file(*cfg.model_path));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
    return m;
  }
  m.source = "zoo:" + *cfg.zoo_name;
  try {
    NamedModel named = build(*cfg.zoo_name, cfg.params);
    m.tag = named.claimed_class.tag;
    m.counterexample = named.counterexample;
    m.grid = to_grid(named);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return m;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Json model_header(const LoadedModel& m) {
  Json j;
  j["source"] = m.source;
  j["n_states"] = m.grid.mdp.n_states();
  j["n_actions"] = m.grid.mdp.n_actions();
  j["beta"] = m.grid.mdp.beta();
  return j;
}

void table_header(std::ostream& os, const LoadedModel& m) {
  os << "model " << m.source << ": " << m.grid.mdp.n_states() << " states, "
     << m.grid.mdp.n_actions() << " actions, beta = " << m.grid.mdp.beta() << "\n";
}

constexpr std::size_t kPageRows = 50;

StationaryPolicy policy_for(const RunConfig& cfg, const FiniteMdp& mdp, SolveResult& solved,
                            bool& from_solve) {
  from_solve = !cfg.policy.has_value();
  if (!cfg.policy) {
    solved = solve(mdp, cfg.tol, cfg.max_iterations);
    return solved.policy;
  }
  StationaryPolicy p(*cfg.policy);
  try {
    require_feasible(mdp, p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

void do_solve(const RunConfig& cfg, const LoadedModel& m, std::ostream& os) {
  const FiniteMdp& mdp = m.grid.mdp;
  const SolveResult r = solve(mdp, cfg.tol, cfg.max_iterations);
  const ValueFunction tv = apply_T(mdp, r.value);
  std::vector<double> residuals(mdp.n_states());
  for (StateIndex s = 0; s < mdp.n_states(); ++s) residuals[s] = std::abs(tv[s] - r.value[s]);

  if (cfg.format == OutputFormat::structured) {
    Json j;
    j["command"] = "solve";
    j["model"] = model_header(m);
    j["tol"] = cfg.tol;
    j["states"] = m.grid.state_grid;
    j["value"] = r.value.vec();
    j["policy"] = r.policy.vec();
    j["bellman_residual_per_state"] = residuals;
    Json rep;
    rep["iterations"] = r.trace.iterations;
    rep["residuals"] = r.trace.residuals;
    rep["a_priori_bound"] = r.trace.a_priori_bound;
    rep["a_posteriori_bound"] = r.trace.a_posteriori_bound;
    rep["bellman_residual"] = r.bellman_residual;
    rep["epsilon_certificate"] = r.epsilon_certificate;
    j["report"] = rep;
    os << j.dump(2) << "\n";
    return;
  }
  table_header(os, m);
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (s % kPageRows == 0)
      os << "\n   state            x                 value  action      residual\n";
    char line[160];
    std::snprintf(line, sizeof line, "%8zu %12.6g %21.12g %7zu %13.3e\n", s,
                  m.grid.state_grid[s], r.value[s], r.policy[s], residuals[s]);
    os << line;
  }
  os << "\nconvergence report\n"
     << "  iterations           " << r.trace.iterations << "\n"
     << "  final residual       " << fmt("%.3e", r.trace.residuals.back()) << "\n"
     << "  a posteriori bound   " << fmt("%.3e", r.trace.a_posteriori_bound) << "\n"
     << "  a priori bound       " << fmt("%.3e", r.trace.a_priori_bound) << "\n"
     << "  bellman residual     " << fmt("%.3e", r.bellman_residual) << "\n"
     << "  certified eps gap    " << fmt("%.3e", r.epsilon_certificate) << "\n"
     << "residual trace (iteration: residual)\n";
  const auto& res = r.trace.residuals;
  for (std::size_t k = 1; k <= res.size(); k = k * 2)
    os << "  " << k << ": " << fmt("%.6e", res[k - 1]) << "\n";
  if ((res.size() & (res.size() - 1)) != 0)
    os << "  " << res.size() << ": " << fmt("%.6e", res.back()) << "\n";
}

void do_evaluate(const RunConfig& cfg, const LoadedModel& m, std::ostream& os) {
  const FiniteMdp& mdp = m.grid.mdp;
  SolveResult solved;
  bool from_solve = false;
  const StationaryPolicy policy = policy_for(cfg, mdp, solved, from_solve);
  const ValueFunction w = evaluate_policy_exact(mdp, policy);
  if (cfg.format == OutputFormat::structured) {
    Json j;
    j["command"] = "evaluate";
    j["model"] = model_header(m);
    j["policy_source"] = from_solve ? "greedy" : "given";
    j["policy"] = policy.vec();
    j["value"] = w.vec();
    os << j.dump(2) << "\n";
    return;
  }
  table_header(os, m);
  os << "exact value of the " << (from_solve ? "greedy" : "given") << " policy\n";
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (s % kPageRows == 0) os << "\n   state  action                 value\n";
    char line[128];
    std::snprintf(line, sizeof line, "%8zu %7zu %21.12g\n", s, policy[s], w[s]);
    os << line;
  }
}

void do_rollout(const RunConfig& cfg, const LoadedModel& m, std::ostream& os) {
  const FiniteMdp& mdp = m.grid.mdp;
  SolveResult solved;
  bool from_solve = false;
  const StationaryPolicy policy = policy_for(cfg, mdp, solved, from_solve);
  if (cfg.initial_state >= mdp.n_states()) throw UsageError("--state out of range");
  RolloutConfig rc;
  rc.n_trajectories = cfg.trajectories;
  rc.seed = cfg.seed;
  rc.initial_state = cfg.initial_state;
  rc.horizon = cfg.horizon ? *cfg.horizon : rollout_horizon(mdp, cfg.tol);
  if (rc.horizon == 0 || rc.n_trajectories == 0)
    throw UsageError("--horizon and --trajectories must be positive");
  const RolloutEstimate est = simulate_policy(mdp, policy, rc);
  const double exact = evaluate_policy_exact(mdp, policy)[cfg.initial_state];
  if (cfg.format == OutputFormat::structured) {
    Json j;
    j["command"] = "rollout";
    j["model"] = model_header(m);
    j["policy_source"] = from_solve ? "greedy" : "given";
    j["policy"] = policy.vec();
    j["initial_state"] = rc.initial_state;
    j["horizon"] = rc.horizon;
    j["trajectories"] = rc.n_trajectories;
    j["seed"] = rc.seed;
    j["mean"] = est.mean;
    j["standard_error"] = est.standard_error;
    j["truncation_bias_bound"] = est.truncation_bias_bound;
    j["exact_value"] = exact;
    os << j.dump(2) << "\n";
    return;
  }
  table_header(os, m);
  os << "rollout of the " << (from_solve ? "greedy" : "given") << " policy from state "
     << rc.initial_state << " (" << rc.n_trajectories << " trajectories, horizon "
     << rc.horizon << ", seed " << rc.seed << ")\n"
     << "  mean                 " << fmt("%.12g", est.mean) << "\n"
     << "  standard error       " << fmt("%.3e", est.standard_error) << "\n"
     << "  truncation bias <=   " << fmt("%.3e", est.truncation_bias_bound) << "\n"
     << "  exact value          " << fmt("%.12g", exact) << "\n";
}

void do_check(const RunConfig& cfg, const LoadedModel& m, std::ostream& os) {
  const auto reports = verify_class(m.grid, m.tag, cfg.trials, cfg.seed);
  bool all_ok = true;
  for (const auto& r : reports) all_ok = all_ok && r.ok();
  if (cfg.format == OutputFormat::structured) {
    Json j;
    j["command"] = "check";
    j["model"] = model_header(m);
    j["class"] = std::string(to_string(m.tag));
    j["counterexample"] = m.counterexample;
    j["seed"] = cfg.seed;
    Json list = Json::array();
    for (const auto& r : reports) {
      Json e;
      e["check"] = r.check;
      e["trials"] = r.trials;
      e["passed"] = r.passed;
      e["worst_violation"] = r.worst_violation;
      e["witness_state"] = r.witness_state ? Json(*r.witness_state) : Json(nullptr);
      e["witness"] = r.witness ? Json(r.witness->vec()) : Json(nullptr);
      e["detail"] = r.detail;
      list.push_back(e);
    }
    j["reports"] = list;
    j["passed"] = all_ok;
    os << j.dump(2) << "\n";
  } else {
    table_header(os, m);
    os << "claimed class: " << to_string(m.tag)
       << (m.counterexample ? " (shipped counterexample)" : "") << "\n";
    if (reports.empty())
      os << "  no numeric verifier exists for this class; nothing checked\n";
    for (const auto& r : reports) {
      os << "  " << (r.ok() ? "PASS " : "FAIL ") << r.check << ": " << r.detail;
      if (!r.ok()) os << " (violation " << fmt("%.3e", r.worst_violation) << ")";
      os << "\n";
    }
  }
  if (!all_ok) throw StructureViolation("structure verifier reported a violation");
}

void do_oracle(const RunConfig& cfg, const LoadedModel& m, std::ostream& os) {
  const FiniteMdp& mdp = m.grid.mdp;
  if (mdp.n_states() * mdp.n_actions() > kOracleMaxPairs)
    throw UsageError("oracle requires n_states * n_actions <= " +
                     std::to_string(kOracleMaxPairs));
  const std::size_t horizon =
      cfg.horizon ? *cfg.horizon : horizon_for_truncation(mdp, cfg.tol / 10.0);
  if (horizon == 0) throw UsageError("--horizon must be positive");
  const SolveResult r = solve(mdp, cfg.tol, cfg.max_iterations);
  const ValueFunction oracle = brute_force_oracle(mdp, horizon);
  const double trunc = truncation_bound(mdp, horizon);
  const double bound = cfg.tol + trunc;
  const double diff = sup_norm_distance(r.value, oracle);
  const bool agree = diff <= bound;
  if (cfg.format == OutputFormat::structured) {
    Json j;
    j["command"] = "oracle";
    j["model"] = model_header(m);
    j["tol"] = cfg.tol;
    j["horizon"] = horizon;
    j["truncation_bound"] = trunc;
    j["solve"] = r.value.vec();
    j["oracle"] = oracle.vec();
    j["max_difference"] = diff;
    j["bound"] = bound;
    j["agree"] = agree;
    os << j.dump(2) << "\n";
  } else {
    table_header(os, m);
    os << "backward induction horizon " << horizon << ", truncation bound "
       << fmt("%.3e", trunc) << ", agreement bound tol + truncation = "
       << fmt("%.3e", bound) << "\n";
    for (StateIndex s = 0; s < mdp.n_states(); ++s) {
      if (s % kPageRows == 0)
        os << "\n   state                 solve                oracle    |difference|\n";
      char line[160];
      std::snprintf(line, sizeof line, "%8zu %21.12g %21.12g %15.3e\n", s, r.value[s],
                    oracle[s], std::abs(r.value[s] - oracle[s]));
      os << line;
    }
    os << "\nmax difference " << fmt("%.3e", diff) << (agree ? " <= " : " > ")
       << fmt("%.3e", bound) << (agree ? " (agree)" : " (DISAGREE)") << "\n";
  }
  if (!agree) throw StructureViolation("solve and oracle disagree beyond the bound");
}

int dispatch(const RunConfig& cfg, std::ostream& os) {
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
  if (cfg.max_iterations == 0) throw UsageError("--max-iters must be positive");
  if (cfg.command == Command::zoo) {
    os << registry_json();
    return exit_code::ok;
  }
  const LoadedModel m = load(cfg);
  switch (cfg.command) {
    case Command::solve: do_solve(cfg, m, os); break;
    case Command::evaluate: do_evaluate(cfg, m, os); break;
    case Command::rollout: do_rollout(cfg, m, os); break;
    case Command::check: do_check(cfg, m, os); break;
    case Command::oracle: do_oracle(cfg, m, os); break;
    case Command::zoo: break;
  }
  return exit_code::ok;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostringstream buffer;
  int status = exit_code::ok;
  try {
    status = dispatch(config, buffer);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const ValidationError& e) {
    err << "validation failed:\n";
    for (const auto& line : e.report()) err << "  " << line << "\n";
    return exit_code::validation;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::non_convergence;
  } catch (const StructureViolation& e) {
    err << "error: " << e.what() << "\n";
    status = exit_code::structure_violation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  if (config.out_path) {
    file.open(*config.out_path);
    if (!file) {
      err << "error: cannot write " << *config.out_path << "\n";
      return exit_code::usage;
    }
    file << buffer.str();
  } else {
    out << buffer.str();
  }
  return status;
}

}  // namespace optdp::cli
