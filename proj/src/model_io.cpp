#include "optdp/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace optdp {

using nlohmann::json;

ParseError::ParseError(const std::string& message, std::size_t line,
                       std::size_t column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line), column_(column) {}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end())
    throw ParseError(std::string("missing field \"") + name + "\"", 0, 0);
  return *it;
}

std::size_t as_index(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ParseError(what + " must be a nonnegative integer", 0, 0);
  return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number", 0, 0);
  return v.get<double>();
}

const json& as_array(const json& v, const std::string& what, std::size_t arity = 0) {
  if (!v.is_array()) throw ParseError(what + " must be an array", 0, 0);
  if (arity != 0 && v.size() != arity)
    throw ParseError(what + " must have " + std::to_string(arity) + " entries", 0, 0);
  return v;
}

}  // namespace

FiniteMdp parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    // strip the library's "[json.exception.parse_error.101] " prefix
    if (auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ParseError(msg, line, column);
  }
  if (!doc.is_object()) throw ParseError("model document must be a JSON object", 1, 1);

  const std::size_t n_states = as_index(field(doc, "n_states"), "n_states");
  const std::size_t n_actions = as_index(field(doc, "n_actions"), "n_actions");
  const double beta = as_real(field(doc, "beta"), "beta");

  ValidationReport report;
  const json& feasible = as_array(field(doc, "feasible"), "feasible");
  if (feasible.size() != n_states)
    report.push_back("feasible lists " + std::to_string(feasible.size()) +
                     " states, expected n_states = " + std::to_string(n_states));

  // (s, a) -> choice slot
  std::map<std::pair<std::size_t, std::size_t>, Choice> pairs;
  std::map<std::pair<std::size_t, std::size_t>, bool> has_reward;
  std::vector<std::vector<ActionIndex>> order(n_states);
  for (std::size_t s = 0; s < feasible.size() && s < n_states; ++s) {
    const std::string where = "feasible[" + std::to_string(s) + "]";
    for (const json& a : as_array(feasible[s], where)) {
      const std::size_t action = as_index(a, where + " entry");
      if (pairs.count({s, action})) {
        report.push_back("state " + std::to_string(s) + ": action " +
                         std::to_string(action) + " listed twice in feasible set");
        continue;
      }
      pairs[{s, action}] = Choice{action, 0.0, {}};
      order[s].push_back(action);
    }
  }

  const json& rewards = as_array(field(doc, "reward"), "reward");
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const std::string where = "reward[" + std::to_string(i) + "]";
    const json& entry = as_array(rewards[i], where, 3);
    const std::size_t s = as_index(entry[0], where + " state");
    const std::size_t a = as_index(entry[1], where + " action");
    const double r = as_real(entry[2], where + " value");
    auto it = pairs.find({s, a});
    if (it == pairs.end()) {
      report.push_back(where + ": reward given for infeasible pair (s=" +
                       std::to_string(s) + ", a=" + std::to_string(a) + ")");
      continue;
    }
    if (has_reward[{s, a}])
      report.push_back(where + ": duplicate reward for (s=" + std::to_string(s) +
                       ", a=" + std::to_string(a) + ")");
    has_reward[{s, a}] = true;
    it->second.reward = r;
  }

  const json& transitions = as_array(field(doc, "transition"), "transition");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string where = "transition[" + std::to_string(i) + "]";
    const json& entry = as_array(transitions[i], where, 4);
    const std::size_t s = as_index(entry[0], where + " state");
    const std::size_t a = as_index(entry[1], where + " action");
    const std::size_t next = as_index(entry[2], where + " next state");
    const double p = as_real(entry[3], where + " probability");
    auto it = pairs.find({s, a});
    if (it == pairs.end()) {
      report.push_back(where + ": transition given for infeasible pair (s=" +
                       std::to_string(s) + ", a=" + std::to_string(a) + ")");
      continue;
    }
    it->second.outcomes.push_back({next, p});
  }

  std::vector<std::vector<Choice>> choices(n_states);
  for (std::size_t s = 0; s < n_states; ++s) {
    for (ActionIndex a : order[s]) {
      if (!has_reward[{s, a}])
        report.push_back("(s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                         "): feasible pair has no reward");
      choices[s].push_back(std::move(pairs[{s, a}]));
    }
  }
  if (!report.empty()) throw ValidationError(std::move(report));
  return make_validated(FiniteMdp(n_states, n_actions, beta, std::move(choices)));
}

std::string serialize_model(const FiniteMdp& model) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"n_states\": " << model.n_states() << ",\n";
  os << "  \"n_actions\": " << model.n_actions() << ",\n";
  os << "  \"beta\": " << format_real(model.beta()) << ",\n";
  os << "  \"feasible\": [";
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    os << (s ? ", [" : "[");
    bool first = true;
    for (const Choice& c : model.choices(s)) {
      os << (first ? "" : ", ") << c.action;
      first = false;
    }
    os << "]";
  }
  os << "],\n";

  os << "  \"reward\": [";
  bool first = true;
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    for (const Choice& c : model.choices(s)) {
      os << (first ? "\n    " : ",\n    ") << "[" << s << ", " << c.action << ", "
         << format_real(c.reward) << "]";
      first = false;
    }
  }
  os << "\n  ],\n";

  os << "  \"transition\": [";
  first = true;
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    for (const Choice& c : model.choices(s)) {
      for (const Transition& t : c.outcomes) {
        os << (first ? "\n    " : ",\n    ") << "[" << s << ", " << c.action << ", "
           << t.next << ", " << format_real(t.prob) << "]";
        first = false;
      }
    }
  }
  os << "\n  ]\n}\n";
  return os.str();
}

FiniteMdp read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace optdp
