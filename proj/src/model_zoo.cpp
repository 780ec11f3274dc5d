#include "optdp/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "json.hpp"

namespace optdp {

namespace {

const std::vector<ModelInfo>& registry() {
  static const std::vector<ModelInfo> models = {
      {"machine_replacement",
       ClassTag::finite,
       false,
       "Machine condition 0 (new) .. n_states-1. Action 0 keeps the machine and "
       "earns revenue - wear_cost * condition; action 1 replaces it for "
       "replace_cost. Condition worsens by one level with probability wear_prob.",
      {{"n_states", "4", 2, 50, {}, "number of condition levels"},
        {"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"wear_prob", "0.6", 0, 1, {}, "probability of wearing one level per period"},
        {"revenue", "1", -10, 10, {}, "per-period revenue"},
        {"wear_cost", "0.3", 0, 10, {}, "operating cost per condition level"},
        {"replace_cost", "1.5", 0, 100, {}, "replacement cost"}}},
      {"queueing",
       ClassTag::countable_compact,
       false,
       "Single-server queue truncated at `buffer` customers. Action 0 serves at "
       "slow_rate, action 1 at fast_rate for fast_cost. One arrival with "
       "probability arrival_prob per period (blocked when full); holding cost "
       "per waiting customer.",
      {{"buffer", "10", 1, 60, {}, "maximum queue length"},
        {"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"arrival_prob", "0.4", 0, 1, {}, "arrival probability per period"},
        {"slow_rate", "0.3", 0, 1, {}, "service probability, slow"},
        {"fast_rate", "0.6", 0, 1, {}, "service probability, fast"},
        {"holding_cost", "1", 0, 100, {}, "cost per customer per period"},
        {"fast_cost", "0.8", 0, 100, {}, "extra cost of fast service"}}},
      {"inventory",
       ClassTag::monotone,
       false,
       "Stock s in [0, capacity]; action y is an order-up-to level (no order "
       "when y <= s). Earns price * E min(max(s,y), D) - order_cost * (max(s,y) - "
       "s) with Poisson demand truncated at capacity and renormalized; unmet "
       "demand is lost.",
      {{"capacity", "20", 2, 200, {}, "storage capacity"},
        {"beta", "0.95", 0.01, 0.999, {}, "discount factor"},
        {"demand_mean", "3", 0.1, 50, {}, "Poisson demand mean"},
        {"price", "2", 0, 100, {}, "unit sale price"},
        {"order_cost", "1", 0, 100, {}, "unit purchase cost"},
        {"n_state", "50", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
      {"consumption_savings",
       ClassTag::continuous_concave,
       false,
       "Wealth w in [0, wealth_max]; action k in [0, w] is saved and w - k "
       "consumed with utility u. Next wealth is gross_return * k + income with "
       "income uniform over income_points values in [income_low, income_high].",
      {{"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"gross_return", "0.85", 0, 2, {}, "return on savings"},
        {"income_low", "0.5", 0, 100, {}, "lowest income"},
        {"income_high", "1.5", 0, 100, {}, "highest income"},
        {"income_points", "3", 1, 25, {}, "number of equally likely income values"},
        {"wealth_max", "10", 0.1, 1000, {}, "upper end of the wealth interval"},
        {"utility", "sqrt", 0, 0, {"sqrt", "log1p"}, "period utility of consumption"},
        {"n_state", "200", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
      {"dynamic_pricing",
       ClassTag::continuous,
       false,
       "Demand level s in [0,1]; price a in [price_min, price_max] sells "
       "(0.5 + s) exp(-elasticity (a - price_min)). Demand drifts toward "
       "(price_max - a)/(price_max - price_min) with weight 1 - persistence "
       "plus a three-point shock of size +-shock.",
      {{"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"persistence", "0.7", 0, 1, {}, "weight on current demand level"},
        {"elasticity", "1", 0, 10, {}, "price sensitivity"},
        {"shock", "0.1", 0, 1, {}, "shock magnitude"},
        {"price_min", "0.5", 0, 100, {}, "lowest price"},
        {"price_max", "2", 0, 100, {}, "highest price"},
        {"n_state", "50", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
      {"adversarial_monotone",
       ClassTag::monotone,
       true,
       "Counterexample: reward -s + 0.5 a decreases in the state, so T maps "
       "increasing functions to decreasing ones.",
      {{"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"n_state", "21", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
      {"adversarial_selection",
       ClassTag::monotone,
       true,
       "Counterexample: submodular reward -(a + s - 1)^2 with a frozen state; the "
       "unique maximizer a = 1 - s decreases in s.",
      {{"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"n_state", "21", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
      {"adversarial_concave",
       ClassTag::continuous_concave,
       true,
       "Counterexample: consumption_savings with a convex kink "
       "kink * |w - wealth_max / 2| added to the reward.",
      {{"beta", "0.9", 0.01, 0.999, {}, "discount factor"},
        {"kink", "0.5", 0, 100, {}, "size of the convex kink"},
        {"n_state", "101", 2, 2000, {}, "state grid points"},
        {"n_action", "0", 0, 2000, {}, "action grid points (0: same as n_state)"}}},
  };
  return models;
}

const ModelInfo& lookup(const std::string& name) {
  for (const ModelInfo& m : registry())
    if (m.name == name) return m;
  std::string known;
  for (const ModelInfo& m : registry()) known += (known.empty() ? "" : ", ") + m.name;
  throw std::invalid_argument("unknown model '" + name + "'; known models: " + known);
}

// Resolved parameter values for one build call.
class Params {
 public:
  Params(const ModelInfo& info, const ParamMap& given) : info_(info), given_(given) {
    for (const auto& [key, value] : given) {
      auto it = std::find_if(info.params.begin(), info.params.end(),
                             [&](const ParamInfo& p) { return p.name == key; });
      if (it == info.params.end()) {
        std::string valid;
        for (const ParamInfo& p : info.params) valid += (valid.empty() ? "" : ", ") + p.name;
        throw std::invalid_argument("model '" + info.name + "' has no parameter '" + key +
                                    "'; valid parameters: " + valid);
      }
    }
  }

  double real(const std::string& key) const {
    const ParamInfo& p = info(key);
    const std::string text = raw(p);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v))
      throw std::invalid_argument("parameter " + key + " = '" + text + "' is not a number");
    if (v < p.lo || v > p.hi)
      throw std::invalid_argument("parameter " + key + " = " + text + " outside [" +
                                  std::to_string(p.lo) + ", " + std::to_string(p.hi) + "]");
    return v;
  }

  std::size_t count(const std::string& key) const {
    const double v = real(key);
    if (v != std::floor(v))
      throw std::invalid_argument("parameter " + key + " must be an integer");
    return static_cast<std::size_t>(v);
  }

  std::string choice(const std::string& key) const {
    const ParamInfo& p = info(key);
    const std::string text = raw(p);
    if (std::find(p.choices.begin(), p.choices.end(), text) == p.choices.end()) {
      std::string valid;
      for (const auto& c : p.choices) valid += (valid.empty() ? "" : ", ") + c;
      throw std::invalid_argument("parameter " + key + " = '" + text +
                                  "' is not one of: " + valid);
    }
    return text;
  }

 private:
  const ParamInfo& info(const std::string& key) const {
    for (const ParamInfo& p : info_.params)
      if (p.name == key) return p;
    throw std::logic_error("parameter " + key + " is not registered for " + info_.name);
  }
  std::string raw(const ParamInfo& p) const {
    auto it = given_.find(p.name);
    return it == given_.end() ? p.default_value : it->second;
  }

  const ModelInfo& info_;
  const ParamMap& given_;
};

void set_grid(NamedModel& out, const Params& p) {
  out.n_state = p.count("n_state");
  const std::size_t n_action = p.count("n_action");
  if (n_action == 1) throw std::invalid_argument("n_action must be 0 or >= 2");
  out.n_action = n_action == 0 ? out.n_state : n_action;
}

// Two-way split of a probability over next states, merged when they coincide.
std::vector<Transition> merge(std::vector<Transition> row) {
  std::sort(row.begin(), row.end(),
            [](const Transition& a, const Transition& b) { return a.next < b.next; });
  std::vector<Transition> out;
  for (const Transition& t : row) {
    if (t.prob == 0.0) continue;
    if (!out.empty() && out.back().next == t.next)
      out.back().prob += t.prob;
    else
      out.push_back(t);
  }
  return out;
}

FiniteMdp machine_replacement(const Params& p) {
  const std::size_t n = p.count("n_states");
  const double wear = p.real("wear_prob");
  const double revenue = p.real("revenue");
  const double wear_cost = p.real("wear_cost");
  const double replace_cost = p.real("replace_cost");
  std::vector<std::vector<Choice>> choices(n);
  for (StateIndex s = 0; s < n; ++s) {
    choices[s].push_back({0, revenue - wear_cost * static_cast<double>(s),
                          merge({{std::min(s + 1, n - 1), wear}, {s, 1.0 - wear}})});
    choices[s].push_back({1, revenue - replace_cost, merge({{1, wear}, {0, 1.0 - wear}})});
  }
  return make_validated(FiniteMdp(n, 2, p.real("beta"), std::move(choices)));
}

FiniteMdp queueing(const Params& p) {
  const std::size_t buffer = p.count("buffer");
  const double arrival = p.real("arrival_prob");
  const double rates[2] = {p.real("slow_rate"), p.real("fast_rate")};
  const double holding = p.real("holding_cost");
  const double fast_cost = p.real("fast_cost");
  const std::size_t n = buffer + 1;
  std::vector<std::vector<Choice>> choices(n);
  for (StateIndex s = 0; s < n; ++s) {
    for (ActionIndex a = 0; a < 2; ++a) {
      const double arrive = s < buffer ? arrival : 0.0;
      const double serve = s > 0 ? rates[a] : 0.0;
      std::vector<Transition> row;
      for (int in = 0; in < 2; ++in) {
        for (int out = 0; out < 2; ++out) {
          const double prob = (in ? arrive : 1.0 - arrive) * (out ? serve : 1.0 - serve);
          if (prob == 0.0) continue;
          const auto next = static_cast<StateIndex>(static_cast<long>(s) + in - out);
          row.push_back({std::min(next, buffer), prob});
        }
      }
      const double reward =
          -holding * static_cast<double>(s) - (a == 1 ? fast_cost : 0.0);
      choices[s].push_back({a, reward, merge(std::move(row))});
    }
  }
  return make_validated(FiniteMdp(n, 2, p.real("beta"), std::move(choices)));
}

std::vector<Atom> truncated_poisson(double mean, std::size_t max_value) {
  std::vector<Atom> atoms;
  double pmf = std::exp(-mean);
  double total = 0.0;
  for (std::size_t k = 0; k <= max_value; ++k) {
    atoms.push_back({static_cast<double>(k), pmf});
    total += pmf;
    pmf *= mean / static_cast<double>(k + 1);
  }
  for (Atom& a : atoms) a.prob /= total;
  return atoms;
}

ContinuousModelSpec inventory(const Params& p) {
  const double capacity = p.real("capacity");
  const double price = p.real("price");
  const double order_cost = p.real("order_cost");
  const auto demand = std::make_shared<const std::vector<Atom>>(
      truncated_poisson(p.real("demand_mean"), static_cast<std::size_t>(std::ceil(capacity))));

  ContinuousModelSpec spec;
  spec.states = {0.0, capacity};
  spec.actions = {0.0, capacity};
  spec.beta = p.real("beta");
  spec.claimed_class = ClassTag::monotone;
  spec.reward = [=](double s, double y) {
    const double stocked = std::max(s, y);
    double sales = 0.0;
    for (const Atom& d : *demand) sales += d.prob * std::min(stocked, d.point);
    return price * sales - order_cost * (stocked - s);
  };
  spec.transition = [=](double s, double y) -> NextStateLaw {
    const double stocked = std::max(s, y);
    std::vector<Atom> next;
    next.reserve(demand->size());
    for (const Atom& d : *demand) next.push_back({std::max(stocked - d.point, 0.0), d.prob});
    return next;
  };
  return spec;
}

ContinuousModelSpec consumption_savings(const Params& p, double beta) {
  const double R = p.real("gross_return");
  const double y_lo = p.real("income_low");
  const double y_hi = p.real("income_high");
  const std::size_t points = p.count("income_points");
  const double w_max = p.real("wealth_max");
  if (y_hi < y_lo) throw std::invalid_argument("income_high must be >= income_low");
  if (R * w_max + y_hi > w_max)
    throw std::invalid_argument(
        "gross_return * wealth_max + income_high must not exceed wealth_max "
        "(next wealth would leave the grid)");
  std::vector<Atom> income;
  for (std::size_t i = 0; i < points; ++i) {
    const double y = points == 1 ? 0.5 * (y_lo + y_hi)
                                 : y_lo + (y_hi - y_lo) * static_cast<double>(i) /
                                              static_cast<double>(points - 1);
    income.push_back({y, 1.0 / static_cast<double>(points)});
  }
  const bool use_sqrt = p.choice("utility") == "sqrt";

  ContinuousModelSpec spec;
  spec.states = {0.0, w_max};
  spec.actions = {0.0, w_max};
  spec.beta = beta;
  spec.claimed_class = ClassTag::continuous_concave;
  spec.concavity_allowance = 0.01;
  const double slack = 1e-12 * w_max;
  spec.feasible = [slack](double w, double k) { return k <= w + slack; };
  spec.reward = [use_sqrt](double w, double k) {
    const double c = std::max(w - k, 0.0);
    return use_sqrt ? std::sqrt(c) : std::log1p(c);
  };
  spec.transition = [R, income](double, double k) -> NextStateLaw {
    std::vector<Atom> next = income;
    for (Atom& a : next) a.point += R * k;
    return next;
  };
  return spec;
}

ContinuousModelSpec dynamic_pricing(const Params& p) {
  const double persistence = p.real("persistence");
  const double elasticity = p.real("elasticity");
  const double shock = p.real("shock");
  const double lo = p.real("price_min");
  const double hi = p.real("price_max");
  if (!(hi > lo)) throw std::invalid_argument("price_max must exceed price_min");

  ContinuousModelSpec spec;
  spec.states = {0.0, 1.0};
  spec.actions = {lo, hi};
  spec.beta = p.real("beta");
  spec.claimed_class = ClassTag::continuous;
  spec.reward = [=](double s, double a) {
    return a * (0.5 + s) * std::exp(-elasticity * (a - lo));
  };
  spec.transition = [=](double s, double a) -> NextStateLaw {
    const double center = persistence * s + (1.0 - persistence) * (hi - a) / (hi - lo);
    return std::vector<Atom>{
        {center - shock, 1.0 / 3.0}, {center, 1.0 / 3.0}, {center + shock, 1.0 / 3.0}};
  };
  return spec;
}

ContinuousModelSpec adversarial_monotone(const Params& p) {
  ContinuousModelSpec spec;
  spec.beta = p.real("beta");
  spec.claimed_class = ClassTag::monotone;
  spec.reward = [](double s, double a) { return -s + 0.5 * a; };
  spec.transition = [](double, double a) -> NextStateLaw { return std::vector<Atom>{{a, 1.0}}; };
  return spec;
}

ContinuousModelSpec adversarial_selection(const Params& p) {
  ContinuousModelSpec spec;
  spec.beta = p.real("beta");
  spec.claimed_class = ClassTag::monotone;
  spec.reward = [](double s, double a) { return -(a + s - 1.0) * (a + s - 1.0); };
  spec.transition = [](double s, double) -> NextStateLaw { return std::vector<Atom>{{s, 1.0}}; };
  return spec;
}

ContinuousModelSpec adversarial_concave(const Params& p) {
  static const ModelInfo& base_info = lookup("consumption_savings");
  const ParamMap defaults;
  const Params base(base_info, defaults);
  ContinuousModelSpec spec = consumption_savings(base, p.real("beta"));
  const double kink = p.real("kink");
  const double middle = 0.5 * (spec.states.lo + spec.states.hi);
  auto utility = spec.reward;
  spec.reward = [=](double w, double k) { return utility(w, k) + kink * std::abs(w - middle); };
  return spec;
}

// Values of the default instances from exact rational policy iteration
// (tests/oracle/golden.py); data/golden holds the same numbers.
const char* const kReferenceOracle =
    "policy iteration in exact rational arithmetic (tests/oracle/golden.py)";

const std::vector<ReferenceValue>& machine_replacement_reference() {
  static const std::vector<ReferenceValue> v = {
      {0, 5.081811234237677},
      {1, 4.171035536874284},
      {2, 3.647153228888041},
      {3, 3.5818112342376778}};
  return v;
}

const std::vector<ReferenceValue>& queueing_reference() {
  static const std::vector<ReferenceValue> v = {
      {0, -11.803056497430525},
      {1, -15.081683302272337},
      {2, -20.431984795299975},
      {3, -27.21459704023714},
      {4, -34.98561142484377},
      {5, -43.43262394635019},
      {6, -52.322168749149476},
      {7, -61.436261742357225},
      {8, -70.44037496482272},
      {9, -78.50544566316364},
      {10, -83.11396977829433}};
  return v;
}

}  // namespace

std::span<const ModelInfo> zoo_registry() { return registry(); }

NamedModel build(const std::string& name, const ParamMap& params) {
  const ModelInfo& info = lookup(name);
  const Params p(info, params);
  NamedModel out;
  out.name = name;
  out.claimed_class = structural_class(info.claimed_class);
  out.counterexample = info.counterexample;

  if (name == "machine_replacement") {
    out.model = machine_replacement(p);
    if (params.empty()) {
      out.reference_values = machine_replacement_reference();
      out.provenance = kReferenceOracle;
    }
  } else if (name == "queueing") {
    out.model = queueing(p);
    if (params.empty()) {
      out.reference_values = queueing_reference();
      out.provenance = kReferenceOracle;
    }
  } else if (name == "inventory") {
    out.model = inventory(p);
    set_grid(out, p);
  } else if (name == "consumption_savings") {
    out.model = consumption_savings(p, p.real("beta"));
    set_grid(out, p);
  } else if (name == "dynamic_pricing") {
    out.model = dynamic_pricing(p);
    set_grid(out, p);
  } else if (name == "adversarial_monotone") {
    out.model = adversarial_monotone(p);
    set_grid(out, p);
  } else if (name == "adversarial_selection") {
    out.model = adversarial_selection(p);
    set_grid(out, p);
  } else if (name == "adversarial_concave") {
    out.model = adversarial_concave(p);
    set_grid(out, p);
  } else {
    throw std::logic_error("registered model without builder: " + name);
  }
  return out;
}

GridModel to_grid(const NamedModel& model) {
  if (const auto* finite = std::get_if<FiniteMdp>(&model.model)) return index_grid(*finite);
  return discretize(std::get<ContinuousModelSpec>(model.model), model.n_state, model.n_action);
}

std::string registry_json() {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const ModelInfo& m : registry()) {
    nlohmann::ordered_json entry;
    entry["name"] = m.name;
    entry["claimed_class"] = std::string(to_string(m.claimed_class));
    entry["counterexample"] = m.counterexample;
    entry["description"] = m.description;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const ParamInfo& p : m.params) {
      nlohmann::ordered_json q;
      q["name"] = p.name;
      q["default"] = p.default_value;
      if (p.choices.empty()) {
        q["range"] = {p.lo, p.hi};
      } else {
        q["choices"] = p.choices;
      }
      q["description"] = p.description;
      params.push_back(q);
    }
    entry["params"] = params;
    doc.push_back(entry);
  }
  return doc.dump(2) + "\n";
}

}  // namespace optdp
