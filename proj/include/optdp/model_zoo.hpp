#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optdp/mdp.hpp"
#include "optdp/structure.hpp"

namespace optdp {

using ParamMap = std::map<std::string, std::string>;

struct ParamInfo {
  std::string name;
  std::string default_value;
  /// Inclusive numeric range; ignored for `choices` parameters.
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> choices;
  std::string description;
};

struct ModelInfo {
  std::string name;
  ClassTag claimed_class;
  /// Shipped to exercise a checker: the model deliberately breaks its claim.
  bool counterexample = false;
  std::string description;
  std::vector<ParamInfo> params;
};

struct ReferenceValue {
  StateIndex state;
  double value;
};

struct NamedModel {
  std::string name;
  StructuralClass claimed_class;
  bool counterexample = false;
  std::variant<FiniteMdp, ContinuousModelSpec> model;
  /// Grid sizes used by `to_grid` for continuous specs.
  std::size_t n_state = 0;
  std::size_t n_action = 0;
  /// Known optimal values at default parameters, with the method that
  /// produced them; empty when none are shipped.
  std::vector<ReferenceValue> reference_values;
  std::string provenance;
};

std::span<const ModelInfo> zoo_registry();

/// Builds a registered model. Unknown names, unknown parameter keys and
/// out-of-range values throw std::invalid_argument listing the valid options.
NamedModel build(const std::string& name, const ParamMap& params = {});

/// Finite models map to an index grid; continuous specs are discretized with
/// the model's n_state and n_action.
GridModel to_grid(const NamedModel& model);

/// Registry rendered as the JSON document shipped in data/zoo_registry.json.
std::string registry_json();

}  // namespace optdp
