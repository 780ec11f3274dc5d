#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "optdp/mdp.hpp"

namespace optdp {

/// Syntax error in a model document. `line` and `column` are 1-based; both
/// are 0 when the problem is not tied to a position (e.g. a missing field).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a model document:
///
///   {
///     "n_states": 2, "n_actions": 2, "beta": 0.5,
///     "feasible":   [[0, 1], [0, 1]],          // Gamma(s) per state
///     "reward":     [[s, a, r], ...],          // one triple per feasible pair
///     "transition": [[s, a, s2, p], ...]       // omitted entries are 0
///   }
///
/// Throws ParseError for malformed JSON or wrongly typed fields, and
/// ValidationError for cross-field problems (rewards on infeasible pairs,
/// missing rewards, out-of-range indices) or anything `validate` rejects.
/// The result has passed `make_validated`.
FiniteMdp parse_model(std::string_view text);

/// Writes the document format above with every real printed to 17
/// significant digits, so parse_model(serialize_model(m)) == m bit for bit
/// for any validated m.
std::string serialize_model(const FiniteMdp& model);

/// Reads and parses a model file. Throws std::runtime_error when the file
/// cannot be opened.
FiniteMdp read_model_file(const std::filesystem::path& path);

/// Shortest-exact formatting helper shared with the CLI table output.
std::string format_real(double value);

}  // namespace optdp
