#include <fstream>
#include <random>

#include "doctest.h"
#include "optdp/model_io.hpp"
#include "support/random_mdp.hpp"

using namespace optdp;

namespace {

const char* kTwoState = R"({
  "n_states": 2, "n_actions": 2, "beta": 0.5,
  "feasible": [[0, 1], [0, 1]],
  "reward": [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]],
  "transition": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1]]
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parse a small model") {
  const FiniteMdp m = parse_model(kTwoState);
  CHECK(m.n_states() == 2);
  CHECK(m.n_actions() == 2);
  CHECK(m.beta() == 0.5);
  CHECK(m.reward(1, 1) == 1.0);
  CHECK(m.find(0, 1)->outcomes == std::vector<Transition>{{1, 1.0}});
}

TEST_CASE("partial feasibility and omitted zero transitions") {
  const FiniteMdp m = parse_model(R"({
    "n_states": 3, "n_actions": 2, "beta": 0.9,
    "feasible": [[1], [0, 1], [0]],
    "reward": [[0, 1, -1.5], [1, 0, 2], [1, 1, 0.25], [2, 0, 0]],
    "transition": [[0, 1, 2, 0.25], [0, 1, 0, 0.75],
                   [1, 0, 1, 1], [1, 1, 2, 1], [2, 0, 0, 0.5], [2, 0, 2, 0.5]]
  })");
  CHECK_FALSE(m.feasible(0, 0));
  CHECK(m.find(0, 1)->outcomes == std::vector<Transition>{{0, 0.75}, {2, 0.25}});
  CHECK(m.max_abs_reward() == 2.0);
}

TEST_CASE("serialization round-trips bit for bit") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    testing::RandomMdpOptions opts;
    opts.beta = std::uniform_real_distribution<double>(0.01, 0.999)(rng);
    opts.reward_scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
    const FiniteMdp m = testing::random_mdp(rng, opts);
    const std::string text = serialize_model(m);
    const FiniteMdp back = parse_model(text);
    CHECK(back == m);
    CHECK(serialize_model(back) == text);
  }
}

TEST_CASE("syntax errors carry line and column") {
  const std::string text = "{\n  \"n_states\": 2,\n  oops\n}";
  try {
    parse_model(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 3);
    CHECK(std::string(e.what()).rfind("line 3", 0) == 0);
  }
  CHECK_THROWS_AS(parse_model(""), ParseError);
  CHECK_THROWS_AS(parse_model("[1, 2]"), ParseError);
}

TEST_CASE("wrongly typed or missing fields") {
  CHECK_THROWS_AS(parse_model(with(kTwoState, "\"n_states\": 2", "\"n_states\": \"two\"")),
                  ParseError);
  CHECK_THROWS_AS(parse_model(with(kTwoState, "\"n_states\": 2", "\"n_states\": -2")),
                  ParseError);
  CHECK_THROWS_AS(parse_model(with(kTwoState, "\"beta\": 0.5,", "")), ParseError);
  CHECK_THROWS_AS(parse_model(with(kTwoState, "[0, 0, 1],", "[0, 0],")), ParseError);
  CHECK_THROWS_AS(parse_model(with(kTwoState, "[0, 0, 0, 1],", "[0, 0, 0, \"1\"],")),
                  ParseError);
}

TEST_CASE("cross-field problems are validation errors") {
  auto report_of = [](const std::string& text) {
    try {
      parse_model(text);
    } catch (const ValidationError& e) {
      return e.report();
    }
    FAIL("expected ValidationError");
    return ValidationReport{};
  };
  SUBCASE("beta at 1") {
    const auto r = report_of(with(kTwoState, "\"beta\": 0.5", "\"beta\": 1"));
    CHECK(r.front().find("beta") != std::string::npos);
  }
  SUBCASE("reward on infeasible pair") {
    const auto r = report_of(with(kTwoState, "[[0, 1], [0, 1]]", "[[0], [0, 1]]"));
    CHECK(r.front().find("infeasible pair") != std::string::npos);
  }
  SUBCASE("missing reward") {
    const auto r = report_of(with(kTwoState, "[0, 1, 0], ", ""));
    CHECK(r.front().find("no reward") != std::string::npos);
  }
  SUBCASE("row does not sum to one") {
    const auto r = report_of(with(kTwoState, "[1, 1, 0, 1]", "[1, 1, 0, 0.9]"));
    CHECK(r.front().find("not stochastic") != std::string::npos);
  }
  SUBCASE("next state out of range") {
    const auto r = report_of(with(kTwoState, "[1, 1, 0, 1]", "[1, 1, 5, 1]"));
    CHECK_FALSE(r.empty());
  }
  SUBCASE("feasible list has the wrong length") {
    const auto r = report_of(with(kTwoState, "\"n_states\": 2", "\"n_states\": 3"));
    CHECK_FALSE(r.empty());
  }
}

TEST_CASE("model files") {
  CHECK_THROWS_AS(read_model_file("/nonexistent/model.json"), std::runtime_error);
  const auto path = std::filesystem::temp_directory_path() / "optdp_model_io_test.json";
  {
    std::ofstream out(path);
    out << kTwoState;
  }
  CHECK(read_model_file(path) == parse_model(kTwoState));
  std::filesystem::remove(path);
}

TEST_CASE("format_real keeps 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
