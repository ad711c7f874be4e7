#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pb::cli {

using Json = nlohmann::json;

inline constexpr int kReportVersion = 1;
inline constexpr const char* kRngName = "mt19937_64";

// Malformed config document (exit code 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document whose content fails a schema (exit code 3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  std::string module;
  std::uint64_t seed = 1;
  Json params = Json::object();
  Json expect = Json::object();
  std::string output;  // report file stem; the name when empty

  [[nodiscard]] Json echo() const;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", "<=", ">=", "=="
  double bound = 0.0;
  bool pass = false;
};

// Results and checks of one executed scenario.
class Outcome {
 public:
  Json results = Json::object();
  std::vector<std::vector<std::string>> csv;  // header row first; empty when no table

  void below(const std::string& name, double value, double bound) { add(name, value, "<", bound, value < bound); }
  void at_most(const std::string& name, double value, double bound) { add(name, value, "<=", bound, value <= bound); }
  void at_least(const std::string& name, double value, double bound) { add(name, value, ">=", bound, value >= bound); }
  void equal(const std::string& name, double value, double expected, double tol = 0.0) {
    add(name, value, "==", expected, std::abs(value - expected) <= tol);
  }
  [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }
  [[nodiscard]] bool pass() const;

 private:
  void add(const std::string& name, double value, const char* rel, double bound, bool pass) {
    checks_.push_back({name, value, rel, bound, pass});
  }
  std::vector<Check> checks_;
};

// Strict reader over a params object; finish() rejects keys that were never read.
class ParamReader {
 public:
  ParamReader(const Json& obj, std::string where);

  [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }
  [[nodiscard]] double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  [[nodiscard]] int integer(const std::string& key, std::optional<int> fallback, int lo, int hi);
  [[nodiscard]] bool flag(const std::string& key, std::optional<bool> fallback = std::nullopt);
  [[nodiscard]] std::string text(const std::string& key, std::optional<std::string> fallback,
                                 const std::set<std::string>& allowed);
  [[nodiscard]] std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback);
  [[nodiscard]] std::vector<std::string> strings(const std::string& key);
  // [re, im] pair or a plain real number.
  [[nodiscard]] std::complex<double> complex(const std::string& key, std::complex<double> fallback);
  [[nodiscard]] const Json& raw(const std::string& key);
  void finish() const;

  [[noreturn]] void reject(const std::string& key, const std::string& why) const;

 private:
  const Json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

// A validated scenario bound to its module; run() does the numerical work.
using PreparedRun = std::function<Outcome(std::uint64_t seed)>;

struct ModuleEntry {
  std::string name;
  // Validates params and returns the bound computation. Throws ValidationError.
  std::function<PreparedRun(const Json& params)> prepare;
  // Scalar result keys that an "expect" block may name.
  std::set<std::string> scalar_results;
};

[[nodiscard]] const std::vector<ModuleEntry>& modules();
[[nodiscard]] const ModuleEntry& find_module(const std::string& name);

// Parses a config document: one scenario object or {"scenarios": [...]}.
[[nodiscard]] std::vector<Scenario> parse_config(const std::string& text);

[[nodiscard]] const std::vector<Scenario>& builtin_scenarios();
[[nodiscard]] const Scenario& find_builtin(const std::string& name);

struct PreparedScenario {
  Scenario scenario;
  PreparedRun run;
};

// Validation of params and expectations; throws ValidationError.
[[nodiscard]] PreparedScenario prepare(const Scenario& s);

struct ReportOptions {
  bool timing = false;
};

struct Report {
  Json document;
  std::string csv;  // empty when the scenario has no table
  bool pass = false;
};

// Runs a prepared scenario. Numerical exceptions become a failing report.
[[nodiscard]] Report execute(const PreparedScenario& p, const ReportOptions& opt = {});

// Deterministic serialization: sorted keys, fixed indentation, trailing newline.
[[nodiscard]] std::string serialize(const Json& doc);

}  // namespace pb::cli
