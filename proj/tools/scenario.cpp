#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace pb::cli {

Json Scenario::echo() const {
  Json j{{"name", name}, {"module", module}, {"seed", seed}, {"params", params}};
  if (!expect.empty()) j["expect"] = expect;
  if (!output.empty()) j["output"] = output;
  return j;
}

bool Outcome::pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

// ---- ParamReader ----

ParamReader::ParamReader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
  if (!obj_.is_object()) throw ValidationError(where_ + ": expected an object");
}

void ParamReader::reject(const std::string& key, const std::string& why) const {
  throw ValidationError(where_ + "." + key + ": " + why);
}

const Json& ParamReader::raw(const std::string& key) {
  seen_.insert(key);
  if (!obj_.contains(key)) reject(key, "missing");
  return obj_.at(key);
}

double ParamReader::number(const std::string& key, std::optional<double> fallback) {
  seen_.insert(key);
  if (!obj_.contains(key)) {
    if (!fallback) reject(key, "missing");
    return *fallback;
  }
  const Json& v = obj_.at(key);
  if (!v.is_number()) reject(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) reject(key, "must be finite");
  return d;
}

int ParamReader::integer(const std::string& key, std::optional<int> fallback, int lo, int hi) {
  seen_.insert(key);
  int value = 0;
  if (!obj_.contains(key)) {
    if (!fallback) reject(key, "missing");
    value = *fallback;
  } else {
    const Json& v = obj_.at(key);
    if (!v.is_number_integer()) reject(key, "expected an integer");
    const auto wide = v.get<long long>();
    if (wide < lo || wide > hi) reject(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    value = static_cast<int>(wide);
  }
  return value;
}

bool ParamReader::flag(const std::string& key, std::optional<bool> fallback) {
  seen_.insert(key);
  if (!obj_.contains(key)) {
    if (!fallback) reject(key, "missing");
    return *fallback;
  }
  if (!obj_.at(key).is_boolean()) reject(key, "expected true or false");
  return obj_.at(key).get<bool>();
}

std::string ParamReader::text(const std::string& key, std::optional<std::string> fallback,
                              const std::set<std::string>& allowed) {
  seen_.insert(key);
  std::string value;
  if (!obj_.contains(key)) {
    if (!fallback) reject(key, "missing");
    value = *fallback;
  } else {
    if (!obj_.at(key).is_string()) reject(key, "expected a string");
    value = obj_.at(key).get<std::string>();
  }
  if (!allowed.empty() && !allowed.contains(value)) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    reject(key, "must be one of {" + list + "}");
  }
  return value;
}

std::vector<double> ParamReader::numbers(const std::string& key, std::optional<std::vector<double>> fallback) {
  seen_.insert(key);
  if (!obj_.contains(key)) {
    if (!fallback) reject(key, "missing");
    return *fallback;
  }
  const Json& v = obj_.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) reject(key, "expected a number or a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) reject(key, "expected finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> ParamReader::strings(const std::string& key) {
  const Json& v = raw(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) reject(key, "expected a string or a list of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) reject(key, "expected strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::complex<double> ParamReader::complex(const std::string& key, std::complex<double> fallback) {
  seen_.insert(key);
  if (!obj_.contains(key)) return fallback;
  const Json& v = obj_.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    reject(key, "expected a number or a [re, im] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

void ParamReader::finish() const {
  for (const auto& [key, value] : obj_.items()) {
    if (!seen_.contains(key)) throw ValidationError(where_ + "." + key + ": unknown key");
  }
}

// ---- config documents ----

namespace {

Scenario scenario_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": a scenario must be an object");
  Scenario s;
  static const std::set<std::string> known{"name", "module", "seed", "params", "expect", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError(where + "." + key + ": unknown key");
  }
  if (!j.contains("module") || !j.at("module").is_string()) throw ValidationError(where + ".module: missing or not a string");
  s.module = j.at("module").get<std::string>();
  if (j.contains("name")) {
    if (!j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
      throw ValidationError(where + ".name: expected a non-empty string");
    }
    s.name = j.at("name").get<std::string>();
  } else {
    s.name = s.module;
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ValidationError(where + ".seed: expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ValidationError(where + ".params: expected an object");
    s.params = j.at("params");
  }
  if (j.contains("expect")) {
    if (!j.at("expect").is_object()) throw ValidationError(where + ".expect: expected an object");
    s.expect = j.at("expect");
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    if (!o.is_string() || o.get<std::string>().empty() ||
        o.get<std::string>().find_first_of("/\\") != std::string::npos) {
      throw ValidationError(where + ".output: expected a plain file stem");
    }
    s.output = o.get<std::string>();
  }
  return s;
}

}  // namespace

std::vector<Scenario> parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<Scenario> out;
  if (doc.is_object() && doc.contains("scenarios")) {
    if (doc.size() != 1) throw ValidationError("config: only \"scenarios\" may appear beside a scenario list");
    const Json& list = doc.at("scenarios");
    if (!list.is_array() || list.empty()) throw ParseError("config.scenarios: expected a non-empty array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.push_back(scenario_from(list[k], "scenarios[" + std::to_string(k) + "]"));
    }
  } else if (doc.is_object()) {
    out.push_back(scenario_from(doc, "scenario"));
  } else {
    throw ParseError("config: expected a JSON object");
  }
  std::set<std::string> stems;
  for (const auto& s : out) {
    const std::string stem = s.output.empty() ? s.name : s.output;
    if (!stems.insert(stem).second) throw ValidationError("config: duplicate report name '" + stem + "'");
  }
  return out;
}

const ModuleEntry& find_module(const std::string& name) {
  for (const auto& m : modules()) {
    if (m.name == name) return m;
  }
  std::string list;
  for (const auto& m : modules()) list += (list.empty() ? "" : ", ") + m.name;
  throw ValidationError("unknown module '" + name + "' (known: " + list + ")");
}

const Scenario& find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown built-in scenario '" + name + "'");
}

PreparedScenario prepare(const Scenario& s) {
  const ModuleEntry& m = find_module(s.module);
  PreparedScenario p{s, nullptr};
  try {
    p.run = m.prepare(s.params);
  } catch (const ValidationError& e) {
    throw ValidationError(s.name + ": " + e.what());
  }
  for (const auto& [key, value] : s.expect.items()) {
    if (!m.scalar_results.contains(key)) {
      throw ValidationError(s.name + ".expect." + key + ": not a scalar result of module " + s.module);
    }
    const bool plain = value.is_number() || value.is_boolean();
    const bool with_tol = value.is_object() && value.contains("value") && value.at("value").is_number() &&
                          (value.size() == 1 || (value.size() == 2 && value.contains("tol") &&
                                                 value.at("tol").is_number() && value.at("tol").get<double>() >= 0));
    if (!plain && !with_tol) {
      throw ValidationError(s.name + ".expect." + key + ": expected a number, a boolean or {\"value\", \"tol\"}");
    }
  }
  return p;
}

namespace {

double as_number(const Json& v) { return v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0) : v.get<double>(); }

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += row[k];
    }
    out += '\n';
  }
  return out;
}

Json check_json(const Check& c) {
  return Json{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"bound", c.bound}, {"pass", c.pass}};
}

}  // namespace

Report execute(const PreparedScenario& p, const ReportOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Json doc{{"report_version", kReportVersion},
           {"scenario", p.scenario.echo()},
           {"rng", Json{{"algorithm", kRngName}, {"seed", p.scenario.seed}}},
           {"threads", 1}};
  Report rep;
  try {
    Outcome out = p.run(p.scenario.seed);
    for (const auto& [key, value] : p.scenario.expect.items()) {
      const double expected = value.is_object() ? value.at("value").get<double>() : as_number(value);
      const double tol = value.is_object() && value.contains("tol") ? value.at("tol").get<double>() : 0.0;
      const bool present = out.results.contains(key) &&
                           (out.results.at(key).is_number() || out.results.at(key).is_boolean());
      const double got = present ? as_number(out.results.at(key)) : std::nan("");
      out.equal("expect " + key, got, expected, tol);
    }
    Json checks = Json::array();
    for (const auto& c : out.checks()) checks.push_back(check_json(c));
    doc["results"] = std::move(out.results);
    doc["checks"] = std::move(checks);
    doc["pass"] = out.pass();
    doc["status"] = "completed";
    rep.csv = csv_text(out.csv);
    rep.pass = out.pass();
  } catch (const std::exception& e) {
    doc["results"] = Json::object();
    doc["checks"] = Json::array();
    doc["pass"] = false;
    doc["status"] = "numerical_failure";
    doc["error"] = e.what();
    rep.pass = false;
  }
  if (opt.timing) {
    doc["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  rep.document = std::move(doc);
  return rep;
}

std::string serialize(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace pb::cli
