#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pb::cli;

enum Exit { kPass = 0, kNumericFailure = 1, kParseError = 2, kValidationError = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::vector<Report> run_all(const std::vector<PreparedScenario>& jobs, unsigned threads, const ReportOptions& opt) {
  std::vector<Report> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) reports[k] = execute(jobs[k], opt);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::jthread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  return reports;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch front end for the physbench numerical suites"};
  std::vector<std::string> configs, builtins;
  std::string out_dir;
  unsigned threads = 1;
  bool list = false, timing = false, all = false;
  app.add_option("--config", configs, "Scenario config file (JSON); repeatable");
  app.add_option("--scenario", builtins, "Built-in scenario name; repeatable");
  app.add_option("--out", out_dir, "Directory for JSON reports and CSV tables (stdout when omitted)");
  app.add_option("--threads", threads, "Scenarios run concurrently")->check(CLI::Range(1u, 256u));
  app.add_flag("--list", list, "Print built-in scenario names and exit");
  app.add_flag("--all", all, "Run every built-in scenario");
  app.add_flag("--timing", timing, "Add wall_time_seconds to each report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  if (list) {
    for (const auto& s : builtin_scenarios()) std::cout << s.name << '\n';
    return kPass;
  }
  if (all) {
    for (const auto& s : builtin_scenarios()) builtins.push_back(s.name);
  }
  if (configs.empty() && builtins.empty()) {
    std::cerr << "error: give --config, --scenario, --all or --list\n";
    return kParseError;
  }

  std::vector<PreparedScenario> jobs;
  try {
    std::vector<Scenario> scenarios;
    for (const auto& path : configs) {
      auto more = parse_config(read_file(path));
      scenarios.insert(scenarios.end(), more.begin(), more.end());
    }
    for (const auto& name : builtins) scenarios.push_back(find_builtin(name));
    std::set<std::string> stems;
    for (const auto& s : scenarios) {
      if (!stems.insert(s.output.empty() ? s.name : s.output).second) {
        throw ValidationError("duplicate report name '" + (s.output.empty() ? s.name : s.output) + "'");
      }
      jobs.push_back(prepare(s));
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationError;
  }

  const auto reports = run_all(jobs, threads, ReportOptions{timing});
  bool all_pass = true;
  try {
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const auto& s = jobs[k].scenario;
      const std::string stem = s.output.empty() ? s.name : s.output;
      if (out_dir.empty()) {
        std::cout << serialize(reports[k].document);
      } else {
        write_file(fs::path(out_dir) / (stem + ".json"), serialize(reports[k].document));
        if (!reports[k].csv.empty()) write_file(fs::path(out_dir) / (stem + ".csv"), reports[k].csv);
      }
      std::cerr << (reports[k].pass ? "PASS " : "FAIL ") << s.name << '\n';
      all_pass = all_pass && reports[k].pass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return all_pass ? kPass : kNumericFailure;
}
