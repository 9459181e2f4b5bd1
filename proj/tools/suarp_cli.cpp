// Scenario runner and report generator over the shared-library C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "suarp/suarp.h"

namespace {

int g_verbosity = 0;

void note(const std::string& message) {
  if (g_verbosity > 0) std::cerr << "suarp: " << message << "\n";
}

int status_to_exit(suarp_status status) {
  switch (status) {
    case SUARP_OK: return 0;
    case SUARP_ERR_CONFIG: return 2;
    case SUARP_ERR_IO: return 3;
    default: return 1;
  }
}

int fail_with(suarp_status status) {
  std::cerr << "suarp: error: " << suarp_last_error() << "\n";
  return status_to_exit(status);
}

bool write_file(const std::filesystem::path& path, const char* content) {
  if (!content) return true;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "suarp: error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  note("wrote " + path.string());
  return true;
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "suarp: error: cannot create " << dir << ": " << ec.message()
              << "\n";
    return false;
  }
  return true;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::int64_t seed) {
  suarp_scenario* scenario = nullptr;
  suarp_status status = suarp_scenario_load_file(config_path.c_str(), &scenario);
  if (status != SUARP_OK) return fail_with(status);
  if (seed >= 0) suarp_scenario_set_seed(scenario, static_cast<uint64_t>(seed));
  note(std::string("running scenario ") + suarp_scenario_name(scenario));

  suarp_run* run = nullptr;
  status = suarp_scenario_run(scenario, &run);
  if (status != SUARP_OK) {
    suarp_scenario_free(scenario);
    return fail_with(status);
  }

  int exit_code = 0;
  if (!ensure_dir(out_dir)) {
    exit_code = 3;
  } else {
    std::filesystem::path dir(out_dir);
    if (!write_file(dir / "trace.jsonl", suarp_run_trace(run)) ||
        !write_file(dir / "metrics.json", suarp_run_metrics(run)) ||
        !write_file(dir / "report.csv", suarp_run_report_csv(run)))
      exit_code = 3;
    const char* attack = suarp_run_attack_report(run);
    if (exit_code == 0 && attack &&
        !write_file(dir / "attack_report.json", attack))
      exit_code = 3;
  }
  suarp_run_free(run);
  suarp_scenario_free(scenario);
  return exit_code;
}

int cmd_tables(const std::string& csv_path, const std::string& out_dir) {
  suarp_report* report = nullptr;
  suarp_status status = suarp_tables_from_csv_file(csv_path.c_str(), &report);
  if (status != SUARP_OK) return fail_with(status);

  int exit_code = 0;
  if (!ensure_dir(out_dir)) {
    exit_code = 3;
  } else {
    std::filesystem::path dir(out_dir);
    if (!write_file(dir / "table2.csv", suarp_report_get(report, "table2.csv")) ||
        !write_file(dir / "table3.csv", suarp_report_get(report, "table3.csv")) ||
        !write_file(dir / "tables.txt", suarp_report_get(report, "summary.txt")) ||
        !write_file(dir / "metrics.json", suarp_report_get(report, "metrics.json")))
      exit_code = 3;
  }
  if (exit_code == 0) {
    const char* text = suarp_report_get(report, "summary.txt");
    if (text) std::cout << text;
  }
  suarp_report_free(report);
  return exit_code;
}

int cmd_attack_matrix(const std::string& out_dir, int seeds, int attempts) {
  note("running attack matrix, seeds=" + std::to_string(seeds));
  suarp_report* report = nullptr;
  suarp_status status = suarp_attack_matrix(
      static_cast<uint32_t>(seeds), static_cast<uint32_t>(attempts), &report);
  if (status != SUARP_OK) return fail_with(status);

  int exit_code = 0;
  if (!ensure_dir(out_dir)) {
    exit_code = 3;
  } else {
    std::filesystem::path dir(out_dir);
    if (!write_file(dir / "matrix.txt", suarp_report_get(report, "matrix.txt")) ||
        !write_file(dir / "matrix.json", suarp_report_get(report, "matrix.json")))
      exit_code = 3;
  }
  if (exit_code == 0) {
    const char* text = suarp_report_get(report, "matrix.txt");
    if (text) std::cout << text;
  }
  suarp_report_free(report);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* level = std::getenv("SUARP_LOG"))
    g_verbosity = std::atoi(level);

  CLI::App app{"Deterministic LAN simulator for unicast address resolution "
               "and secure DHCP, with traffic analysis reports"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", csv_path;
  std::int64_t seed = -1;
  int seeds = 10;
  int attempts = 10'000;

  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the scenario seed");

  CLI::App* tables = app.add_subcommand(
      "tables", "reproduce the traffic comparison tables from a session CSV");
  tables->add_option("csv", csv_path, "session summary CSV")->required();
  tables->add_option("--out", out_dir, "output directory");

  CLI::App* matrix = app.add_subcommand(
      "attack-matrix", "run the adversarial suite and print the verdict matrix");
  matrix->add_option("--out", out_dir, "output directory");
  matrix->add_option("--seeds", seeds, "number of seeds to sweep");
  matrix->add_option("--attempts", attempts, "forged/spoofed attempts per cell");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir, seed);
  if (tables->parsed()) return cmd_tables(csv_path, out_dir);
  if (matrix->parsed()) return cmd_attack_matrix(out_dir, seeds, attempts);
  return 1;
}
