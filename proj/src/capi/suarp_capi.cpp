#include "suarp/suarp.h"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "analysis/analysis.hpp"
#include "scenario/config.hpp"
#include "scenario/runner.hpp"

namespace {

thread_local std::string g_last_error = "";

suarp_status fail(suarp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

/// Translate any exception escaping the C++ core into a status code.
template <typename Fn>
suarp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const suarp::scenario::IoError& e) {
    return fail(SUARP_ERR_IO, e.what());
  } catch (const suarp::sim::ConfigError& e) {
    return fail(SUARP_ERR_CONFIG, e.what());
  } catch (const suarp::analysis::MalformedCsv& e) {
    return fail(SUARP_ERR_CONFIG, e.what());
  } catch (const suarp::analysis::MalformedTrace& e) {
    return fail(SUARP_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(SUARP_ERR, e.what());
  } catch (...) {
    return fail(SUARP_ERR, "unknown failure");
  }
}

}  // namespace

struct suarp_scenario {
  suarp::scenario::ScenarioConfig config;
};

struct suarp_run {
  suarp::scenario::RunArtifacts artifacts;
};

struct suarp_report {
  std::map<std::string, std::string> entries;
};

extern "C" {

const char* suarp_version(void) { return "1.0.0"; }

const char* suarp_last_error(void) { return g_last_error.c_str(); }

suarp_status suarp_scenario_load_file(const char* path, suarp_scenario** out) {
  if (!path || !out) return fail(SUARP_ERR_CONFIG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = new suarp_scenario{suarp::scenario::load_scenario_file(path)};
    *out = handle;
    return SUARP_OK;
  });
}

suarp_status suarp_scenario_load_text(const char* json_text, suarp_scenario** out) {
  if (!json_text || !out) return fail(SUARP_ERR_CONFIG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = new suarp_scenario{
        suarp::scenario::parse_scenario(json_text, "<inline>")};
    *out = handle;
    return SUARP_OK;
  });
}

void suarp_scenario_set_seed(suarp_scenario* scenario, uint64_t seed) {
  if (scenario) scenario->config.seed = seed;
}

const char* suarp_scenario_name(const suarp_scenario* scenario) {
  return scenario ? scenario->config.name.c_str() : nullptr;
}

void suarp_scenario_free(suarp_scenario* scenario) { delete scenario; }

suarp_status suarp_scenario_run(const suarp_scenario* scenario, suarp_run** out) {
  if (!scenario || !out) return fail(SUARP_ERR_CONFIG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = new suarp_run{suarp::scenario::run_scenario(scenario->config)};
    *out = handle;
    return SUARP_OK;
  });
}

const char* suarp_run_trace(const suarp_run* run) {
  return run ? run->artifacts.trace_jsonl.c_str() : nullptr;
}

const char* suarp_run_metrics(const suarp_run* run) {
  return run ? run->artifacts.metrics_json.c_str() : nullptr;
}

const char* suarp_run_report_csv(const suarp_run* run) {
  return run ? run->artifacts.report_csv.c_str() : nullptr;
}

const char* suarp_run_attack_report(const suarp_run* run) {
  if (!run || !run->artifacts.attack_report_json) return nullptr;
  return run->artifacts.attack_report_json->c_str();
}

void suarp_run_free(suarp_run* run) { delete run; }

suarp_status suarp_tables_from_csv_text(const char* csv_text, suarp_report** out) {
  if (!csv_text || !out) return fail(SUARP_ERR_CONFIG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto sessions = suarp::analysis::read_summary_csv(csv_text);
    auto report = suarp::analysis::make_tables_report(sessions);
    auto handle = new suarp_report;
    handle->entries["table2.csv"] = report.table2_csv;
    handle->entries["table3.csv"] = report.table3_csv;
    handle->entries["summary.txt"] = report.text;
    handle->entries["metrics.json"] = report.metrics_json;
    *out = handle;
    return SUARP_OK;
  });
}

suarp_status suarp_tables_from_csv_file(const char* path, suarp_report** out) {
  if (!path || !out) return fail(SUARP_ERR_CONFIG, "null argument");
  std::ifstream in(path);
  if (!in) return fail(SUARP_ERR_IO, std::string("cannot open ") + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  return suarp_tables_from_csv_text(text.c_str(), out);
}

suarp_status suarp_attack_matrix(uint32_t seeds, uint32_t attempts_per_cell,
                                 suarp_report** out) {
  if (!out) return fail(SUARP_ERR_CONFIG, "null argument");
  if (seeds == 0) return fail(SUARP_ERR_CONFIG, "seeds must be positive");
  *out = nullptr;
  return guarded([&]() {
    int attempts = attempts_per_cell == 0 ? 10'000 : static_cast<int>(attempts_per_cell);
    auto matrix = suarp::scenario::run_attack_matrix(static_cast<int>(seeds), attempts);
    auto handle = new suarp_report;
    handle->entries["matrix.txt"] = matrix.text;
    handle->entries["matrix.json"] = matrix.json;
    *out = handle;
    return SUARP_OK;
  });
}

const char* suarp_report_get(const suarp_report* report, const char* key) {
  if (!report || !key) return nullptr;
  auto it = report->entries.find(key);
  return it == report->entries.end() ? nullptr : it->second.c_str();
}

void suarp_report_free(suarp_report* report) { delete report; }

}  // extern "C"
