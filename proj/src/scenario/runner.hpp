#pragma once

#include <optional>
#include <string>
#include <vector>

#include "analysis/analysis.hpp"
#include "scenario/config.hpp"

namespace suarp::scenario {

struct AttackOutcome {
  std::string adversary;
  std::string kind;  // poisoning | spoofing | insider_ack
  std::uint64_t attempts{0};
  std::uint64_t successes{0};
  std::uint64_t intercepted{0};
  std::uint64_t forwarded{0};
  std::int64_t first_success_ms{-1};
  std::uint64_t dwell_ms{0};
};

struct RunArtifacts {
  std::string trace_jsonl;
  std::string metrics_json;
  std::string report_csv;
  std::optional<std::string> attack_report_json;
  analysis::SessionSummary summary;
  std::vector<AttackOutcome> attacks;
};

/// Build the topology and agents from a validated config, drive the event
/// loop to the configured horizon and collect every artifact.
RunArtifacts run_scenario(const ScenarioConfig& config);

struct MatrixCell {
  std::string attack;    // poisoning | spoofing | insider_ack
  std::string protocol;  // arp | suarp-base | ... | dhcp | sdhcp-v2
  std::uint64_t attempts{0};
  std::uint64_t successes{0};
  bool expect_blocked{false};
  bool as_expected() const {
    return expect_blocked ? successes == 0 : successes > 0;
  }
};

struct AttackMatrixResult {
  std::vector<MatrixCell> cells;  // aggregated over seeds (attempts summed)
  std::string text;
  std::string json;
  bool as_expected{true};
  bool identical_across_seeds{true};
};

/// The adversarial sweep: poisoning against legacy ARP and the three
/// unicast-resolution variants, spoofing against legacy DHCP and the three
/// secure DHCP variants, plus the known-key acknowledgment forgery.
AttackMatrixResult run_attack_matrix(int seed_count,
                                     int attempts_per_secure_cell = 10'000);

}  // namespace suarp::scenario
