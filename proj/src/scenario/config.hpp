#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agents/adversary.hpp"
#include "agents/host.hpp"
#include "agents/server.hpp"
#include "sim/simulator.hpp"
#include "sim/topology.hpp"

namespace suarp::scenario {

using sim::ConfigError;

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what)
      : std::runtime_error("io error: " + what) {}
};

enum class ArpMode { Legacy, Suarp, Static };
enum class DhcpMode { None, Legacy, Sdhcp };

struct AttachmentConfig {
  std::string segment;
  core::MacAddress mac;
  core::IpAddress ip;                 // zero allowed for DHCP clients
  std::optional<std::string> relay_server;
};

struct AdversaryConfig {
  bool inject{false};
  bool mitm{false};
  bool promiscuous{false};
  bool has_key{false};  // insider: provisioned with the victim association
  std::optional<agents::PoisonPlan> poison;
  std::optional<agents::SpoofPlan> spoof;        // victim_node resolved later
  std::optional<agents::InsiderPlan> insider;    // node ids resolved later
  std::string spoof_victim, insider_victim, insider_server;
};

struct NodeConfig {
  std::string name;
  sim::NodeKind kind{sim::NodeKind::Host};
  std::vector<AttachmentConfig> attachments;

  // server-only
  core::IpAddress pool_first, pool_last;
  core::SimTime lease_duration{core::SimTime::minutes(10)};
  core::SimTime offer_hold{core::SimTime::seconds(2)};
  bool force_active{false};
  std::map<core::IpAddress, core::MacAddress> mappings;

  // adversary-only
  AdversaryConfig adversary;
};

struct KeyEntry {
  std::string host;
  std::string server;
  core::Bytes key;  // 16 bytes
  core::Bytes rn;   // 16 bytes
  enum class Side { Both, HostOnly, ServerOnly } side{Side::Both};
};

struct TrafficEntry {
  core::SimTime at;
  std::string node;
  sim::AgentAction::Verb verb{sim::AgentAction::Verb::Resolve};
  core::IpAddress target;
  std::uint32_t size{0};
  int repeat{1};
  core::SimTime every{core::SimTime::ms(0)};
};

struct ScenarioConfig {
  std::string name{"scenario"};
  core::SimTime duration{core::SimTime::seconds(60)};
  std::uint64_t seed{1};
  core::TimerConfig timers;
  core::SimTime propagation_delay{core::SimTime::ms(1)};
  double drop_probability{0.0};
  std::map<std::string, double> per_segment_loss;
  bool gratuitous_learning{true};
  int arp_retry_limit{3};
  int suarp_retry_limit{3};
  int server_retransmit_limit{3};
  bool record_trace{true};

  ArpMode arp_mode{ArpMode::Legacy};
  agents::SuarpVariant suarp_variant{agents::SuarpVariant::Base};
  std::string arp_server;  // node name; defaulted during validation

  DhcpMode dhcp_mode{DhcpMode::None};
  agents::SdhcpVariant sdhcp_variant{agents::SdhcpVariant::Base};
  bool encrypt_ack{false};
  bool auto_renew{false};

  std::vector<std::string> segments;
  std::vector<NodeConfig> nodes;
  std::vector<KeyEntry> keys;
  bool provision_all{true};
  std::vector<TrafficEntry> traffic;

  /// Structural validation; fills defaults (arp server) and throws
  /// ConfigError with a human-readable diagnostic on any inconsistency.
  void validate();
};

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin);
ScenarioConfig load_scenario_file(const std::string& path);

/// Deterministic per-association key material (scenario identity is stable
/// across seeds; only event randomness varies with the seed).
core::Bytes derived_key(const core::MacAddress& host, const core::MacAddress& server);
core::Bytes derived_rn(const core::MacAddress& host, const core::MacAddress& server);

}  // namespace suarp::scenario
