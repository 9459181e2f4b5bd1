#pragma once

#include <optional>
#include <vector>

#include "agents/protocol_mics.hpp"
#include "crypto/keystore.hpp"
#include "sim/simulator.hpp"

namespace suarp::agents {

/// Forged resolution traffic against a set of victims.
struct PoisonPlan {
  struct Pair {
    core::IpAddress victim_ip;
    core::IpAddress impersonated_ip;
  };
  std::vector<Pair> pairs;
  core::SimTime cadence{core::SimTime::ms(100)};
  int rounds{1};
  int forged_per_round{1};
  bool forge_requests{true};  // legacy: poison via broadcast requests too
  bool against_suarp{false};
  SuarpVariant suarp_variant{SuarpVariant::Base};
};

/// Network entry under a cloned hardware address.
struct SpoofPlan {
  core::MacAddress cloned_mac;
  int victim_node{-1};
  bool dos_first{true};  // scripted victim shutdown before taking its place
  int attempts{1};
  core::SimTime spacing{core::SimTime::ms(150)};
  bool against_sdhcp{false};
  SdhcpVariant sdhcp_variant{SdhcpVariant::Base};
};

/// Acknowledgment forgery by an attacker who holds the shared key (and can
/// sniff the exchange) but not the rolling nonce.
struct InsiderPlan {
  int victim_node{-1};
  int server_node{-1};
  int forgeries_per_exchange{100};
};

/// Verbatim re-injection of a sniffed response some time later.
struct ReplayPlan {
  core::SimTime replay_at;
  int copies{1};
};

struct AdversaryOptions {
  bool inject{false};       // may emit frames with arbitrary source MAC
  bool mitm{false};         // re-forward frames addressed to us
  bool promiscuous{false};  // wireless-style sniffing of all segment traffic
  std::optional<PoisonPlan> poison;
  std::optional<SpoofPlan> spoof;
  std::optional<InsiderPlan> insider;
  std::optional<ReplayPlan> replay;
};

struct AdversaryCounters {
  std::uint64_t forged_sent{0};
  std::uint64_t intercepted{0};
  std::uint64_t forwarded{0};
  std::uint64_t spoof_attempts{0};
  std::uint64_t leases_obtained{0};
  std::uint64_t insider_forgeries{0};
  std::uint64_t replayed{0};
  std::uint64_t frames_as_victim{0};
};

/// Scripted attacker. Everything it does rides the ordinary event loop; the
/// only privileges are the tap capabilities in its options. It holds a key
/// store only in the insider scenario.
class AdversaryAgent : public sim::Agent {
 public:
  AdversaryAgent(AdversaryOptions options, crypto::KeyStore keystore = {})
      : opts_(std::move(options)), keystore_(std::move(keystore)) {}

  void on_start(sim::Ctx& ctx) override;
  void on_frame(sim::Ctx& ctx, const core::Frame& frame, int attachment) override;
  void on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t arg) override;
  void on_action(sim::Ctx& ctx, const sim::AgentAction& action) override;

  const AdversaryCounters& counters() const { return counters_; }

 private:
  void poison_round(sim::Ctx& ctx);
  void spoof_attempt(sim::Ctx& ctx);
  void handle_offer(sim::Ctx& ctx, const core::Frame& frame);
  void observe_for_insider(sim::Ctx& ctx, const core::Frame& frame);
  core::Mic random_mic(sim::Ctx& ctx, core::MicScheme scheme);

  AdversaryOptions opts_;
  crypto::KeyStore keystore_;
  AdversaryCounters counters_;

  core::MacAddress my_mac_;
  core::IpAddress my_ip_;
  int rounds_done_{0};
  int attempts_done_{0};
  std::uint32_t next_xid_{0xad000001};
  // insider observation state
  core::Bytes observed_req_body_;
  core::MacAddress victim_mac_, server_mac_;
  bool insider_fired_{false};
  std::optional<core::Frame> recorded_response_;
};

}  // namespace suarp::agents
