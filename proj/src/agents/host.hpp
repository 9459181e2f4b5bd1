#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "agents/caches.hpp"
#include "agents/protocol_mics.hpp"
#include "crypto/keystore.hpp"
#include "sim/simulator.hpp"

namespace suarp::agents {

using core::Bytes;
using core::Frame;
using core::IpAddress;
using core::MacAddress;
using core::SimTime;

struct HostOptions {
  bool use_suarp{false};
  SuarpVariant suarp_variant{SuarpVariant::Base};
  bool static_registration{false};  // advertise (ip, mac) to the registration server at power-up

  enum class DhcpMode { None, Legacy, Secure };
  DhcpMode dhcp_mode{DhcpMode::None};
  SdhcpVariant sdhcp_variant{SdhcpVariant::Base};
  bool sdhcp_encrypt_ack{false};
  bool auto_renew{false};
  double renew_fraction{0.9};

  bool gratuitous_learning{true};
  int arp_retry_limit{3};
  int suarp_retry_limit{3};
  int dhcp_retry_limit{3};
  core::TimerConfig timers;

  int server_node{-1};  // DHCP+/DHCP- node (resolution queries and keying)
};

struct HostStats {
  std::uint64_t resolutions_completed{0};
  std::uint64_t resolutions_failed{0};
  std::uint64_t cache_hits{0};
  std::uint64_t unknown_mapping{0};
  std::uint64_t icp{0};
  std::uint64_t icf{0};
  std::uint64_t duplicates_reacked{0};
  std::uint64_t acks_piggybacked{0};
  std::uint64_t acks_standalone{0};
  std::uint64_t data_sent{0};
  std::uint64_t data_received{0};
  std::uint64_t leases_bound{0};
  std::uint64_t naks{0};
  std::uint64_t dhcp_failures{0};

  struct CacheInsert {
    IpAddress ip;
    MacAddress mac;
    SimTime at;
  };
  std::vector<CacheInsert> cache_insert_log;  // poisoning forensics
};

enum class ExchangePhase { AwaitingResponse, AwaitingPiggybackOpportunity, Done, Failed };
enum class Integrity { Pending, Icp, Icf };

/// End host: legacy ARP or S-UARP resolution, optional DHCP / S-DHCP
/// client, synthetic data traffic, static-mode registration.
class HostAgent : public sim::Agent {
 public:
  HostAgent(HostOptions options, crypto::KeyStore keystore)
      : opts_(std::move(options)), keystore_(std::move(keystore)),
        cache_(opts_.timers.t4) {}

  void on_start(sim::Ctx& ctx) override;
  void on_frame(sim::Ctx& ctx, const Frame& frame, int attachment) override;
  void on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t arg) override;
  void on_action(sim::Ctx& ctx, const sim::AgentAction& action) override;

  const ResolutionCache& cache() const { return cache_; }
  const HostStats& stats() const { return stats_; }
  const crypto::KeyStore& keystore() const { return keystore_; }
  std::optional<IpAddress> ip() const {
    return my_ip_.is_zero() ? std::nullopt : std::optional<IpAddress>(my_ip_);
  }
  MacAddress mac() const { return my_mac_; }
  bool lease_bound() const;

 private:
  struct QueuedData {
    IpAddress dst_ip;
    std::uint32_t size;
  };

  struct SuarpExchange {
    IpAddress target;
    ExchangePhase phase{ExchangePhase::AwaitingResponse};
    Integrity integrity{Integrity::Pending};
    SimTime request_sent_at;
    int retries_left{0};
    core::ProtocolMessage request;
    Bytes request_body;
    crypto::Nonce rn_used;
    bool fell_back{false};
    std::vector<QueuedData> waiting;
    std::uint32_t generation{0};  // guards this exchange's timers against successors
    // Filled at ICP:
    SimTime icp_at;
    core::SuarpResBody response;
    crypto::SessionKey sk_recovered;  // v2: unmasked from the response
    crypto::Nonce nrn_derived;        // v2: transcript-derived successor
    bool ack_sent{false};
    bool rolled{false};
  };

  struct ArpPending {
    int retries_left{0};
    std::vector<QueuedData> waiting;
    std::uint32_t generation{0};
  };

  /// Material for re-acknowledging duplicate responses, keyed (ip_b, t_s).
  /// Only a byte-identical retransmission counts as a duplicate; anything
  /// else with a recycled timestamp goes through full verification.
  struct CompletedExchange {
    SimTime icp_at;
    SuarpVariant variant;
    crypto::SessionKey sk;   // v2
    crypto::Nonce nrn;       // v1/v2
    Bytes accepted_bytes;    // canonical serialization of the accepted frame payload
  };

  struct DhcpClientState {
    enum class Phase { Idle, Discovering, Requesting, Bound, Failed } phase{Phase::Idle};
    std::uint32_t xid{0};
    int retries_left{0};
    IpAddress offered_ip, server_id;
    SimTime lease_duration;
    MacAddress server_mac;
    Bytes discover_body, offer_body, request_body;
    core::ProtocolMessage discover_msg, request_msg;  // retransmitted verbatim
    crypto::Nonce rn_used;
    crypto::SessionKey sk;  // v2
    crypto::Nonce nrn;      // v1 (received) / v2 (derived)
    SimTime granted_at;
  };

  // --- resolution entry points ---
  void resolve(sim::Ctx& ctx, const IpAddress& target);
  void send_data(sim::Ctx& ctx, const IpAddress& dst_ip, std::uint32_t size);
  void flush_waiting(sim::Ctx& ctx, const IpAddress& ip, const MacAddress& mac);

  // --- legacy arp ---
  void arp_resolve(sim::Ctx& ctx, const IpAddress& target);
  void send_arp_request(sim::Ctx& ctx, const IpAddress& target);
  void handle_arp_request(sim::Ctx& ctx, const core::ArpRequestBody& body);
  void handle_arp_reply(sim::Ctx& ctx, const core::ArpReplyBody& body);
  void cache_insert(sim::Ctx& ctx, const IpAddress& ip, const MacAddress& mac);

  // --- s-uarp host side ---
  void suarp_resolve(sim::Ctx& ctx, const IpAddress& target);
  void send_suarp_request(sim::Ctx& ctx, SuarpExchange& exchange);
  void handle_suarp_response(sim::Ctx& ctx, const Frame& frame);
  Integrity verify_suarp_response(sim::Ctx& ctx, SuarpExchange& exchange,
                                  const Frame& frame);
  core::SuarpAckBody build_ack_body(sim::Ctx& ctx, const CompletedExchange& material,
                                    std::vector<core::Mic>& mics_out);
  void send_standalone_ack(sim::Ctx& ctx, const IpAddress& target_ip,
                           const CompletedExchange& material);
  bool try_piggyback(sim::Ctx& ctx, core::DataBody& data);
  void commit_rollover_once(SuarpExchange& exchange, const crypto::Nonce& nrn);

  // --- dhcp client ---
  void dhcp_acquire(sim::Ctx& ctx);
  void dhcp_renew(sim::Ctx& ctx);
  void handle_dhcp_offer(sim::Ctx& ctx, const Frame& frame);
  void handle_dhcp_ack(sim::Ctx& ctx, const Frame& frame);
  void handle_dhcp_nak(sim::Ctx& ctx, const core::DhcpNakBody& body);

  // --- static mode ---
  void send_registration(sim::Ctx& ctx);
  void handle_advert(sim::Ctx& ctx, const Frame& frame);

  // --- plumbing ---
  void send_to_server(sim::Ctx& ctx, core::ProtocolMessage msg);
  crypto::AssociationId server_association() const {
    return {my_mac_, server_mac_};
  }
  bool server_known() const { return !server_mac_.is_zero(); }

  HostOptions opts_;
  crypto::KeyStore keystore_;
  ResolutionCache cache_;
  HostStats stats_;

  MacAddress my_mac_;
  IpAddress my_ip_;  // zero until static assignment or lease bind
  int my_segment_{-1};

  MacAddress server_mac_;
  IpAddress server_ip_;
  bool server_local_{true};
  MacAddress gateway_mac_;
  IpAddress gateway_ip_;

  std::map<IpAddress, std::pair<int, std::vector<QueuedData>>> arp_pending_;
  std::map<IpAddress, SuarpExchange> suarp_pending_;
  std::map<std::pair<IpAddress, std::uint64_t>, CompletedExchange> completed_;
  DhcpClientState dhcp_;
  bool registered_{false};
  std::uint32_t next_xid_{1};
};

}  // namespace suarp::agents
