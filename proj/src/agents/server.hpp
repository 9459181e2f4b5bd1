#pragma once

#include <map>
#include <set>
#include <vector>

#include "agents/caches.hpp"
#include "agents/protocol_mics.hpp"
#include "crypto/keystore.hpp"
#include "sim/simulator.hpp"

namespace suarp::agents {

enum class ServerRole {
  Legacy,  // plain DHCP only
  Plus,    // DHCP+ : leases addresses, answers unicast resolution, secure DHCP
  Minus,   // DHCP- : records registrations, answers resolution, no leasing
};

struct ServerOptions {
  ServerRole role{ServerRole::Plus};
  bool passive{false};  // legacy server that yielded to a DHCP+ peer

  core::IpAddress pool_first, pool_last;
  core::SimTime lease_duration{core::SimTime::minutes(10)};
  core::SimTime offer_hold{core::SimTime::seconds(2)};

  bool secure_dhcp{false};
  SdhcpVariant sdhcp_variant{SdhcpVariant::Base};
  bool encrypt_ack{false};  // optional confidentiality on the final ACK

  SuarpVariant suarp_variant{SuarpVariant::Base};
  int retransmit_limit{3};
  core::TimerConfig timers;
  core::SimTime advert_interval{core::SimTime::seconds(60)};

  // Mappings known without leasing (administratively configured).
  std::map<core::IpAddress, core::MacAddress> static_mappings;
};

struct ServerStats {
  std::uint64_t suarp_answered{0};
  std::uint64_t suarp_unknown{0};
  std::uint64_t suarp_rejected{0};
  std::uint64_t acks_accepted{0};
  std::uint64_t acks_rejected{0};
  std::uint64_t retransmits{0};
  std::uint64_t offers{0};
  std::uint64_t binds{0};
  std::uint64_t naks{0};
  std::uint64_t reclaims{0};
  std::uint64_t rejected_requests{0};
  std::uint64_t registrations{0};
};

/// Which servers answer a DISCOVER in a mixed deployment: if any DHCP+
/// server shares the broadcast domain, legacy servers go passive and stay
/// passive (there is no automatic failback).
struct ServerPresence {
  int node{-1};
  ServerRole role{ServerRole::Legacy};
  int segment{-1};
  bool force_active{false};
};
std::set<int> coexistence_arbitrate(const std::vector<ServerPresence>& servers);

class ServerAgent : public sim::Agent {
 public:
  ServerAgent(ServerOptions options, crypto::KeyStore keystore)
      : opts_(std::move(options)), keystore_(std::move(keystore)),
        pool_(opts_.pool_first, opts_.pool_last, opts_.lease_duration,
              opts_.offer_hold) {}

  void on_start(sim::Ctx& ctx) override;
  void on_frame(sim::Ctx& ctx, const core::Frame& frame, int attachment) override;
  void on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t arg) override;

  const LeasePool& pool() const { return pool_; }
  const std::map<core::IpAddress, core::MacAddress>& registrations() const {
    return registrations_;
  }
  const ServerStats& stats() const { return stats_; }
  const crypto::KeyStore& keystore() const { return keystore_; }
  bool passive() const { return opts_.passive; }
  void set_passive(bool passive) { opts_.passive = passive; }

 private:
  struct PendingResponse {
    core::Frame response;  // retransmitted verbatim until acknowledged
    core::SimTime t_s;
    int retransmits_left{0};
    SuarpVariant variant{SuarpVariant::Base};
    crypto::Nonce rn_used;
    crypto::SessionKey sk;  // v2
    crypto::Nonce nrn;      // v2
    std::uint16_t generation{0};  // invalidates retransmit timers of superseded exchanges
  };

  struct SdhcpContext {
    core::Bytes discover_body, offer_body;
    crypto::Nonce rn_used;
    crypto::SessionKey sk;  // v2
    crypto::Nonce nrn;      // v2
  };

  void handle_suarp_request(sim::Ctx& ctx, const core::Frame& frame);
  void handle_ack(sim::Ctx& ctx, const core::MacAddress& host,
                  const core::SuarpAckBody& ack, const std::vector<core::Mic>& mics);
  void handle_discover(sim::Ctx& ctx, const core::Frame& frame);
  void handle_request(sim::Ctx& ctx, const core::Frame& frame);
  void handle_decline(sim::Ctx& ctx, const core::DhcpDeclineBody& body);
  void handle_registration(sim::Ctx& ctx, const core::Frame& frame);

  std::optional<core::MacAddress> mapping_lookup(const core::IpAddress& ip,
                                                 core::SimTime now) const;
  /// Unicast back to a client, hairpinning through the relay that carried
  /// the client's broadcast when there is one.
  void send_client(sim::Ctx& ctx, core::ProtocolMessage msg,
                   const core::MacAddress& client_mac,
                   const std::optional<core::IpAddress>& reply_via,
                   bool broadcast = false);
  void send_dhcp_ack(sim::Ctx& ctx, const Lease& lease, std::uint32_t xid,
                     const core::MacAddress& client_mac,
                     const std::optional<core::IpAddress>& reply_via);

  ServerOptions opts_;
  crypto::KeyStore keystore_;
  LeasePool pool_;
  ServerStats stats_;
  std::map<core::IpAddress, core::MacAddress> registrations_;
  std::map<core::MacAddress, PendingResponse> pending_;
  std::map<core::MacAddress, SdhcpContext> sdhcp_;
  std::uint16_t next_generation_{1};

  core::MacAddress my_mac_;
  core::IpAddress my_ip_;
  int my_segment_{-1};
};

}  // namespace suarp::agents
