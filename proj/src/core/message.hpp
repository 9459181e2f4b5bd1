#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/address.hpp"
#include "core/bytes.hpp"
#include "core/mic.hpp"
#include "core/sim_time.hpp"

namespace suarp::core {

// Wire format version; bumped on any change to the canonical layout.
constexpr std::uint8_t kWireVersion = 1;

enum class MsgKind : std::uint8_t {
  ArpRequest = 1,
  ArpReply = 2,
  SuarpReq = 3,
  SuarpRes = 4,
  SuarpAck = 5,
  DhcpDiscover = 6,
  DhcpOffer = 7,
  DhcpRequest = 8,
  DhcpAck = 9,
  DhcpNak = 10,
  DhcpDecline = 11,
  RegistrationAdvert = 12,
  Data = 13,
};

const char* msg_kind_name(MsgKind kind);

struct ArpRequestBody {
  IpAddress sender_ip;
  MacAddress sender_mac;
  IpAddress target_ip;
  bool operator==(const ArpRequestBody&) const = default;
};

struct ArpReplyBody {
  IpAddress sender_ip;   // the owner of the queried IP
  MacAddress sender_mac; // ... and its MAC (what the requester caches)
  IpAddress target_ip;   // the original requester
  MacAddress target_mac;
  bool operator==(const ArpReplyBody&) const = default;
};

struct SuarpReqBody {
  IpAddress ip_a;
  MacAddress mac_a;
  IpAddress ip_b;
  bool operator==(const SuarpReqBody&) const = default;
};

struct SuarpResBody {
  IpAddress ip_a;
  MacAddress mac_a;
  IpAddress ip_b;
  MacAddress mac_b;  // zero MAC marks an authenticated unknown-mapping answer
  SimTime t_s;
  bool operator==(const SuarpResBody&) const = default;
};

/// Acknowledgment step. Transport depends on the protocol variant:
/// encrypted variants carry `cipher` (the whole ACK encrypted under the
/// shared key) and zero out the plain fields; the MIC-only variant sends
/// t_a in clear with the MIC in the message's mic list.
struct SuarpAckBody {
  SimTime t_a;
  Bytes nrn;
  Bytes cipher;
  bool operator==(const SuarpAckBody&) const = default;
};

struct DhcpDiscoverBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  bool operator==(const DhcpDiscoverBody&) const = default;
};

struct DhcpOfferBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  IpAddress offered_ip;
  SimTime lease_duration;
  IpAddress server_id;
  bool operator==(const DhcpOfferBody&) const = default;
};

struct DhcpRequestBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  IpAddress requested_ip;
  IpAddress server_id;  // the selected server; others reclaim their offers
  bool operator==(const DhcpRequestBody&) const = default;
};

struct DhcpAckBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  IpAddress leased_ip;
  SimTime lease_duration;
  IpAddress server_id;
  SimTime t_s;   // server timestamp, freshness-checked by secure variants
  Bytes cipher;  // optional encrypted payload (secure ACK confidentiality)
  bool operator==(const DhcpAckBody&) const = default;
};

struct DhcpNakBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  IpAddress server_id;
  bool operator==(const DhcpNakBody&) const = default;
};

struct DhcpDeclineBody {
  std::uint32_t xid{};
  MacAddress client_mac;
  IpAddress declined_ip;
  IpAddress server_id;
  bool operator==(const DhcpDeclineBody&) const = default;
};

/// Two roles: a host registration (cipher = encrypted ip|mac, plain fields
/// zero) or a server identity broadcast (plain fields set, cipher empty).
struct RegistrationAdvertBody {
  IpAddress ip;
  MacAddress mac;
  Bytes cipher;
  bool operator==(const RegistrationAdvertBody&) const = default;
};

/// Synthetic application traffic. Carries an optional piggybacked ACK so a
/// pending acknowledgment can ride an outbound data frame inside window t2.
struct PiggybackAck {
  SuarpAckBody ack;
  std::vector<Mic> mics;
  bool operator==(const PiggybackAck&) const = default;
};

struct DataBody {
  IpAddress src_ip;
  IpAddress dst_ip;
  std::uint16_t payload_len{};
  std::optional<PiggybackAck> ack;
  bool operator==(const DataBody&) const = default;
};

using MessageBody =
    std::variant<ArpRequestBody, ArpReplyBody, SuarpReqBody, SuarpResBody,
                 SuarpAckBody, DhcpDiscoverBody, DhcpOfferBody,
                 DhcpRequestBody, DhcpAckBody, DhcpNakBody, DhcpDeclineBody,
                 RegistrationAdvertBody, DataBody>;

/// Tagged union of every protocol message plus its integrity material.
/// Canonical serialization is the identity for equality: two messages are
/// equal iff their serializations are byte-equal.
struct ProtocolMessage {
  MessageBody body;
  std::vector<Mic> mics;      // 0..3, schema fixed per protocol variant
  std::vector<Bytes> masked;  // XOR-masked / encrypted opaque strings

  MsgKind kind() const;
  bool operator==(const ProtocolMessage&) const = default;
};

constexpr std::size_t kMaxMics = 3;

/// Canonical, deterministic encoding. Same message -> same bytes, always;
/// MICs are computed over these bytes so both parties must agree on them.
Bytes serialize_message(const ProtocolMessage& msg);

/// Exact inverse of serialize_message on its image; throws MalformedMessage
/// for anything else (unknown tag, truncation, trailing bytes, bad sizes).
ProtocolMessage parse_message(ByteView bytes);

/// Canonical bytes of the body alone (no mic/masked sections). This is the
/// "message" input of every MIC formula.
Bytes serialize_body(const MessageBody& body);

// Convenience constructors.
ProtocolMessage make_message(MessageBody body, std::vector<Mic> mics = {},
                             std::vector<Bytes> masked = {});

}  // namespace suarp::core
