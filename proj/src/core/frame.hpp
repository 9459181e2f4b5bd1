#pragma once

#include <cstdint>
#include <optional>

#include "core/address.hpp"
#include "core/message.hpp"
#include "core/sim_time.hpp"

namespace suarp::core {

// Link-layer envelope overhead added to every serialized payload
// (header + FCS of the simulated medium).
constexpr std::uint32_t kLinkHeaderBytes = 18;

/// Simulated link-layer envelope; the unit of traffic accounting.
/// Treat as immutable once built via make().
struct Frame {
  MacAddress src_mac;
  MacAddress dst_mac;  // may be broadcast
  ProtocolMessage payload;
  std::uint32_t wire_size{0};  // serialized payload length + kLinkHeaderBytes
  SimTime sent_at;

  // Inter-segment forwarding metadata. route_to names the final IP the
  // frame is traveling toward; reply_via is the relay/gateway attachment
  // IP a response should be routed back through.
  std::optional<IpAddress> route_to;
  std::optional<IpAddress> reply_via;

  static Frame make(MacAddress src, MacAddress dst, ProtocolMessage payload,
                    SimTime sent_at,
                    std::optional<IpAddress> route_to = std::nullopt,
                    std::optional<IpAddress> reply_via = std::nullopt) {
    Frame f;
    f.src_mac = src;
    f.dst_mac = dst;
    f.wire_size =
        static_cast<std::uint32_t>(serialize_message(payload).size()) +
        kLinkHeaderBytes;
    f.payload = std::move(payload);
    f.sent_at = sent_at;
    f.route_to = route_to;
    f.reply_via = reply_via;
    return f;
  }
};

}  // namespace suarp::core
