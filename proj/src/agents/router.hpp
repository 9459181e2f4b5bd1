#pragma once

#include "sim/simulator.hpp"

namespace suarp::agents {

/// Router between segments. Broadcasts never cross it; the only traffic it
/// moves is (a) client DHCP broadcasts re-emitted unicast toward the
/// configured server by a relay-flagged attachment and (b) unicast frames
/// carrying explicit routing metadata, forwarded hop by hop. Forwarding
/// preserves the original source MAC (bridge semantics).
class RouterAgent : public sim::Agent {
 public:
  void on_frame(sim::Ctx& ctx, const core::Frame& frame, int attachment) override;

 private:
  void relay_broadcast(sim::Ctx& ctx, const core::Frame& frame, int attachment);
  void forward_routed(sim::Ctx& ctx, const core::Frame& frame);
  void deliver_local(sim::Ctx& ctx, const core::Frame& frame, int attachment);

  bool is_relayable(core::MsgKind kind) const {
    return kind == core::MsgKind::DhcpDiscover ||
           kind == core::MsgKind::DhcpRequest ||
           kind == core::MsgKind::DhcpDecline;
  }
};

}  // namespace suarp::agents
