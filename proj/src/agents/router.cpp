#include "agents/router.hpp"

#include "core/message.hpp"

namespace suarp::agents {

using core::Frame;

void RouterAgent::on_frame(sim::Ctx& ctx, const Frame& frame, int attachment) {
  const auto& self = ctx.topo().node(ctx.self());
  const auto& att = self.attachments.at(static_cast<std::size_t>(attachment));

  if (frame.dst_mac.is_broadcast()) {
    if (att.relay && is_relayable(frame.payload.kind()))
      relay_broadcast(ctx, frame, attachment);
    return;  // broadcast containment: never re-broadcast across segments
  }
  if (!(frame.dst_mac == att.mac)) return;
  if (!frame.route_to) return;  // addressed to the router itself; nothing to do

  // Terminal hop: the routed target is one of our own attachment IPs, so
  // hand the payload off on that segment.
  for (std::size_t a = 0; a < self.attachments.size(); ++a) {
    if (self.attachments[a].ip == *frame.route_to) {
      deliver_local(ctx, frame, static_cast<int>(a));
      return;
    }
  }
  forward_routed(ctx, frame);
}

void RouterAgent::relay_broadcast(sim::Ctx& ctx, const Frame& frame,
                                  int attachment) {
  const auto& self = ctx.topo().node(ctx.self());
  const auto& att = self.attachments.at(static_cast<std::size_t>(attachment));

  const auto& server = ctx.topo().node(att.relay_server);
  const auto& server_att = server.attachments.at(0);
  auto hop = ctx.topo().next_hop(ctx.self(), server_att.segment);
  if (!hop) {
    ctx.log_state("relay_no_route", server.name);
    return;
  }
  core::MacAddress next =
      hop->local ? server_att.mac : hop->next_mac;
  ctx.log_state("relay_forward", core::msg_kind_name(frame.payload.kind()));
  ctx.send_on(hop->attachment,
              Frame::make(frame.src_mac, next, frame.payload, ctx.now(),
                          server_att.ip, att.ip));
}

void RouterAgent::forward_routed(sim::Ctx& ctx, const Frame& frame) {
  auto target_segment = ctx.topo().segment_of_ip(*frame.route_to);
  if (!target_segment) {
    ctx.log_state("no_route", frame.route_to->to_string());
    return;
  }
  auto hop = ctx.topo().next_hop(ctx.self(), *target_segment);
  if (!hop) {
    ctx.log_state("no_route", frame.route_to->to_string());
    return;
  }
  core::MacAddress next = hop->next_mac;
  if (hop->local) {
    auto owner = ctx.topo().find_by_ip(*frame.route_to);
    if (!owner) {
      ctx.log_state("no_route", frame.route_to->to_string());
      return;
    }
    next = ctx.topo()
               .node(owner->first)
               .attachments.at(static_cast<std::size_t>(owner->second))
               .mac;
  }
  ctx.send_on(hop->attachment,
              Frame::make(frame.src_mac, next, frame.payload, ctx.now(),
                          frame.route_to, frame.reply_via));
}

void RouterAgent::deliver_local(sim::Ctx& ctx, const Frame& frame,
                                int attachment) {
  // Final MAC comes from the payload: responses name the client they are
  // answering. NAKs stay broadcast on the client's segment.
  core::MacAddress dst;
  bool broadcast = false;
  switch (frame.payload.kind()) {
    case core::MsgKind::SuarpRes:
      dst = std::get<core::SuarpResBody>(frame.payload.body).mac_a;
      break;
    case core::MsgKind::DhcpOffer:
      dst = std::get<core::DhcpOfferBody>(frame.payload.body).client_mac;
      break;
    case core::MsgKind::DhcpAck:
      dst = std::get<core::DhcpAckBody>(frame.payload.body).client_mac;
      break;
    case core::MsgKind::DhcpNak:
      broadcast = true;
      break;
    case core::MsgKind::Data:
      // Routed synthetic traffic terminates here only if the target owns a
      // static address on this segment.
      if (auto owner = ctx.topo().find_by_ip(
              std::get<core::DataBody>(frame.payload.body).dst_ip)) {
        dst = ctx.topo()
                  .node(owner->first)
                  .attachments.at(static_cast<std::size_t>(owner->second))
                  .mac;
      } else {
        ctx.log_state("no_route", "data handoff");
        return;
      }
      break;
    default:
      ctx.log_state("no_route", "unroutable payload");
      return;
  }
  ctx.send_on(attachment,
              Frame::make(frame.src_mac,
                          broadcast ? core::MacAddress::broadcast() : dst,
                          frame.payload, ctx.now()));
}

}  // namespace suarp::agents
