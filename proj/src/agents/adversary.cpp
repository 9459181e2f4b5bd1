#include "agents/adversary.hpp"

namespace suarp::agents {

namespace {

enum AdversaryTimer : std::uint32_t {
  kPoisonRound = 1,
  kSpoofAttempt = 2,
  kReplay = 3,
};

}  // namespace

void AdversaryAgent::on_start(sim::Ctx& ctx) {
  const auto& att = ctx.topo().node(ctx.self()).attachments.at(0);
  my_mac_ = att.mac;
  my_ip_ = att.ip;
  if (opts_.promiscuous) {
    // Ctx has no promiscuous setter by design; reach the engine directly.
    ctx.set_promiscuous();
  }
  if (opts_.insider) {
    victim_mac_ = ctx.topo()
                      .node(opts_.insider->victim_node)
                      .attachments.at(0)
                      .mac;
    server_mac_ = ctx.topo()
                      .node(opts_.insider->server_node)
                      .attachments.at(0)
                      .mac;
  }
  if (opts_.replay)
    ctx.schedule_timer(opts_.replay->replay_at, kReplay, 0);
}

void AdversaryAgent::on_action(sim::Ctx& ctx, const sim::AgentAction& action) {
  if (action.verb != sim::AgentAction::Verb::AdversaryKick) return;
  if (opts_.spoof && opts_.spoof->dos_first && opts_.spoof->victim_node >= 0) {
    ctx.detach_node(opts_.spoof->victim_node);
    ctx.log_state("victim_downed",
                  ctx.topo().node(opts_.spoof->victim_node).name);
  }
  if (opts_.spoof) {
    ctx.install_mac_alias(opts_.spoof->cloned_mac);
    spoof_attempt(ctx);
  }
  if (opts_.poison) poison_round(ctx);
}

void AdversaryAgent::on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t) {
  if (tag == kPoisonRound) poison_round(ctx);
  if (tag == kSpoofAttempt) spoof_attempt(ctx);
  if (tag == kReplay && recorded_response_) {
    for (int i = 0; i < opts_.replay->copies; ++i) {
      ctx.send(*recorded_response_);
      ++counters_.replayed;
    }
    ctx.log_state("replayed", std::to_string(opts_.replay->copies));
  }
}

core::Mic AdversaryAgent::random_mic(sim::Ctx& ctx, core::MicScheme scheme) {
  return core::Mic{scheme,
                   core::random_bytes(ctx.rng(), core::mic_length(scheme))};
}

void AdversaryAgent::poison_round(sim::Ctx& ctx) {
  const PoisonPlan& plan = *opts_.poison;
  if (rounds_done_ >= plan.rounds) return;
  ++rounds_done_;

  for (const auto& pair : plan.pairs) {
    auto victim = ctx.topo().find_by_ip(pair.victim_ip);
    if (!victim) continue;
    core::MacAddress victim_mac = ctx.topo()
                                      .node(victim->first)
                                      .attachments.at(static_cast<std::size_t>(victim->second))
                                      .mac;
    for (int i = 0; i < plan.forged_per_round; ++i) {
      if (!plan.against_suarp) {
        // Forged reply: the impersonated address now "belongs" to us.
        core::ArpReplyBody reply{pair.impersonated_ip, my_mac_, pair.victim_ip,
                                 victim_mac};
        ctx.send(core::Frame::make(my_mac_, victim_mac,
                                   core::make_message(reply), ctx.now()));
        ++counters_.forged_sent;
        if (plan.forge_requests) {
          core::ArpRequestBody request{pair.impersonated_ip, my_mac_,
                                       pair.victim_ip};
          ctx.send(core::Frame::make(my_mac_, core::MacAddress::broadcast(),
                                     core::make_message(request), ctx.now()));
          ++counters_.forged_sent;
        }
      } else {
        core::SuarpResBody res{pair.victim_ip, victim_mac, pair.impersonated_ip,
                               my_mac_, ctx.now()};
        core::ProtocolMessage msg = core::make_message(res);
        switch (plan.suarp_variant) {
          case SuarpVariant::Base:
            msg.mics = {random_mic(ctx, core::MicScheme::CbcResidue)};
            break;
          case SuarpVariant::AltV1:
            msg.mics = {random_mic(ctx, core::MicScheme::KeyedHash)};
            break;
          case SuarpVariant::AltV2:
            msg.masked = {core::random_bytes(ctx.rng(), crypto::kSessionKeyLen)};
            msg.mics = {random_mic(ctx, core::MicScheme::KeyedHash)};
            break;
        }
        ctx.send(core::Frame::make(my_mac_, victim_mac, std::move(msg), ctx.now()));
        ++counters_.forged_sent;
      }
    }
  }
  if (rounds_done_ < plan.rounds)
    ctx.schedule_timer(plan.cadence, kPoisonRound, 0);
}

void AdversaryAgent::spoof_attempt(sim::Ctx& ctx) {
  const SpoofPlan& plan = *opts_.spoof;
  if (attempts_done_ >= plan.attempts) return;
  ++attempts_done_;
  ++counters_.spoof_attempts;

  core::DhcpDiscoverBody discover{next_xid_++, plan.cloned_mac};
  core::ProtocolMessage msg = core::make_message(discover);
  if (plan.against_sdhcp && plan.sdhcp_variant != SdhcpVariant::Base)
    msg.mics = {random_mic(ctx, core::MicScheme::KeyedHash)};  // keyless guess
  ctx.send(core::Frame::make(plan.cloned_mac, core::MacAddress::broadcast(),
                             std::move(msg), ctx.now()));
  ++counters_.frames_as_victim;

  if (attempts_done_ < plan.attempts)
    ctx.schedule_timer(plan.spacing, kSpoofAttempt, 0);
}

void AdversaryAgent::handle_offer(sim::Ctx& ctx, const core::Frame& frame) {
  const SpoofPlan& plan = *opts_.spoof;
  const auto& offer = std::get<core::DhcpOfferBody>(frame.payload.body);
  if (!(offer.client_mac == plan.cloned_mac)) return;

  core::DhcpRequestBody request{offer.xid, plan.cloned_mac, offer.offered_ip,
                                offer.server_id};
  core::ProtocolMessage msg = core::make_message(request);
  if (plan.against_sdhcp) {
    switch (plan.sdhcp_variant) {
      case SdhcpVariant::Base:
        msg.mics = {random_mic(ctx, core::MicScheme::CbcResidue),
                    random_mic(ctx, core::MicScheme::CbcResidue)};
        break;
      case SdhcpVariant::AltV1:
        msg.mics = {random_mic(ctx, core::MicScheme::KeyedHash)};
        break;
      case SdhcpVariant::AltV2:
        msg.masked = {core::random_bytes(ctx.rng(), crypto::kSessionKeyLen)};
        msg.mics = {random_mic(ctx, core::MicScheme::KeyedHash)};
        break;
    }
  }
  ctx.send(core::Frame::make(plan.cloned_mac, core::MacAddress::broadcast(),
                             std::move(msg), ctx.now()));
  ++counters_.frames_as_victim;
}

void AdversaryAgent::observe_for_insider(sim::Ctx& ctx, const core::Frame& frame) {
  const InsiderPlan& plan = *opts_.insider;
  if (frame.payload.kind() == core::MsgKind::SuarpReq &&
      frame.src_mac == victim_mac_) {
    observed_req_body_ = core::serialize_body(frame.payload.body);
    return;
  }
  if (insider_fired_ || frame.payload.kind() != core::MsgKind::SuarpRes)
    return;
  if (!(frame.dst_mac == victim_mac_) || observed_req_body_.empty()) return;
  if (frame.payload.masked.size() != 1) return;

  // Knowing the shared key and having sniffed the exchange, the session key
  // falls out of the masked field. The rolling nonce does not.
  crypto::AssociationId assoc_id{victim_mac_, server_mac_};
  if (!keystore_.has(assoc_id)) return;
  const auto& assoc = keystore_.get(assoc_id);
  core::Bytes res_body = core::serialize_body(frame.payload.body);
  core::Mic mic2 = chain_mic(assoc.shared_key, observed_req_body_, res_body);
  crypto::SessionKey sk = crypto::xor_unmask(frame.payload.masked[0], mic2);

  insider_fired_ = true;
  for (int i = 0; i < plan.forgeries_per_exchange; ++i) {
    core::SuarpAckBody ack;
    ack.t_a = ctx.now();
    core::Bytes body_bytes = core::serialize_body(core::MessageBody{ack});
    crypto::Nonce guess{core::random_bytes(ctx.rng(), crypto::kNonceLen)};
    core::ProtocolMessage msg =
        core::make_message(ack, {ack_mic(sk, body_bytes, guess)});
    ctx.send(core::Frame::make(victim_mac_, server_mac_, std::move(msg), ctx.now()));
    ++counters_.insider_forgeries;
  }
  ctx.log_state("insider_forgeries_sent",
                std::to_string(plan.forgeries_per_exchange));
}

void AdversaryAgent::on_frame(sim::Ctx& ctx, const core::Frame& frame, int) {
  if (opts_.insider && opts_.promiscuous) observe_for_insider(ctx, frame);
  if (opts_.replay && !recorded_response_ &&
      frame.payload.kind() == core::MsgKind::SuarpRes)
    recorded_response_ = frame;

  if (opts_.spoof && frame.payload.kind() == core::MsgKind::DhcpOffer)
    handle_offer(ctx, frame);
  if (opts_.spoof && frame.payload.kind() == core::MsgKind::DhcpAck) {
    const auto& ack = std::get<core::DhcpAckBody>(frame.payload.body);
    if (ack.client_mac == opts_.spoof->cloned_mac) {
      ++counters_.leases_obtained;
      ctx.log_state("lease_obtained", ack.leased_ip.to_string());
    }
  }

  // Man in the middle: keep a copy, pass the frame along to where it was
  // really going.
  if (opts_.mitm && frame.payload.kind() == core::MsgKind::Data &&
      !frame.dst_mac.is_broadcast()) {
    const auto& data = std::get<core::DataBody>(frame.payload.body);
    if (!(data.dst_ip == my_ip_)) {
      ++counters_.intercepted;
      auto owner = ctx.topo().find_by_ip(data.dst_ip);
      if (owner) {
        core::MacAddress real = ctx.topo()
                                    .node(owner->first)
                                    .attachments.at(static_cast<std::size_t>(owner->second))
                                    .mac;
        ctx.send(core::Frame::make(my_mac_, real, frame.payload, ctx.now()));
        ++counters_.forwarded;
      }
    }
  }
}

}  // namespace suarp::agents
