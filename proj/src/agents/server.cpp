#include "agents/server.hpp"

namespace suarp::agents {

namespace {

enum ServerTimer : std::uint32_t {
  kRetransmit = 1,  // arg = packed host MAC
  kAdvert = 2,
};

// Timer argument: 48-bit host MAC plus the pending exchange's generation so
// that a superseded exchange's timer cannot touch its successor.
std::uint64_t pack_mac(const core::MacAddress& mac, std::uint16_t generation) {
  std::uint64_t v = generation;
  for (auto b : mac.octets) v = v << 8 | b;
  return v;
}

core::MacAddress unpack_mac(std::uint64_t v) {
  core::MacAddress mac;
  for (int i = 5; i >= 0; --i) {
    mac.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
  return mac;
}

std::uint16_t unpack_generation(std::uint64_t v) {
  return static_cast<std::uint16_t>(v >> 48);
}

core::Bytes ack_inner(const core::IpAddress& leased, core::SimTime duration,
                      const core::IpAddress& server_id, core::SimTime t_s,
                      const std::optional<crypto::Nonce>& nrn) {
  core::ByteWriter w;
  w.raw(leased.octets);
  w.u64(duration.ticks);
  w.raw(server_id.octets);
  w.u64(t_s.ticks);
  if (nrn) w.raw(nrn->bytes);
  return w.take();
}

}  // namespace

std::set<int> coexistence_arbitrate(const std::vector<ServerPresence>& servers) {
  std::set<int> responders;
  for (const auto& server : servers) {
    if (server.role != ServerRole::Legacy || server.force_active) {
      if (server.role != ServerRole::Minus) responders.insert(server.node);
      continue;
    }
    bool plus_present = false;
    for (const auto& other : servers)
      if (other.role == ServerRole::Plus && other.segment == server.segment)
        plus_present = true;
    if (!plus_present) responders.insert(server.node);
  }
  return responders;
}

void ServerAgent::on_start(sim::Ctx& ctx) {
  const auto& att = ctx.topo().node(ctx.self()).attachments.at(0);
  my_mac_ = att.mac;
  my_ip_ = att.ip;
  my_segment_ = att.segment;

  if (opts_.role == ServerRole::Minus) {
    // Advertise identity so statically addressed hosts learn whom to query.
    core::RegistrationAdvertBody advert{my_ip_, my_mac_, {}};
    ctx.send(core::Frame::make(my_mac_, core::MacAddress::broadcast(),
                               core::make_message(advert), ctx.now()));
    ctx.schedule_timer(opts_.advert_interval, kAdvert, 0);
  }
}

void ServerAgent::on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t arg) {
  switch (tag) {
    case kRetransmit: {
      core::MacAddress host = unpack_mac(arg);
      auto it = pending_.find(host);
      if (it == pending_.end()) return;  // acknowledged
      if (it->second.generation != unpack_generation(arg)) return;  // superseded
      if (it->second.retransmits_left <= 0) {
        ctx.log_state("retransmit_exhausted", host.to_string());
        pending_.erase(it);
        return;
      }
      --it->second.retransmits_left;
      ++stats_.retransmits;
      ctx.send(it->second.response);
      ctx.schedule_timer(opts_.timers.t3, kRetransmit, arg);
      return;
    }
    case kAdvert: {
      core::RegistrationAdvertBody advert{my_ip_, my_mac_, {}};
      ctx.send(core::Frame::make(my_mac_, core::MacAddress::broadcast(),
                                 core::make_message(advert), ctx.now()));
      ctx.schedule_timer(opts_.advert_interval, kAdvert, 0);
      return;
    }
    default:
      return;
  }
}

void ServerAgent::on_frame(sim::Ctx& ctx, const core::Frame& frame, int) {
  switch (frame.payload.kind()) {
    case core::MsgKind::SuarpReq:
      if (opts_.role != ServerRole::Legacy) handle_suarp_request(ctx, frame);
      break;
    case core::MsgKind::SuarpAck:
      if (opts_.role != ServerRole::Legacy)
        handle_ack(ctx, frame.src_mac,
                   std::get<core::SuarpAckBody>(frame.payload.body),
                   frame.payload.mics);
      break;
    case core::MsgKind::Data: {
      const auto& data = std::get<core::DataBody>(frame.payload.body);
      if (data.ack && opts_.role != ServerRole::Legacy)
        handle_ack(ctx, frame.src_mac, data.ack->ack, data.ack->mics);
      break;
    }
    case core::MsgKind::DhcpDiscover:
      handle_discover(ctx, frame);
      break;
    case core::MsgKind::DhcpRequest:
      handle_request(ctx, frame);
      break;
    case core::MsgKind::DhcpDecline:
      handle_decline(ctx, std::get<core::DhcpDeclineBody>(frame.payload.body));
      break;
    case core::MsgKind::RegistrationAdvert:
      if (opts_.role == ServerRole::Minus) handle_registration(ctx, frame);
      break;
    default:
      break;
  }
}

std::optional<core::MacAddress> ServerAgent::mapping_lookup(
    const core::IpAddress& ip, core::SimTime now) const {
  auto conf = opts_.static_mappings.find(ip);
  if (conf != opts_.static_mappings.end()) return conf->second;
  auto reg = registrations_.find(ip);
  if (reg != registrations_.end()) return reg->second;
  if (const Lease* lease = pool_.find_bound(ip, now)) return lease->client_mac;
  return std::nullopt;
}

void ServerAgent::handle_suarp_request(sim::Ctx& ctx, const core::Frame& frame) {
  const auto& req = std::get<core::SuarpReqBody>(frame.payload.body);
  core::Bytes req_body = core::serialize_body(frame.payload.body);
  crypto::AssociationId assoc_id{req.mac_a, my_mac_};

  crypto::Nonce rn_used;
  if (opts_.suarp_variant != SuarpVariant::Base) {
    if (!keystore_.has(assoc_id)) {
      ++stats_.suarp_rejected;
      ctx.log_state("reject_nokey", req.mac_a.to_string());
      return;
    }
    const auto& assoc = keystore_.get(assoc_id);
    if (frame.payload.mics.size() != 1) {
      ++stats_.suarp_rejected;
      ctx.log_state("reject_mic", "request schema");
      return;
    }
    bool ok = false;
    for (const auto& rn : keystore_.rn_candidates(assoc_id)) {
      if (frame.payload.mics[0] == rn_mic(assoc.shared_key, rn, req_body)) {
        rn_used = rn;
        ok = true;
        break;
      }
    }
    if (!ok) {
      ++stats_.suarp_rejected;
      ctx.log_state("reject_mic", "request from " + req.mac_a.to_string());
      return;
    }
  }

  auto mac_b = mapping_lookup(req.ip_b, ctx.now());
  core::SuarpResBody res{req.ip_a, req.mac_a, req.ip_b,
                         mac_b.value_or(core::MacAddress::zero()), ctx.now()};
  core::Bytes res_body = core::serialize_body(core::MessageBody{res});
  core::ProtocolMessage msg = core::make_message(res);

  PendingResponse pending;
  pending.t_s = res.t_s;
  pending.retransmits_left = opts_.retransmit_limit;
  pending.variant = opts_.suarp_variant;
  pending.rn_used = rn_used;

  const bool keyed = keystore_.has(assoc_id);
  if (!keyed) {
    // Base-variant request from an unknown host: no key, no MIC, and the
    // exchange cannot complete. Answer nothing.
    ++stats_.suarp_rejected;
    ctx.log_state("reject_nokey", req.mac_a.to_string());
    return;
  }
  const auto& assoc = keystore_.get(assoc_id);
  switch (opts_.suarp_variant) {
    case SuarpVariant::Base:
      msg.mics = {crypto::cbc_residue_mic(assoc.shared_key, res_body)};
      break;
    case SuarpVariant::AltV1:
      msg.mics = {rn_mic(assoc.shared_key, rn_used, res_body)};
      break;
    case SuarpVariant::AltV2: {
      pending.sk.bytes = core::random_bytes(ctx.rng(), crypto::kSessionKeyLen);
      core::Bytes transcript = req_body;
      transcript.insert(transcript.end(), res_body.begin(), res_body.end());
      pending.nrn = crypto::derive_nrn(assoc.shared_key, rn_used, transcript);
      core::Mic mic2 = chain_mic(assoc.shared_key, req_body, res_body);
      msg.masked = {crypto::xor_mask(pending.sk, mic2)};
      msg.mics = {session_mic(pending.sk, pending.nrn)};
      break;
    }
  }

  if (mac_b) {
    ++stats_.suarp_answered;
    ctx.log_state("answered", req.ip_b.to_string() + " for " + req.mac_a.to_string());
  } else {
    ++stats_.suarp_unknown;
    ctx.log_state("answered_unknown", req.ip_b.to_string());
  }

  core::Frame out;
  if (frame.reply_via) {
    auto gw = ctx.topo().gateway(my_segment_);
    if (!gw) return;
    const auto& gw_att = ctx.topo().node(gw->first).attachments.at(
        static_cast<std::size_t>(gw->second));
    out = core::Frame::make(my_mac_, gw_att.mac, std::move(msg), ctx.now(),
                            *frame.reply_via);
  } else {
    out = core::Frame::make(my_mac_, req.mac_a, std::move(msg), ctx.now());
  }
  pending.response = out;
  pending.generation = next_generation_++;
  std::uint64_t timer_arg = pack_mac(req.mac_a, pending.generation);
  pending_[req.mac_a] = std::move(pending);
  ctx.send(std::move(out));
  ctx.schedule_timer(opts_.timers.t3, kRetransmit, timer_arg);
}

void ServerAgent::handle_ack(sim::Ctx& ctx, const core::MacAddress& host,
                             const core::SuarpAckBody& ack,
                             const std::vector<core::Mic>& mics) {
  auto it = pending_.find(host);
  if (it == pending_.end()) {
    ctx.log_state("ack_ignored", host.to_string());
    return;
  }
  PendingResponse& pending = it->second;
  crypto::AssociationId assoc_id{host, my_mac_};
  if (!keystore_.has(assoc_id)) {
    ++stats_.acks_rejected;
    ctx.log_state("ack_reject", "no key for " + host.to_string());
    return;
  }
  const auto& assoc = keystore_.get(assoc_id);

  bool ok = false;
  core::SimTime t_a;
  std::optional<crypto::Nonce> next_rn;
  switch (pending.variant) {
    case SuarpVariant::Base: {
      try {
        core::Bytes inner = crypto::decrypt_payload(assoc.shared_key, ack.cipher);
        if (inner.size() == 8) {
          core::ByteReader r(inner);
          t_a = core::SimTime{r.u64()};
          ok = true;
        }
      } catch (const crypto::DecryptFailure&) {
      }
      break;
    }
    case SuarpVariant::AltV1: {
      try {
        core::Bytes inner = crypto::decrypt_payload(assoc.shared_key, ack.cipher);
        if (inner.size() == 8 + crypto::kNonceLen) {
          core::ByteReader r(inner);
          t_a = core::SimTime{r.u64()};
          next_rn = crypto::Nonce{r.raw(crypto::kNonceLen)};
          ok = true;
        }
      } catch (const crypto::DecryptFailure&) {
      }
      break;
    }
    case SuarpVariant::AltV2: {
      core::Bytes body_bytes = core::serialize_body(core::MessageBody{ack});
      if (mics.size() == 1 && mics[0] == ack_mic(pending.sk, body_bytes, pending.nrn)) {
        t_a = ack.t_a;
        next_rn = pending.nrn;
        ok = true;
      }
      break;
    }
  }

  if (ok && ctx.now() - t_a > opts_.timers.delta_t) ok = false;  // replayed ACK

  if (!ok) {
    ++stats_.acks_rejected;
    ctx.log_state("ack_reject", host.to_string());
    return;
  }
  if (next_rn) keystore_.rollover(assoc_id, *next_rn);
  ++stats_.acks_accepted;
  ctx.log_state("ack_ok", host.to_string());
  pending_.erase(it);
}

void ServerAgent::send_client(sim::Ctx& ctx, core::ProtocolMessage msg,
                              const core::MacAddress& client_mac,
                              const std::optional<core::IpAddress>& reply_via,
                              bool broadcast) {
  if (reply_via) {
    auto gw = ctx.topo().gateway(my_segment_);
    if (!gw) return;
    const auto& gw_att = ctx.topo().node(gw->first).attachments.at(
        static_cast<std::size_t>(gw->second));
    ctx.send(core::Frame::make(my_mac_, gw_att.mac, std::move(msg), ctx.now(),
                               *reply_via));
    return;
  }
  core::MacAddress dst = broadcast ? core::MacAddress::broadcast() : client_mac;
  ctx.send(core::Frame::make(my_mac_, dst, std::move(msg), ctx.now()));
}

void ServerAgent::handle_discover(sim::Ctx& ctx, const core::Frame& frame) {
  if (opts_.role == ServerRole::Minus) return;  // does not issue addresses
  if (opts_.passive) {
    ctx.log_state("passive_ignore", "");
    return;
  }
  const auto& discover = std::get<core::DhcpDiscoverBody>(frame.payload.body);
  core::Bytes discover_body = core::serialize_body(frame.payload.body);
  crypto::AssociationId assoc_id{discover.client_mac, my_mac_};

  SdhcpContext context;
  if (opts_.secure_dhcp) {
    if (!keystore_.has(assoc_id)) {
      ++stats_.rejected_requests;
      ctx.log_state("reject_nokey", discover.client_mac.to_string());
      return;
    }
    const auto& assoc = keystore_.get(assoc_id);
    if (opts_.sdhcp_variant != SdhcpVariant::Base) {
      bool ok = false;
      if (frame.payload.mics.size() == 1) {
        for (const auto& rn : keystore_.rn_candidates(assoc_id)) {
          if (frame.payload.mics[0] == rn_mic(assoc.shared_key, rn, discover_body)) {
            context.rn_used = rn;
            ok = true;
            break;
          }
        }
      }
      if (!ok) {
        ++stats_.rejected_requests;
        ctx.log_state("reject_mic", "discover from " + discover.client_mac.to_string());
        return;
      }
    }
  }

  auto reply_via = frame.reply_via;
  auto lease = pool_.offer(discover.client_mac, discover.xid, ctx.now(), reply_via);
  if (!lease) {
    ++stats_.naks;
    ctx.log_state("pool_exhausted", discover.client_mac.to_string());
    send_client(ctx,
                core::make_message(core::DhcpNakBody{discover.xid,
                                                     discover.client_mac, my_ip_}),
                discover.client_mac, reply_via, /*broadcast=*/true);
    return;
  }

  core::DhcpOfferBody offer{discover.xid, discover.client_mac, (*lease)->ip,
                            opts_.lease_duration, my_ip_};
  core::Bytes offer_body = core::serialize_body(core::MessageBody{offer});
  core::ProtocolMessage msg = core::make_message(offer);

  if (opts_.secure_dhcp) {
    const auto& assoc = keystore_.get(assoc_id);
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base: {
        core::Mic mic1 = crypto::cbc_residue_mic(assoc.shared_key, offer_body);
        msg.masked = {crypto::encrypt_payload(assoc.shared_key, mic1.bytes,
                                              ctx.rng())};
        break;
      }
      case SdhcpVariant::AltV1:
        msg.mics = {rn_mic(assoc.shared_key, context.rn_used, offer_body)};
        break;
      case SdhcpVariant::AltV2: {
        context.sk.bytes = core::random_bytes(ctx.rng(), crypto::kSessionKeyLen);
        core::Bytes transcript = discover_body;
        transcript.insert(transcript.end(), offer_body.begin(), offer_body.end());
        context.nrn = crypto::derive_nrn(assoc.shared_key, context.rn_used, transcript);
        core::Mic mic2 = chain_mic(assoc.shared_key, discover_body, offer_body);
        msg.masked = {crypto::xor_mask(context.sk, mic2)};
        msg.mics = {session_mic(context.sk, context.nrn)};
        break;
      }
    }
    context.discover_body = discover_body;
    context.offer_body = offer_body;
    sdhcp_[discover.client_mac] = context;
  }

  ++stats_.offers;
  ctx.log_state("offered", (*lease)->ip.to_string() + " to " +
                               discover.client_mac.to_string());
  send_client(ctx, std::move(msg), discover.client_mac, reply_via);
}

void ServerAgent::handle_request(sim::Ctx& ctx, const core::Frame& frame) {
  if (opts_.role == ServerRole::Minus) return;
  const auto& request = std::get<core::DhcpRequestBody>(frame.payload.body);

  if (!(request.server_id == my_ip_)) {
    // Another server was selected; put our reservation back in the pool.
    pool_.release(request.client_mac, request.xid);
    ++stats_.reclaims;
    ctx.log_state("reclaimed", request.client_mac.to_string());
    return;
  }
  if (opts_.passive) return;

  core::Bytes request_body = core::serialize_body(frame.payload.body);
  std::optional<core::IpAddress> reply_via = frame.reply_via;

  if (opts_.secure_dhcp) {
    crypto::AssociationId assoc_id{request.client_mac, my_mac_};
    auto context = sdhcp_.find(request.client_mac);
    if (!keystore_.has(assoc_id) || context == sdhcp_.end()) {
      ++stats_.rejected_requests;
      ctx.log_state("reject_mic", "request without exchange context");
      return;
    }
    const auto& assoc = keystore_.get(assoc_id);
    const SdhcpContext& sctx = context->second;
    bool ok = false;
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base:
        ok = frame.payload.mics.size() == 2 &&
             frame.payload.mics[0] ==
                 crypto::cbc_residue_mic(assoc.shared_key, sctx.offer_body) &&
             frame.payload.mics[1] ==
                 crypto::cbc_residue_mic(assoc.shared_key, request_body);
        break;
      case SdhcpVariant::AltV1:
        ok = frame.payload.mics.size() == 1 &&
             frame.payload.mics[0] ==
                 rn_mic(assoc.shared_key, sctx.rn_used, request_body);
        break;
      case SdhcpVariant::AltV2: {
        if (frame.payload.masked.size() == 1 &&
            frame.payload.masked[0].size() == crypto::kSessionKeyLen &&
            frame.payload.mics.size() == 1) {
          core::Mic mic4 = chain_mic(assoc.shared_key, sctx.offer_body, request_body);
          crypto::SessionKey recovered =
              crypto::xor_unmask(frame.payload.masked[0], mic4);
          ok = recovered == sctx.sk &&
               frame.payload.mics[0] == session_mic(sctx.sk, sctx.nrn);
        }
        break;
      }
    }
    if (!ok) {
      ++stats_.rejected_requests;
      ctx.log_state("reject_mic", "request from " + request.client_mac.to_string());
      return;  // reservation stays Offered and lapses back to the pool
    }
  }

  // Renewal of a live bound lease restarts its clock.
  if (pool_.renew(request.client_mac, request.requested_ip, ctx.now())) {
    const Lease* lease = pool_.find_bound(request.requested_ip, ctx.now());
    ctx.log_state("renewed", request.requested_ip.to_string());
    send_dhcp_ack(ctx, *lease, request.xid, request.client_mac, reply_via);
    return;
  }

  Lease* lease = pool_.bind(request.client_mac, request.requested_ip,
                            request.xid, ctx.now());
  if (!lease) {
    // Never offered, reservation lapsed, or the address went elsewhere.
    ++stats_.naks;
    ctx.log_state("nak", request.client_mac.to_string());
    send_client(ctx,
                core::make_message(core::DhcpNakBody{request.xid,
                                                     request.client_mac, my_ip_}),
                request.client_mac, reply_via, /*broadcast=*/true);
    return;
  }
  ++stats_.binds;
  ctx.log_state("lease_bound", lease->ip.to_string() + " to " +
                                   request.client_mac.to_string());
  send_dhcp_ack(ctx, *lease, request.xid, request.client_mac, reply_via);
}

void ServerAgent::send_dhcp_ack(sim::Ctx& ctx, const Lease& lease,
                                std::uint32_t xid,
                                const core::MacAddress& client_mac,
                                const std::optional<core::IpAddress>& reply_via) {
  core::SimTime t_s = ctx.now();
  core::DhcpAckBody ack{xid, client_mac, lease.ip, lease.duration, my_ip_, t_s, {}};
  core::ProtocolMessage msg;

  if (opts_.secure_dhcp) {
    crypto::AssociationId assoc_id{client_mac, my_mac_};
    const auto& assoc = keystore_.get(assoc_id);
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base: {
        if (opts_.encrypt_ack) {
          core::DhcpAckBody hidden{xid, client_mac, {}, {}, {}, {}, {}};
          hidden.cipher = crypto::encrypt_payload(
              assoc.shared_key,
              ack_inner(lease.ip, lease.duration, my_ip_, t_s, std::nullopt),
              ctx.rng());
          msg = core::make_message(hidden);
        } else {
          msg = core::make_message(ack);
        }
        break;
      }
      case SdhcpVariant::AltV1: {
        crypto::Nonce nrn{core::random_bytes(ctx.rng(), crypto::kNonceLen)};
        core::DhcpAckBody hidden{xid, client_mac, {}, {}, {}, {}, {}};
        hidden.cipher = crypto::encrypt_payload(
            assoc.shared_key,
            ack_inner(lease.ip, lease.duration, my_ip_, t_s, nrn), ctx.rng());
        msg = core::make_message(hidden);
        keystore_.rollover(assoc_id, nrn);
        break;
      }
      case SdhcpVariant::AltV2: {
        const SdhcpContext& sctx = sdhcp_[client_mac];
        core::Bytes body_bytes = core::serialize_body(core::MessageBody{ack});
        msg = core::make_message(ack, {ack_mic(sctx.sk, body_bytes, sctx.nrn)});
        keystore_.rollover(assoc_id, sctx.nrn);
        break;
      }
    }
  } else {
    msg = core::make_message(ack);
  }
  send_client(ctx, std::move(msg), client_mac, reply_via);
}

void ServerAgent::handle_decline(sim::Ctx& ctx, const core::DhcpDeclineBody& body) {
  if (opts_.role == ServerRole::Minus) return;
  if (!(body.server_id == my_ip_)) return;
  pool_.release(body.client_mac, body.xid);
  ctx.log_state("declined", body.declined_ip.to_string());
}

void ServerAgent::handle_registration(sim::Ctx& ctx, const core::Frame& frame) {
  const auto& advert = std::get<core::RegistrationAdvertBody>(frame.payload.body);
  if (advert.cipher.empty()) return;  // another server's identity broadcast

  crypto::AssociationId assoc_id{frame.src_mac, my_mac_};
  if (!keystore_.has(assoc_id)) {
    ctx.log_state("register_ignored", "no key for " + frame.src_mac.to_string());
    return;
  }
  core::Bytes plain;
  try {
    plain = crypto::decrypt_payload(keystore_.get(assoc_id).shared_key,
                                    advert.cipher);
  } catch (const crypto::DecryptFailure&) {
    ctx.log_state("register_ignored", "undecryptable from " + frame.src_mac.to_string());
    return;
  }
  if (plain.size() != 10) {
    ctx.log_state("register_ignored", "bad layout");
    return;
  }
  core::IpAddress ip;
  core::MacAddress mac;
  std::copy(plain.begin(), plain.begin() + 4, ip.octets.begin());
  std::copy(plain.begin() + 4, plain.end(), mac.octets.begin());
  registrations_[ip] = mac;
  ++stats_.registrations;
  ctx.log_state("registered", ip.to_string() + " -> " + mac.to_string());
}

}  // namespace suarp::agents
