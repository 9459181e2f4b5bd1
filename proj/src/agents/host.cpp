#include "agents/host.hpp"

namespace suarp::agents {

namespace {

enum HostTimer : std::uint32_t {
  kArpRetry = 1,
  kSuarpRetry = 2,
  kSuarpAckDeadline = 3,
  kDhcpDiscoverTimeout = 4,
  kDhcpRequestTimeout = 5,
  kRenewDue = 6,
};

// How long a completed exchange stays recognizable for duplicate
// retransmissions: the server's full t3 retransmission regime.
constexpr std::uint64_t kDupWindowT3Factor = 4;

std::uint64_t pack_ip(const IpAddress& ip) {
  return static_cast<std::uint64_t>(ip.octets[0]) << 24 |
         static_cast<std::uint64_t>(ip.octets[1]) << 16 |
         static_cast<std::uint64_t>(ip.octets[2]) << 8 | ip.octets[3];
}

IpAddress unpack_ip(std::uint64_t v) {
  IpAddress ip;
  ip.octets = {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
               static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  return ip;
}

std::string mapping_text(const IpAddress& ip, const MacAddress& mac) {
  return ip.to_string() + " -> " + mac.to_string();
}

Bytes ack_plaintext(SimTime t_a, const std::optional<crypto::Nonce>& nrn) {
  core::ByteWriter w;
  w.u64(t_a.ticks);
  if (nrn) w.raw(nrn->bytes);
  return w.take();
}

}  // namespace

void HostAgent::on_start(sim::Ctx& ctx) {
  const auto& self = ctx.topo().node(ctx.self());
  const auto& att = self.attachments.at(0);
  my_mac_ = att.mac;
  my_ip_ = att.ip;
  my_segment_ = att.segment;

  if (opts_.server_node >= 0) {
    const auto& server = ctx.topo().node(opts_.server_node);
    server_mac_ = server.attachments.at(0).mac;
    server_ip_ = server.attachments.at(0).ip;
    server_local_ = server.attachments.at(0).segment == my_segment_;
    if (!server_local_) {
      auto gw = ctx.topo().gateway(my_segment_);
      if (gw) {
        const auto& gw_att = ctx.topo().node(gw->first).attachments.at(
            static_cast<std::size_t>(gw->second));
        gateway_mac_ = gw_att.mac;
        gateway_ip_ = gw_att.ip;
      } else {
        ctx.log_state("no_gateway", "server unreachable from segment");
      }
    }
  }

  if (opts_.static_registration && server_known()) send_registration(ctx);
}

void HostAgent::on_action(sim::Ctx& ctx, const sim::AgentAction& action) {
  using Verb = sim::AgentAction::Verb;
  switch (action.verb) {
    case Verb::Resolve: resolve(ctx, action.target); break;
    case Verb::SendData: send_data(ctx, action.target, action.size); break;
    case Verb::DhcpAcquire: dhcp_acquire(ctx); break;
    case Verb::DhcpRenew: dhcp_renew(ctx); break;
    default: break;
  }
}

void HostAgent::on_frame(sim::Ctx& ctx, const Frame& frame, int) {
  switch (frame.payload.kind()) {
    case core::MsgKind::ArpRequest:
      if (!opts_.use_suarp)
        handle_arp_request(ctx, std::get<core::ArpRequestBody>(frame.payload.body));
      break;
    case core::MsgKind::ArpReply:
      if (!opts_.use_suarp)
        handle_arp_reply(ctx, std::get<core::ArpReplyBody>(frame.payload.body));
      break;
    case core::MsgKind::SuarpRes:
      if (opts_.use_suarp) handle_suarp_response(ctx, frame);
      break;
    case core::MsgKind::DhcpOffer:
      if (opts_.dhcp_mode != HostOptions::DhcpMode::None)
        handle_dhcp_offer(ctx, frame);
      break;
    case core::MsgKind::DhcpAck:
      if (opts_.dhcp_mode != HostOptions::DhcpMode::None)
        handle_dhcp_ack(ctx, frame);
      break;
    case core::MsgKind::DhcpNak:
      if (opts_.dhcp_mode != HostOptions::DhcpMode::None)
        handle_dhcp_nak(ctx, std::get<core::DhcpNakBody>(frame.payload.body));
      break;
    case core::MsgKind::RegistrationAdvert:
      handle_advert(ctx, frame);
      break;
    case core::MsgKind::Data:
      ++stats_.data_received;
      break;
    default:
      break;
  }
}

void HostAgent::on_timer(sim::Ctx& ctx, std::uint32_t tag, std::uint64_t arg) {
  switch (tag) {
    case kArpRetry: {
      IpAddress ip = unpack_ip(arg);
      auto it = arp_pending_.find(ip);
      if (it == arp_pending_.end()) return;  // already resolved
      if (it->second.first <= 0) {
        ctx.log_state("arp_timeout", ip.to_string());
        ++stats_.resolutions_failed;
        arp_pending_.erase(it);
        return;
      }
      --it->second.first;
      send_arp_request(ctx, ip);
      ctx.schedule_timer(opts_.timers.t1, kArpRetry, arg);
      return;
    }
    case kSuarpRetry: {
      IpAddress ip = unpack_ip(arg);
      auto it = suarp_pending_.find(ip);
      if (it == suarp_pending_.end()) return;
      SuarpExchange& ex = it->second;
      if (ex.phase != ExchangePhase::AwaitingResponse) return;
      if (ex.retries_left <= 0) {
        ctx.log_state("server_unreachable", ip.to_string());
        ++stats_.resolutions_failed;
        suarp_pending_.erase(it);
        return;
      }
      --ex.retries_left;
      // A silent server may be rejecting our MIC after a lost final ACK
      // desynchronized the nonce; retry once under the previous RN.
      if (!ex.fell_back && opts_.suarp_variant != SuarpVariant::Base &&
          ex.retries_left < opts_.suarp_retry_limit - 1) {
        auto candidates = keystore_.rn_candidates(server_association());
        if (candidates.size() > 1) {
          ex.fell_back = true;
          ex.rn_used = candidates[1];
          ex.request.mics = {rn_mic(keystore_.get(server_association()).shared_key,
                                    ex.rn_used, ex.request_body)};
        }
      }
      send_suarp_request(ctx, ex);
      ctx.schedule_timer(opts_.timers.t1, kSuarpRetry, arg);
      return;
    }
    case kSuarpAckDeadline: {
      IpAddress ip = unpack_ip(arg);
      auto it = suarp_pending_.find(ip);
      if (it == suarp_pending_.end()) return;
      SuarpExchange& ex = it->second;
      if (ex.integrity != Integrity::Icp || ex.ack_sent) return;
      auto key = std::make_pair(ex.target, ex.response.t_s.ticks);
      auto done = completed_.find(key);
      if (done != completed_.end()) {
        send_standalone_ack(ctx, ex.target, done->second);
        ++stats_.acks_standalone;
        ctx.log_state("ack_standalone", ex.target.to_string());
        commit_rollover_once(ex, done->second.nrn);
      }
      ex.ack_sent = true;
      ex.phase = ExchangePhase::Done;
      suarp_pending_.erase(it);
      return;
    }
    case kDhcpDiscoverTimeout: {
      if (dhcp_.phase != DhcpClientState::Phase::Discovering ||
          dhcp_.xid != static_cast<std::uint32_t>(arg))
        return;
      if (dhcp_.retries_left <= 0) {
        dhcp_.phase = DhcpClientState::Phase::Failed;
        ++stats_.dhcp_failures;
        ctx.log_state("no_offer", "");
        return;
      }
      --dhcp_.retries_left;
      ctx.send(Frame::make(my_mac_, MacAddress::broadcast(), dhcp_.discover_msg,
                           ctx.now()));
      ctx.schedule_timer(opts_.timers.t1, kDhcpDiscoverTimeout, arg);
      return;
    }
    case kDhcpRequestTimeout: {
      if (dhcp_.phase != DhcpClientState::Phase::Requesting ||
          dhcp_.xid != static_cast<std::uint32_t>(arg))
        return;
      if (dhcp_.retries_left <= 0) {
        dhcp_.phase = DhcpClientState::Phase::Failed;
        ++stats_.dhcp_failures;
        ctx.log_state("no_ack", "");
        return;
      }
      --dhcp_.retries_left;
      ctx.send(Frame::make(my_mac_, MacAddress::broadcast(), dhcp_.request_msg,
                           ctx.now()));
      ctx.schedule_timer(opts_.timers.t1, kDhcpRequestTimeout, arg);
      return;
    }
    case kRenewDue:
      if (dhcp_.phase == DhcpClientState::Phase::Bound) dhcp_renew(ctx);
      return;
    default:
      return;
  }
}

// --- resolution ---

void HostAgent::resolve(sim::Ctx& ctx, const IpAddress& target) {
  if (opts_.use_suarp)
    suarp_resolve(ctx, target);
  else
    arp_resolve(ctx, target);
}

void HostAgent::send_data(sim::Ctx& ctx, const IpAddress& dst_ip,
                          std::uint32_t size) {
  // Traffic to the resolution server needs no lookup; it is also the
  // piggybacking opportunity.
  if (server_known() && dst_ip == server_ip_) {
    core::DataBody data{my_ip_, dst_ip, static_cast<std::uint16_t>(size), std::nullopt};
    try_piggyback(ctx, data);
    ++stats_.data_sent;
    send_to_server(ctx, core::make_message(std::move(data)));
    return;
  }
  auto mac = cache_.lookup(dst_ip, ctx.now());
  if (mac) {
    ++stats_.data_sent;
    ctx.send(Frame::make(my_mac_, *mac,
                         core::make_message(core::DataBody{
                             my_ip_, dst_ip, static_cast<std::uint16_t>(size),
                             std::nullopt}),
                         ctx.now()));
    return;
  }
  // Queue behind a resolution.
  resolve(ctx, dst_ip);
  if (opts_.use_suarp) {
    auto it = suarp_pending_.find(dst_ip);
    if (it != suarp_pending_.end())
      it->second.waiting.push_back({dst_ip, size});
  } else {
    auto it = arp_pending_.find(dst_ip);
    if (it != arp_pending_.end())
      it->second.second.push_back({dst_ip, size});
  }
}

void HostAgent::flush_waiting(sim::Ctx& ctx, const IpAddress& ip,
                              const MacAddress& mac) {
  std::vector<QueuedData> waiting;
  if (opts_.use_suarp) {
    auto it = suarp_pending_.find(ip);
    if (it != suarp_pending_.end()) waiting.swap(it->second.waiting);
  } else {
    auto it = arp_pending_.find(ip);
    if (it != arp_pending_.end()) waiting.swap(it->second.second);
  }
  for (const auto& item : waiting) {
    ++stats_.data_sent;
    ctx.send(Frame::make(my_mac_, mac,
                         core::make_message(core::DataBody{
                             my_ip_, item.dst_ip,
                             static_cast<std::uint16_t>(item.size), std::nullopt}),
                         ctx.now()));
  }
}

// --- legacy arp ---

void HostAgent::arp_resolve(sim::Ctx& ctx, const IpAddress& target) {
  if (cache_.lookup(target, ctx.now())) {
    ++stats_.cache_hits;
    ctx.log_state("resolved_cache", target.to_string());
    return;
  }
  if (arp_pending_.count(target)) return;
  arp_pending_[target] = {opts_.arp_retry_limit, {}};
  send_arp_request(ctx, target);
  ctx.schedule_timer(opts_.timers.t1, kArpRetry, pack_ip(target));
}

void HostAgent::send_arp_request(sim::Ctx& ctx, const IpAddress& target) {
  ctx.send(Frame::make(
      my_mac_, MacAddress::broadcast(),
      core::make_message(core::ArpRequestBody{my_ip_, my_mac_, target}),
      ctx.now()));
}

void HostAgent::handle_arp_request(sim::Ctx& ctx,
                                   const core::ArpRequestBody& body) {
  if (body.sender_mac == my_mac_) return;
  if (!my_ip_.is_zero() && body.target_ip == my_ip_) {
    // The request carries the asker's mapping; remember it and answer.
    cache_insert(ctx, body.sender_ip, body.sender_mac);
    ctx.send(Frame::make(my_mac_, body.sender_mac,
                         core::make_message(core::ArpReplyBody{
                             my_ip_, my_mac_, body.sender_ip, body.sender_mac}),
                         ctx.now()));
    return;
  }
  if (opts_.gratuitous_learning && !body.sender_ip.is_zero())
    cache_insert(ctx, body.sender_ip, body.sender_mac);
}

void HostAgent::handle_arp_reply(sim::Ctx& ctx, const core::ArpReplyBody& body) {
  // No authentication: whatever mapping a reply claims is cached as-is.
  cache_insert(ctx, body.sender_ip, body.sender_mac);
  auto it = arp_pending_.find(body.sender_ip);
  if (it != arp_pending_.end()) {
    ++stats_.resolutions_completed;
    ctx.log_state("resolved", mapping_text(body.sender_ip, body.sender_mac));
    flush_waiting(ctx, body.sender_ip, body.sender_mac);
    arp_pending_.erase(body.sender_ip);
  }
}

void HostAgent::cache_insert(sim::Ctx& ctx, const IpAddress& ip,
                             const MacAddress& mac) {
  if (ip.is_zero()) return;
  cache_.insert(ip, mac, ctx.now());
  stats_.cache_insert_log.push_back({ip, mac, ctx.now()});
  ctx.log_cache("insert", mapping_text(ip, mac));
}

// --- s-uarp host side ---

void HostAgent::suarp_resolve(sim::Ctx& ctx, const IpAddress& target) {
  if (!server_known()) {
    ctx.log_state("no_server", target.to_string());
    return;
  }
  if (!keystore_.has(server_association())) {
    ctx.log_state("unprovisioned_key", target.to_string());
    return;
  }
  if (cache_.lookup(target, ctx.now())) {
    ++stats_.cache_hits;
    ctx.log_state("resolved_cache", target.to_string());
    return;
  }
  if (suarp_pending_.count(target)) return;

  SuarpExchange ex;
  ex.target = target;
  ex.retries_left = opts_.suarp_retry_limit;
  core::SuarpReqBody req{my_ip_, my_mac_, target};
  ex.request_body = core::serialize_body(core::MessageBody{req});
  ex.request = core::make_message(req);
  if (opts_.suarp_variant != SuarpVariant::Base) {
    const auto& assoc = keystore_.get(server_association());
    ex.rn_used = assoc.current_rn;
    ex.request.mics = {rn_mic(assoc.shared_key, ex.rn_used, ex.request_body)};
  }
  SuarpExchange& stored = suarp_pending_[target] = std::move(ex);
  send_suarp_request(ctx, stored);
  ctx.schedule_timer(opts_.timers.t1, kSuarpRetry, pack_ip(target));
}

void HostAgent::send_suarp_request(sim::Ctx& ctx, SuarpExchange& exchange) {
  exchange.request_sent_at = ctx.now();
  send_to_server(ctx, exchange.request);
}

void HostAgent::send_to_server(sim::Ctx& ctx, core::ProtocolMessage msg) {
  if (server_local_) {
    ctx.send(Frame::make(my_mac_, server_mac_, std::move(msg), ctx.now()));
  } else {
    ctx.send(Frame::make(my_mac_, gateway_mac_, std::move(msg), ctx.now(),
                         server_ip_, gateway_ip_));
  }
}

void HostAgent::handle_suarp_response(sim::Ctx& ctx, const Frame& frame) {
  const auto& res = std::get<core::SuarpResBody>(frame.payload.body);
  SimTime now = ctx.now();

  // Duplicate of an exchange we already completed (the server's t3
  // retransmission regime): acknowledge again, change nothing. Only a
  // byte-identical copy qualifies.
  auto done = completed_.find({res.ip_b, res.t_s.ticks});
  if (done != completed_.end() &&
      done->second.accepted_bytes == core::serialize_message(frame.payload)) {
    SimTime window{opts_.timers.t3.ticks * kDupWindowT3Factor};
    if (now - done->second.icp_at <= window) {
      ++stats_.duplicates_reacked;
      ctx.log_state("duplicate_reacked", res.ip_b.to_string());
      send_standalone_ack(ctx, res.ip_b, done->second);
      return;
    }
  }

  // Freshness gate: a response older than the accepted transmission delay
  // is discarded outright, valid MIC or not.
  if (now - res.t_s > opts_.timers.delta_t) {
    ++stats_.icf;
    ctx.log_state("icf", "stale response for " + res.ip_b.to_string());
    return;
  }

  auto it = suarp_pending_.find(res.ip_b);
  if (it == suarp_pending_.end() ||
      it->second.phase != ExchangePhase::AwaitingResponse) {
    ctx.log_state("unsolicited", res.ip_b.to_string());
    return;
  }
  SuarpExchange& ex = it->second;

  if (verify_suarp_response(ctx, ex, frame) == Integrity::Icf) {
    // Discard; the exchange keeps waiting and the t1 retransmit loop runs.
    ++stats_.icf;
    ctx.log_state("icf", "bad mic for " + res.ip_b.to_string());
    return;
  }

  ++stats_.icp;
  ex.integrity = Integrity::Icp;
  ex.icp_at = now;
  ex.response = res;
  ex.phase = ExchangePhase::AwaitingPiggybackOpportunity;
  ctx.log_state("icp", res.ip_b.to_string());

  CompletedExchange material;
  material.icp_at = now;
  material.variant = opts_.suarp_variant;
  material.accepted_bytes = core::serialize_message(frame.payload);
  if (opts_.suarp_variant == SuarpVariant::AltV1) {
    material.nrn.bytes = core::random_bytes(ctx.rng(), crypto::kNonceLen);
  } else if (opts_.suarp_variant == SuarpVariant::AltV2) {
    material.sk = ex.sk_recovered;
    material.nrn = ex.nrn_derived;
  }
  completed_[{res.ip_b, res.t_s.ticks}] = material;

  if (res.mac_b.is_zero()) {
    ++stats_.unknown_mapping;
    ctx.log_state("unknown_mapping", res.ip_b.to_string());
    ex.waiting.clear();
  } else {
    cache_insert(ctx, res.ip_b, res.mac_b);
    ++stats_.resolutions_completed;
    flush_waiting(ctx, res.ip_b, res.mac_b);
  }

  // Acknowledge: ride an outbound packet inside t2 if one shows up,
  // otherwise the standalone deadline fires right after the window.
  ctx.schedule_timer(opts_.timers.t2 + SimTime::ms(1), kSuarpAckDeadline,
                     pack_ip(res.ip_b));
}

Integrity HostAgent::verify_suarp_response(sim::Ctx&, SuarpExchange& ex,
                                           const Frame& frame) {
  const auto& msg = frame.payload;
  Bytes res_body = core::serialize_body(msg.body);
  const auto& assoc = keystore_.get(server_association());

  switch (opts_.suarp_variant) {
    case SuarpVariant::Base: {
      if (msg.mics.size() != 1 ||
          msg.mics[0].scheme != core::MicScheme::CbcResidue)
        return Integrity::Icf;
      return msg.mics[0] == crypto::cbc_residue_mic(assoc.shared_key, res_body)
                 ? Integrity::Icp
                 : Integrity::Icf;
    }
    case SuarpVariant::AltV1: {
      if (msg.mics.size() != 1 ||
          msg.mics[0].scheme != core::MicScheme::KeyedHash)
        return Integrity::Icf;
      return msg.mics[0] == rn_mic(assoc.shared_key, ex.rn_used, res_body)
                 ? Integrity::Icp
                 : Integrity::Icf;
    }
    case SuarpVariant::AltV2: {
      if (msg.mics.size() != 1 || msg.masked.size() != 1 ||
          msg.masked[0].size() != crypto::kSessionKeyLen ||
          msg.mics[0].scheme != core::MicScheme::KeyedHash)
        return Integrity::Icf;
      core::Mic mic2 = chain_mic(assoc.shared_key, ex.request_body, res_body);
      crypto::SessionKey sk = crypto::xor_unmask(msg.masked[0], mic2);
      Bytes transcript = ex.request_body;
      transcript.insert(transcript.end(), res_body.begin(), res_body.end());
      crypto::Nonce nrn = crypto::derive_nrn(assoc.shared_key, ex.rn_used, transcript);
      if (!(msg.mics[0] == session_mic(sk, nrn))) return Integrity::Icf;
      ex.sk_recovered = sk;
      ex.nrn_derived = nrn;
      return Integrity::Icp;
    }
  }
  return Integrity::Icf;
}

core::SuarpAckBody HostAgent::build_ack_body(sim::Ctx& ctx,
                                             const CompletedExchange& material,
                                             std::vector<core::Mic>& mics_out) {
  core::SuarpAckBody body;
  const auto& assoc = keystore_.get(server_association());
  switch (material.variant) {
    case SuarpVariant::Base:
      body.cipher = crypto::encrypt_payload(
          assoc.shared_key, ack_plaintext(ctx.now(), std::nullopt), ctx.rng());
      break;
    case SuarpVariant::AltV1:
      body.cipher = crypto::encrypt_payload(
          assoc.shared_key, ack_plaintext(ctx.now(), material.nrn), ctx.rng());
      break;
    case SuarpVariant::AltV2: {
      body.t_a = ctx.now();
      Bytes body_bytes = core::serialize_body(body);
      mics_out.push_back(ack_mic(material.sk, body_bytes, material.nrn));
      break;
    }
  }
  return body;
}

void HostAgent::send_standalone_ack(sim::Ctx& ctx, const IpAddress&,
                                    const CompletedExchange& material) {
  std::vector<core::Mic> mics;
  core::SuarpAckBody body = build_ack_body(ctx, material, mics);
  send_to_server(ctx, core::make_message(body, std::move(mics)));
}

bool HostAgent::try_piggyback(sim::Ctx& ctx, core::DataBody& data) {
  // Attach the oldest pending acknowledgment still inside its window.
  IpAddress best;
  SimTime best_icp{~0ull};
  for (auto& [ip, ex] : suarp_pending_) {
    if (ex.integrity != Integrity::Icp || ex.ack_sent) continue;
    if (ctx.now() - ex.icp_at > opts_.timers.t2) continue;
    if (ex.icp_at < best_icp) {
      best_icp = ex.icp_at;
      best = ip;
    }
  }
  if (best_icp.ticks == ~0ull) return false;

  SuarpExchange& ex = suarp_pending_[best];
  auto done = completed_.find({ex.target, ex.response.t_s.ticks});
  if (done == completed_.end()) return false;

  core::PiggybackAck pa;
  pa.ack = build_ack_body(ctx, done->second, pa.mics);
  data.ack = std::move(pa);
  ++stats_.acks_piggybacked;
  ctx.log_state("ack_piggybacked", ex.target.to_string());
  commit_rollover_once(ex, done->second.nrn);
  ex.ack_sent = true;
  ex.phase = ExchangePhase::Done;
  suarp_pending_.erase(best);
  return true;
}

void HostAgent::commit_rollover_once(SuarpExchange& ex, const crypto::Nonce& nrn) {
  if (opts_.suarp_variant == SuarpVariant::Base) return;
  if (ex.rolled) return;
  keystore_.rollover(server_association(), nrn);
  ex.rolled = true;
}

// --- dhcp client ---

void HostAgent::dhcp_acquire(sim::Ctx& ctx) {
  dhcp_ = DhcpClientState{};
  dhcp_.phase = DhcpClientState::Phase::Discovering;
  dhcp_.xid = next_xid_++;
  dhcp_.retries_left = opts_.dhcp_retry_limit;

  core::DhcpDiscoverBody discover{dhcp_.xid, my_mac_};
  dhcp_.discover_body = core::serialize_body(core::MessageBody{discover});
  core::ProtocolMessage msg = core::make_message(discover);

  if (opts_.dhcp_mode == HostOptions::DhcpMode::Secure &&
      opts_.sdhcp_variant != SdhcpVariant::Base) {
    if (!server_known() || !keystore_.has(server_association())) {
      ctx.log_state("unprovisioned_key", "dhcp");
      dhcp_.phase = DhcpClientState::Phase::Failed;
      return;
    }
    const auto& assoc = keystore_.get(server_association());
    dhcp_.rn_used = assoc.current_rn;
    msg.mics = {rn_mic(assoc.shared_key, dhcp_.rn_used, dhcp_.discover_body)};
  }
  dhcp_.discover_msg = msg;
  ctx.send(Frame::make(my_mac_, MacAddress::broadcast(), std::move(msg), ctx.now()));
  ctx.schedule_timer(opts_.timers.t1, kDhcpDiscoverTimeout, dhcp_.xid);
}

void HostAgent::handle_dhcp_offer(sim::Ctx& ctx, const Frame& frame) {
  const auto& offer = std::get<core::DhcpOfferBody>(frame.payload.body);
  if (dhcp_.phase != DhcpClientState::Phase::Discovering) return;
  if (offer.xid != dhcp_.xid || !(offer.client_mac == my_mac_)) return;

  Bytes offer_body = core::serialize_body(frame.payload.body);
  const bool secure = opts_.dhcp_mode == HostOptions::DhcpMode::Secure;
  if (secure) {
    const auto& assoc = keystore_.get(server_association());
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base: {
        if (frame.payload.masked.size() != 1) return;
        Bytes mic1_bytes;
        try {
          mic1_bytes =
              crypto::decrypt_payload(assoc.shared_key, frame.payload.masked[0]);
        } catch (const crypto::DecryptFailure&) {
          ctx.log_state("reject_mic", "offer");
          return;
        }
        if (mic1_bytes != crypto::cbc_residue_mic(assoc.shared_key, offer_body).bytes) {
          ctx.log_state("reject_mic", "offer");
          return;
        }
        break;
      }
      case SdhcpVariant::AltV1: {
        if (frame.payload.mics.size() != 1 ||
            !(frame.payload.mics[0] ==
              rn_mic(assoc.shared_key, dhcp_.rn_used, offer_body))) {
          ctx.log_state("reject_mic", "offer");
          return;
        }
        break;
      }
      case SdhcpVariant::AltV2: {
        if (frame.payload.masked.size() != 1 ||
            frame.payload.masked[0].size() != crypto::kSessionKeyLen ||
            frame.payload.mics.size() != 1) {
          ctx.log_state("reject_mic", "offer");
          return;
        }
        core::Mic mic2 = chain_mic(assoc.shared_key, dhcp_.discover_body, offer_body);
        crypto::SessionKey sk = crypto::xor_unmask(frame.payload.masked[0], mic2);
        Bytes transcript = dhcp_.discover_body;
        transcript.insert(transcript.end(), offer_body.begin(), offer_body.end());
        crypto::Nonce nrn =
            crypto::derive_nrn(assoc.shared_key, dhcp_.rn_used, transcript);
        if (!(frame.payload.mics[0] == session_mic(sk, nrn))) {
          ctx.log_state("reject_mic", "offer");
          return;
        }
        dhcp_.sk = sk;
        dhcp_.nrn = nrn;
        break;
      }
    }
  }

  // First acceptable offer wins.
  dhcp_.phase = DhcpClientState::Phase::Requesting;
  dhcp_.retries_left = opts_.dhcp_retry_limit;
  dhcp_.offered_ip = offer.offered_ip;
  dhcp_.server_id = offer.server_id;
  dhcp_.lease_duration = offer.lease_duration;
  dhcp_.server_mac = frame.src_mac;
  dhcp_.offer_body = offer_body;
  ctx.log_state("offer_selected", offer.offered_ip.to_string());

  core::DhcpRequestBody request{dhcp_.xid, my_mac_, dhcp_.offered_ip,
                                dhcp_.server_id};
  dhcp_.request_body = core::serialize_body(core::MessageBody{request});
  core::ProtocolMessage msg = core::make_message(request);
  if (secure) {
    const auto& assoc = keystore_.get(server_association());
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base:
        msg.mics = {crypto::cbc_residue_mic(assoc.shared_key, dhcp_.offer_body),
                    crypto::cbc_residue_mic(assoc.shared_key, dhcp_.request_body)};
        break;
      case SdhcpVariant::AltV1:
        msg.mics = {rn_mic(assoc.shared_key, dhcp_.rn_used, dhcp_.request_body)};
        break;
      case SdhcpVariant::AltV2: {
        core::Mic mic4 = chain_mic(assoc.shared_key, dhcp_.offer_body,
                                   dhcp_.request_body);
        msg.masked = {crypto::xor_mask(dhcp_.sk, mic4)};
        msg.mics = {session_mic(dhcp_.sk, dhcp_.nrn)};
        break;
      }
    }
  }
  // Broadcast so every server that answered can reclaim its reservation.
  dhcp_.request_msg = msg;
  ctx.send(Frame::make(my_mac_, MacAddress::broadcast(), std::move(msg), ctx.now()));
  ctx.schedule_timer(opts_.timers.t1, kDhcpRequestTimeout, dhcp_.xid);
}

void HostAgent::handle_dhcp_ack(sim::Ctx& ctx, const Frame& frame) {
  const auto& ack = std::get<core::DhcpAckBody>(frame.payload.body);
  if (ack.xid != dhcp_.xid || !(ack.client_mac == my_mac_)) return;

  const bool renewal = dhcp_.phase == DhcpClientState::Phase::Bound;
  if (!renewal && dhcp_.phase != DhcpClientState::Phase::Requesting) return;

  IpAddress leased = ack.leased_ip;
  SimTime duration = ack.lease_duration;
  SimTime t_s = ack.t_s;
  const bool secure = opts_.dhcp_mode == HostOptions::DhcpMode::Secure;

  if (secure) {
    const auto& assoc = keystore_.get(server_association());
    switch (opts_.sdhcp_variant) {
      case SdhcpVariant::Base:
      case SdhcpVariant::AltV1: {
        const bool v1 = opts_.sdhcp_variant == SdhcpVariant::AltV1;
        if (ack.cipher.empty() && !v1) break;  // base ACK encryption is optional
        Bytes inner;
        try {
          inner = crypto::decrypt_payload(assoc.shared_key, ack.cipher);
        } catch (const crypto::DecryptFailure&) {
          ctx.log_state("reject_ack", "undecryptable");
          return;
        }
        std::size_t expected = 24 + (v1 ? crypto::kNonceLen : 0);
        if (inner.size() != expected) {
          ctx.log_state("reject_ack", "bad layout");
          return;
        }
        core::ByteReader r(inner);
        Bytes ip_bytes = r.raw(4);
        std::copy(ip_bytes.begin(), ip_bytes.end(), leased.octets.begin());
        duration = SimTime{r.u64()};
        r.raw(4);  // server id echo
        t_s = SimTime{r.u64()};
        if (v1) dhcp_.nrn.bytes = r.raw(crypto::kNonceLen);
        break;
      }
      case SdhcpVariant::AltV2: {
        Bytes ack_body = core::serialize_body(frame.payload.body);
        if (frame.payload.mics.size() != 1 ||
            !(frame.payload.mics[0] == ack_mic(dhcp_.sk, ack_body, dhcp_.nrn))) {
          ctx.log_state("reject_ack", "bad mic");
          return;
        }
        break;
      }
    }
    if (ctx.now() - t_s > opts_.timers.delta_t) {
      ctx.log_state("reject_ack", "stale timestamp");
      return;
    }
  }

  dhcp_.phase = DhcpClientState::Phase::Bound;
  dhcp_.granted_at = ctx.now();
  dhcp_.lease_duration = duration;
  my_ip_ = leased;
  if (!renewal) ++stats_.leases_bound;
  ctx.log_state(renewal ? "lease_renewed" : "lease_bound", leased.to_string());

  if (secure && opts_.sdhcp_variant != SdhcpVariant::Base)
    keystore_.rollover(server_association(), dhcp_.nrn);

  if (opts_.auto_renew) {
    auto due = static_cast<std::uint64_t>(
        static_cast<double>(duration.ticks) * opts_.renew_fraction);
    ctx.schedule_timer(SimTime{due}, kRenewDue, 0);
  }
}

void HostAgent::handle_dhcp_nak(sim::Ctx& ctx, const core::DhcpNakBody& body) {
  if (body.xid != dhcp_.xid || !(body.client_mac == my_mac_)) return;
  if (dhcp_.phase == DhcpClientState::Phase::Bound) my_ip_ = IpAddress{};
  dhcp_.phase = DhcpClientState::Phase::Failed;
  ++stats_.naks;
  ctx.log_state("nak_received", "");
}

void HostAgent::dhcp_renew(sim::Ctx& ctx) {
  if (dhcp_.phase != DhcpClientState::Phase::Bound) {
    ctx.log_state("renew_without_lease", "");
    return;
  }
  if (opts_.dhcp_mode == HostOptions::DhcpMode::Secure) {
    dhcp_acquire(ctx);  // a secure renewal is a fresh authenticated exchange
    return;
  }
  ctx.send(Frame::make(my_mac_, dhcp_.server_mac,
                       core::make_message(core::DhcpRequestBody{
                           dhcp_.xid, my_mac_, my_ip_, dhcp_.server_id}),
                       ctx.now(), dhcp_.server_id));
}

// --- static mode ---

void HostAgent::send_registration(sim::Ctx& ctx) {
  if (!keystore_.has(server_association())) {
    ctx.log_state("unprovisioned_key", "registration");
    return;
  }
  core::ByteWriter w;
  w.raw(my_ip_.octets);
  w.raw(my_mac_.octets);
  core::RegistrationAdvertBody body;
  body.cipher = crypto::encrypt_payload(
      keystore_.get(server_association()).shared_key, w.take(), ctx.rng());
  send_to_server(ctx, core::make_message(body));
  registered_ = true;
  ctx.log_state("registered", my_ip_.to_string());
}

void HostAgent::handle_advert(sim::Ctx& ctx, const Frame& frame) {
  const auto& advert = std::get<core::RegistrationAdvertBody>(frame.payload.body);
  if (!advert.cipher.empty()) return;  // host registrations are for servers
  if (!server_known()) {
    server_mac_ = frame.src_mac;
    server_ip_ = advert.ip;
    server_local_ = true;
    ctx.log_state("server_learned", advert.ip.to_string());
  }
  if (opts_.static_registration && !registered_) send_registration(ctx);
}

bool HostAgent::lease_bound() const {
  return dhcp_.phase == DhcpClientState::Phase::Bound;
}

}  // namespace suarp::agents
