#include "core/message.hpp"

namespace suarp::core {

namespace {

void put_mac(ByteWriter& w, const MacAddress& m) { w.raw(m.octets); }
void put_ip(ByteWriter& w, const IpAddress& ip) { w.raw(ip.octets); }

MacAddress get_mac(ByteReader& r) {
  MacAddress m;
  Bytes b = r.raw(6);
  std::copy(b.begin(), b.end(), m.octets.begin());
  return m;
}

IpAddress get_ip(ByteReader& r) {
  IpAddress ip;
  Bytes b = r.raw(4);
  std::copy(b.begin(), b.end(), ip.octets.begin());
  return ip;
}

void put_ack_fields(ByteWriter& w, const SuarpAckBody& a) {
  w.u64(a.t_a.ticks);
  w.blob(a.nrn);
  w.blob(a.cipher);
}

SuarpAckBody get_ack_fields(ByteReader& r) {
  SuarpAckBody a;
  a.t_a = SimTime{r.u64()};
  a.nrn = r.blob();
  a.cipher = r.blob();
  return a;
}

void put_mics(ByteWriter& w, const std::vector<Mic>& mics) {
  if (mics.size() > kMaxMics) throw std::length_error("too many mics");
  w.u8(static_cast<std::uint8_t>(mics.size()));
  for (const auto& m : mics) {
    w.u8(static_cast<std::uint8_t>(m.scheme));
    if (m.bytes.size() != mic_length(m.scheme))
      throw std::length_error("mic length does not match its scheme");
    w.u8(static_cast<std::uint8_t>(m.bytes.size()));
    w.raw(m.bytes);
  }
}

std::vector<Mic> get_mics(ByteReader& r) {
  std::uint8_t count = r.u8();
  if (count > kMaxMics) throw MalformedMessage("mic count out of range");
  std::vector<Mic> mics;
  mics.reserve(count);
  for (std::uint8_t i = 0; i < count; ++i) {
    std::uint8_t scheme = r.u8();
    if (scheme != static_cast<std::uint8_t>(MicScheme::CbcResidue) &&
        scheme != static_cast<std::uint8_t>(MicScheme::KeyedHash))
      throw MalformedMessage("unknown mic scheme");
    Mic m;
    m.scheme = static_cast<MicScheme>(scheme);
    std::uint8_t len = r.u8();
    if (len != mic_length(m.scheme)) throw MalformedMessage("bad mic length");
    m.bytes = r.raw(len);
    mics.push_back(std::move(m));
  }
  return mics;
}

struct BodyWriter {
  ByteWriter& w;

  void operator()(const ArpRequestBody& b) {
    put_ip(w, b.sender_ip);
    put_mac(w, b.sender_mac);
    put_ip(w, b.target_ip);
  }
  void operator()(const ArpReplyBody& b) {
    put_ip(w, b.sender_ip);
    put_mac(w, b.sender_mac);
    put_ip(w, b.target_ip);
    put_mac(w, b.target_mac);
  }
  void operator()(const SuarpReqBody& b) {
    put_ip(w, b.ip_a);
    put_mac(w, b.mac_a);
    put_ip(w, b.ip_b);
  }
  void operator()(const SuarpResBody& b) {
    put_ip(w, b.ip_a);
    put_mac(w, b.mac_a);
    put_ip(w, b.ip_b);
    put_mac(w, b.mac_b);
    w.u64(b.t_s.ticks);
  }
  void operator()(const SuarpAckBody& b) { put_ack_fields(w, b); }
  void operator()(const DhcpDiscoverBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
  }
  void operator()(const DhcpOfferBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
    put_ip(w, b.offered_ip);
    w.u64(b.lease_duration.ticks);
    put_ip(w, b.server_id);
  }
  void operator()(const DhcpRequestBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
    put_ip(w, b.requested_ip);
    put_ip(w, b.server_id);
  }
  void operator()(const DhcpAckBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
    put_ip(w, b.leased_ip);
    w.u64(b.lease_duration.ticks);
    put_ip(w, b.server_id);
    w.u64(b.t_s.ticks);
    w.blob(b.cipher);
  }
  void operator()(const DhcpNakBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
    put_ip(w, b.server_id);
  }
  void operator()(const DhcpDeclineBody& b) {
    w.u32(b.xid);
    put_mac(w, b.client_mac);
    put_ip(w, b.declined_ip);
    put_ip(w, b.server_id);
  }
  void operator()(const RegistrationAdvertBody& b) {
    put_ip(w, b.ip);
    put_mac(w, b.mac);
    w.blob(b.cipher);
  }
  void operator()(const DataBody& b) {
    put_ip(w, b.src_ip);
    put_ip(w, b.dst_ip);
    w.u16(b.payload_len);
    w.u8(b.ack.has_value() ? 1 : 0);
    if (b.ack) {
      put_ack_fields(w, b.ack->ack);
      put_mics(w, b.ack->mics);
    }
  }
};

MessageBody read_body(MsgKind kind, ByteReader& r) {
  switch (kind) {
    case MsgKind::ArpRequest: {
      ArpRequestBody b;
      b.sender_ip = get_ip(r);
      b.sender_mac = get_mac(r);
      b.target_ip = get_ip(r);
      return b;
    }
    case MsgKind::ArpReply: {
      ArpReplyBody b;
      b.sender_ip = get_ip(r);
      b.sender_mac = get_mac(r);
      b.target_ip = get_ip(r);
      b.target_mac = get_mac(r);
      return b;
    }
    case MsgKind::SuarpReq: {
      SuarpReqBody b;
      b.ip_a = get_ip(r);
      b.mac_a = get_mac(r);
      b.ip_b = get_ip(r);
      return b;
    }
    case MsgKind::SuarpRes: {
      SuarpResBody b;
      b.ip_a = get_ip(r);
      b.mac_a = get_mac(r);
      b.ip_b = get_ip(r);
      b.mac_b = get_mac(r);
      b.t_s = SimTime{r.u64()};
      return b;
    }
    case MsgKind::SuarpAck:
      return get_ack_fields(r);
    case MsgKind::DhcpDiscover: {
      DhcpDiscoverBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      return b;
    }
    case MsgKind::DhcpOffer: {
      DhcpOfferBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      b.offered_ip = get_ip(r);
      b.lease_duration = SimTime{r.u64()};
      b.server_id = get_ip(r);
      return b;
    }
    case MsgKind::DhcpRequest: {
      DhcpRequestBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      b.requested_ip = get_ip(r);
      b.server_id = get_ip(r);
      return b;
    }
    case MsgKind::DhcpAck: {
      DhcpAckBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      b.leased_ip = get_ip(r);
      b.lease_duration = SimTime{r.u64()};
      b.server_id = get_ip(r);
      b.t_s = SimTime{r.u64()};
      b.cipher = r.blob();
      return b;
    }
    case MsgKind::DhcpNak: {
      DhcpNakBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      b.server_id = get_ip(r);
      return b;
    }
    case MsgKind::DhcpDecline: {
      DhcpDeclineBody b;
      b.xid = r.u32();
      b.client_mac = get_mac(r);
      b.declined_ip = get_ip(r);
      b.server_id = get_ip(r);
      return b;
    }
    case MsgKind::RegistrationAdvert: {
      RegistrationAdvertBody b;
      b.ip = get_ip(r);
      b.mac = get_mac(r);
      b.cipher = r.blob();
      return b;
    }
    case MsgKind::Data: {
      DataBody b;
      b.src_ip = get_ip(r);
      b.dst_ip = get_ip(r);
      b.payload_len = r.u16();
      std::uint8_t flag = r.u8();
      if (flag > 1) throw MalformedMessage("bad ack flag");
      if (flag == 1) {
        PiggybackAck ack;
        ack.ack = get_ack_fields(r);
        ack.mics = get_mics(r);
        b.ack = std::move(ack);
      }
      return b;
    }
  }
  throw MalformedMessage("unknown kind tag");
}

}  // namespace

const char* msg_kind_name(MsgKind kind) {
  switch (kind) {
    case MsgKind::ArpRequest: return "ArpRequest";
    case MsgKind::ArpReply: return "ArpReply";
    case MsgKind::SuarpReq: return "SuarpReq";
    case MsgKind::SuarpRes: return "SuarpRes";
    case MsgKind::SuarpAck: return "SuarpAck";
    case MsgKind::DhcpDiscover: return "DhcpDiscover";
    case MsgKind::DhcpOffer: return "DhcpOffer";
    case MsgKind::DhcpRequest: return "DhcpRequest";
    case MsgKind::DhcpAck: return "DhcpAck";
    case MsgKind::DhcpNak: return "DhcpNak";
    case MsgKind::DhcpDecline: return "DhcpDecline";
    case MsgKind::RegistrationAdvert: return "RegistrationAdvert";
    case MsgKind::Data: return "Data";
  }
  return "Unknown";
}

MsgKind ProtocolMessage::kind() const {
  return static_cast<MsgKind>(body.index() + 1);
}

Bytes serialize_body(const MessageBody& body) {
  ByteWriter w;
  std::visit(BodyWriter{w}, body);
  return w.take();
}

Bytes serialize_message(const ProtocolMessage& msg) {
  ByteWriter w;
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(msg.kind()));
  std::visit(BodyWriter{w}, msg.body);
  put_mics(w, msg.mics);
  if (msg.masked.size() > 0xff) throw std::length_error("too many masked fields");
  w.u8(static_cast<std::uint8_t>(msg.masked.size()));
  for (const auto& field : msg.masked) w.blob(field);
  return w.take();
}

ProtocolMessage parse_message(ByteView bytes) {
  ByteReader r(bytes);
  std::uint8_t version = r.u8();
  if (version != kWireVersion) throw MalformedMessage("unsupported version");
  std::uint8_t tag = r.u8();
  if (tag < 1 || tag > static_cast<std::uint8_t>(MsgKind::Data))
    throw MalformedMessage("unknown kind tag");
  ProtocolMessage msg;
  msg.body = read_body(static_cast<MsgKind>(tag), r);
  msg.mics = get_mics(r);
  std::uint8_t masked_count = r.u8();
  for (std::uint8_t i = 0; i < masked_count; ++i) msg.masked.push_back(r.blob());
  if (!r.done()) throw MalformedMessage("trailing bytes");
  return msg;
}

ProtocolMessage make_message(MessageBody body, std::vector<Mic> mics,
                             std::vector<Bytes> masked) {
  ProtocolMessage msg;
  msg.body = std::move(body);
  msg.mics = std::move(mics);
  msg.masked = std::move(masked);
  return msg;
}

}  // namespace suarp::core
