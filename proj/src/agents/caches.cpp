#include "agents/caches.hpp"

namespace suarp::agents {

namespace {

std::uint32_t ip_value(const IpAddress& ip) {
  return static_cast<std::uint32_t>(ip.octets[0]) << 24 |
         static_cast<std::uint32_t>(ip.octets[1]) << 16 |
         static_cast<std::uint32_t>(ip.octets[2]) << 8 |
         static_cast<std::uint32_t>(ip.octets[3]);
}

IpAddress ip_from_value(std::uint32_t v) {
  IpAddress ip;
  ip.octets = {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
               static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  return ip;
}

}  // namespace

LeaseState LeasePool::effective_state(const Lease& lease, SimTime now) const {
  switch (lease.state) {
    case LeaseState::Offered:
      return (now - lease.granted_at >= offer_hold_) ? LeaseState::Expired
                                                     : LeaseState::Offered;
    case LeaseState::Bound:
      return (now - lease.granted_at >= lease.duration) ? LeaseState::Expired
                                                        : LeaseState::Bound;
    case LeaseState::Expired:
      return LeaseState::Expired;
  }
  return LeaseState::Expired;
}

bool LeasePool::ip_live(const IpAddress& ip, SimTime now) const {
  for (const auto& lease : leases_)
    if (lease.ip == ip && effective_state(lease, now) != LeaseState::Expired)
      return true;
  return false;
}

std::optional<IpAddress> LeasePool::lowest_free(SimTime now) const {
  for (std::uint32_t v = ip_value(first_); v <= ip_value(last_); ++v) {
    IpAddress candidate = ip_from_value(v);
    if (!ip_live(candidate, now)) return candidate;
  }
  return std::nullopt;
}

std::optional<Lease*> LeasePool::offer(const MacAddress& mac, std::uint32_t xid,
                                       SimTime now,
                                       std::optional<IpAddress> reply_via) {
  // A client with a live lease is re-offered the same address.
  for (auto& lease : leases_) {
    if (lease.client_mac == mac &&
        effective_state(lease, now) != LeaseState::Expired) {
      lease.xid = xid;
      lease.reply_via = reply_via;
      if (lease.state == LeaseState::Offered) lease.granted_at = now;
      return &lease;
    }
  }
  auto ip = lowest_free(now);
  if (!ip) return std::nullopt;  // pool exhausted

  // Recycle an expired record for this address if one exists.
  for (auto& lease : leases_) {
    if (lease.ip == *ip) {
      lease = Lease{*ip, mac, xid, now, lease_duration_, LeaseState::Offered,
                    reply_via};
      return &lease;
    }
  }
  leases_.push_back(
      Lease{*ip, mac, xid, now, lease_duration_, LeaseState::Offered, reply_via});
  return &leases_.back();
}

Lease* LeasePool::bind(const MacAddress& mac, const IpAddress& ip,
                       std::uint32_t xid, SimTime now) {
  for (auto& lease : leases_) {
    if (lease.client_mac != mac || lease.ip != ip) continue;
    LeaseState state = effective_state(lease, now);
    if (state == LeaseState::Expired) continue;
    lease.state = LeaseState::Bound;
    lease.xid = xid;
    lease.granted_at = now;
    lease.duration = lease_duration_;
    return &lease;
  }
  return nullptr;
}

bool LeasePool::renew(const MacAddress& mac, const IpAddress& ip, SimTime now) {
  for (auto& lease : leases_) {
    if (lease.client_mac != mac || lease.ip != ip) continue;
    if (lease.state != LeaseState::Bound) continue;
    if (effective_state(lease, now) == LeaseState::Expired) {
      lease.state = LeaseState::Expired;
      return false;
    }
    lease.granted_at = now;
    return true;
  }
  return false;
}

void LeasePool::release(const MacAddress& mac, std::uint32_t xid) {
  for (auto& lease : leases_) {
    if (lease.client_mac == mac && lease.xid == xid &&
        lease.state == LeaseState::Offered) {
      lease.state = LeaseState::Expired;
    }
  }
}

const Lease* LeasePool::find_bound(const IpAddress& ip, SimTime now) const {
  for (const auto& lease : leases_)
    if (lease.ip == ip && lease.state == LeaseState::Bound &&
        effective_state(lease, now) == LeaseState::Bound)
      return &lease;
  return nullptr;
}

const Lease* LeasePool::find_by_mac(const MacAddress& mac, SimTime now) const {
  for (const auto& lease : leases_)
    if (lease.client_mac == mac &&
        effective_state(lease, now) != LeaseState::Expired)
      return &lease;
  return nullptr;
}

bool LeasePool::unique_live_ips(SimTime now) const {
  for (std::size_t i = 0; i < leases_.size(); ++i) {
    if (effective_state(leases_[i], now) == LeaseState::Expired) continue;
    for (std::size_t j = i + 1; j < leases_.size(); ++j) {
      if (effective_state(leases_[j], now) == LeaseState::Expired) continue;
      if (leases_[i].ip == leases_[j].ip) return false;
    }
  }
  return true;
}

}  // namespace suarp::agents
