#pragma once

#include <map>
#include <optional>
#include <vector>

#include "core/address.hpp"
#include "core/sim_time.hpp"

namespace suarp::agents {

using core::IpAddress;
using core::MacAddress;
using core::SimTime;

/// Per-host IP-to-MAC map with insertion timestamps and TTL (t4).
/// Insertion overwrites unconditionally; on legacy stacks that is exactly
/// the behavior poisoning exploits.
class ResolutionCache {
 public:
  struct Entry {
    MacAddress mac;
    SimTime inserted_at;
  };

  explicit ResolutionCache(SimTime ttl) : ttl_(ttl) {}

  /// Fresh entries only: an entry inserted at T answers lookups strictly
  /// before T + ttl.
  std::optional<MacAddress> lookup(const IpAddress& ip, SimTime now) const {
    auto it = entries_.find(ip);
    if (it == entries_.end()) return std::nullopt;
    if (now - it->second.inserted_at >= ttl_) return std::nullopt;
    return it->second.mac;
  }

  void insert(const IpAddress& ip, const MacAddress& mac, SimTime now) {
    entries_[ip] = Entry{mac, now};
  }

  std::optional<Entry> raw_entry(const IpAddress& ip) const {
    auto it = entries_.find(ip);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  SimTime ttl() const { return ttl_; }
  const std::map<IpAddress, Entry>& entries() const { return entries_; }

 private:
  SimTime ttl_;
  std::map<IpAddress, Entry> entries_;
};

enum class LeaseState { Offered, Bound, Expired };

struct Lease {
  IpAddress ip;
  MacAddress client_mac;
  std::uint32_t xid{0};
  SimTime granted_at;      // offer time until bound, then bind/renew time
  SimTime duration;
  LeaseState state{LeaseState::Offered};
  std::optional<IpAddress> reply_via;  // relay attachment that carried the DISCOVER
};

/// Server-side address pool. Offered leases are reserved until the client
/// formally requests them or the hold period lapses; expiry is evaluated
/// lazily against the clock.
class LeasePool {
 public:
  LeasePool() = default;
  LeasePool(IpAddress first, IpAddress last, SimTime lease_duration,
            SimTime offer_hold)
      : first_(first), last_(last), lease_duration_(lease_duration),
        offer_hold_(offer_hold) {}

  /// Reserve an address for `mac`: an existing live lease for the same
  /// client is re-offered, otherwise the lowest free address is taken.
  std::optional<Lease*> offer(const MacAddress& mac, std::uint32_t xid,
                              SimTime now,
                              std::optional<IpAddress> reply_via);

  /// Promote the offered lease to Bound (the formal request succeeded).
  Lease* bind(const MacAddress& mac, const IpAddress& ip, std::uint32_t xid,
              SimTime now);

  /// Renewal restarts the clock on a live Bound lease.
  bool renew(const MacAddress& mac, const IpAddress& ip, SimTime now);

  /// Drop the reservation (other server selected, or DHCPDECLINE).
  void release(const MacAddress& mac, std::uint32_t xid);

  LeaseState effective_state(const Lease& lease, SimTime now) const;
  const Lease* find_bound(const IpAddress& ip, SimTime now) const;
  const Lease* find_by_mac(const MacAddress& mac, SimTime now) const;
  const std::vector<Lease>& leases() const { return leases_; }
  SimTime lease_duration() const { return lease_duration_; }

  /// True when no two live leases share an address (checked by tests after
  /// every scenario event).
  bool unique_live_ips(SimTime now) const;

 private:
  bool ip_live(const IpAddress& ip, SimTime now) const;
  std::optional<IpAddress> lowest_free(SimTime now) const;

  IpAddress first_;
  IpAddress last_;
  SimTime lease_duration_{SimTime::minutes(10)};
  SimTime offer_hold_{SimTime::seconds(2)};
  std::vector<Lease> leases_;
};

}  // namespace suarp::agents
