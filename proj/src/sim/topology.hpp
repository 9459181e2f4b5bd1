#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/address.hpp"

namespace suarp::sim {

using core::IpAddress;
using core::MacAddress;

enum class NodeKind {
  Host,
  DhcpServer,  // legacy
  DhcpPlus,    // leases addresses and answers unicast resolution queries
  DhcpMinus,   // registration-only server for static addressing
  Router,
  Adversary,
};

const char* node_kind_name(NodeKind kind);

struct Attachment {
  int segment{-1};
  MacAddress mac;
  IpAddress ip;            // zero until a lease is bound (DHCP hosts)
  bool relay{false};       // forward client DHCP broadcasts from this segment
  int relay_server{-1};    // node id of the configured server
};

struct NodeSpec {
  std::string name;
  NodeKind kind{NodeKind::Host};
  std::vector<Attachment> attachments;
};

struct NextHop {
  int attachment{-1};      // outbound attachment index on the forwarding node
  int next_segment{-1};
  MacAddress next_mac;     // next router hop; zero when the target segment is local
  bool local{false};       // target segment is directly attached
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what)
      : std::runtime_error("config error: " + what) {}
};

/// Static network shape: broadcast segments joined by routers. finalize()
/// validates the shape (network-wide unique MACs, resolvable references)
/// and precomputes segment routing and per-segment gateways.
class Topology {
 public:
  int add_segment(std::string name);
  int add_node(NodeSpec spec);

  void finalize();

  int segment_count() const { return static_cast<int>(segments_.size()); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::string& segment_name(int id) const { return segments_.at(static_cast<std::size_t>(id)); }
  const NodeSpec& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  NodeSpec& node_mutable(int id) { return nodes_.at(static_cast<std::size_t>(id)); }

  const std::vector<int>& nodes_on_segment(int segment) const;

  std::optional<int> find_node(const std::string& name) const;

  /// Owner of a statically assigned IP, as (node, attachment index).
  std::optional<std::pair<int, int>> find_by_ip(const IpAddress& ip) const;

  /// Shortest path forwarding decision for `router` toward `target_segment`.
  std::optional<NextHop> next_hop(int router, int target_segment) const;

  /// Deterministic default gateway of a segment: the lowest-id router
  /// attached to it, as (node, attachment index).
  std::optional<std::pair<int, int>> gateway(int segment) const;

  std::optional<int> segment_of_ip(const IpAddress& ip) const;

 private:
  std::vector<std::string> segments_;
  std::vector<NodeSpec> nodes_;

  bool finalized_{false};
  std::vector<std::vector<int>> per_segment_nodes_;
  std::map<IpAddress, std::pair<int, int>> ip_index_;
  // route_[node][target_segment]
  std::vector<std::vector<std::optional<NextHop>>> route_;
  std::vector<std::optional<std::pair<int, int>>> gateway_;
};

}  // namespace suarp::sim
