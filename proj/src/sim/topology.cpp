#include "sim/topology.hpp"

#include <deque>
#include <set>

namespace suarp::sim {

const char* node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Host: return "host";
    case NodeKind::DhcpServer: return "dhcp_server";
    case NodeKind::DhcpPlus: return "dhcp_plus";
    case NodeKind::DhcpMinus: return "dhcp_minus";
    case NodeKind::Router: return "router";
    case NodeKind::Adversary: return "adversary";
  }
  return "unknown";
}

int Topology::add_segment(std::string name) {
  segments_.push_back(std::move(name));
  return static_cast<int>(segments_.size()) - 1;
}

int Topology::add_node(NodeSpec spec) {
  nodes_.push_back(std::move(spec));
  return static_cast<int>(nodes_.size()) - 1;
}

void Topology::finalize() {
  per_segment_nodes_.assign(segments_.size(), {});
  ip_index_.clear();

  std::set<MacAddress> macs;
  std::set<std::string> names;
  for (int id = 0; id < node_count(); ++id) {
    const NodeSpec& n = nodes_[static_cast<std::size_t>(id)];
    if (n.name.empty()) throw ConfigError("node without a name");
    if (!names.insert(n.name).second)
      throw ConfigError("duplicate node name: " + n.name);
    if (n.attachments.empty())
      throw ConfigError("node " + n.name + " has no attachment");
    if (n.kind != NodeKind::Router && n.attachments.size() != 1)
      throw ConfigError("only routers may attach to several segments: " + n.name);

    std::set<int> seen_segments;
    for (std::size_t a = 0; a < n.attachments.size(); ++a) {
      const Attachment& att = n.attachments[a];
      if (att.segment < 0 || att.segment >= segment_count())
        throw ConfigError("node " + n.name + " references unknown segment");
      if (!seen_segments.insert(att.segment).second)
        throw ConfigError("node " + n.name + " attached twice to one segment");
      if (att.mac.is_broadcast() || att.mac.is_zero())
        throw ConfigError("node " + n.name + " has an invalid MAC");
      if (!macs.insert(att.mac).second)
        throw ConfigError("duplicate MAC " + att.mac.to_string());
      if (!att.ip.is_zero()) {
        auto [it, inserted] =
            ip_index_.try_emplace(att.ip, id, static_cast<int>(a));
        if (!inserted)
          throw ConfigError("duplicate IP " + att.ip.to_string());
      }
      if (att.relay) {
        if (n.kind != NodeKind::Router)
          throw ConfigError("relay agent on non-router node " + n.name);
        if (att.relay_server < 0 || att.relay_server >= node_count())
          throw ConfigError("relay agent on " + n.name + " has no server configured");
      }
      per_segment_nodes_[static_cast<std::size_t>(att.segment)].push_back(id);
    }
  }

  // BFS over the segment graph from every router: route_[r][target] is the
  // first hop r should use toward target.
  route_.assign(nodes_.size(), std::vector<std::optional<NextHop>>(
                                   segments_.size(), std::nullopt));
  gateway_.assign(segments_.size(), std::nullopt);

  for (int seg = 0; seg < segment_count(); ++seg) {
    for (int id : per_segment_nodes_[static_cast<std::size_t>(seg)]) {
      if (nodes_[static_cast<std::size_t>(id)].kind == NodeKind::Router) {
        if (!gateway_[static_cast<std::size_t>(seg)]) {
          const auto& atts = nodes_[static_cast<std::size_t>(id)].attachments;
          for (std::size_t a = 0; a < atts.size(); ++a)
            if (atts[a].segment == seg)
              gateway_[static_cast<std::size_t>(seg)] = {id, static_cast<int>(a)};
        }
      }
    }
  }

  for (int router = 0; router < node_count(); ++router) {
    const NodeSpec& r = nodes_[static_cast<std::size_t>(router)];
    if (r.kind != NodeKind::Router) continue;

    // Local segments first.
    for (std::size_t a = 0; a < r.attachments.size(); ++a) {
      NextHop hop;
      hop.attachment = static_cast<int>(a);
      hop.next_segment = r.attachments[a].segment;
      hop.local = true;
      route_[static_cast<std::size_t>(router)]
            [static_cast<std::size_t>(r.attachments[a].segment)] = hop;
    }

    // BFS outward through neighboring routers.
    std::deque<int> frontier;
    for (const auto& att : r.attachments) frontier.push_back(att.segment);
    std::set<int> visited(frontier.begin(), frontier.end());
    while (!frontier.empty()) {
      int seg = frontier.front();
      frontier.pop_front();
      const NextHop& via = *route_[static_cast<std::size_t>(router)][static_cast<std::size_t>(seg)];
      for (int neighbor_id : per_segment_nodes_[static_cast<std::size_t>(seg)]) {
        if (neighbor_id == router) continue;
        const NodeSpec& neighbor = nodes_[static_cast<std::size_t>(neighbor_id)];
        if (neighbor.kind != NodeKind::Router) continue;
        for (std::size_t na = 0; na < neighbor.attachments.size(); ++na) {
          int next_seg = neighbor.attachments[na].segment;
          if (visited.count(next_seg)) continue;
          visited.insert(next_seg);
          NextHop hop;
          if (via.local) {
            // First hop leaves through our own attachment on `seg` toward
            // the neighbor router's MAC on that shared segment.
            hop.attachment = via.attachment;
            for (const auto& natt : neighbor.attachments)
              if (natt.segment == seg) hop.next_mac = natt.mac;
            hop.local = false;
          } else {
            hop = via;  // same first hop as the segment we reached this through
          }
          hop.next_segment = next_seg;
          route_[static_cast<std::size_t>(router)][static_cast<std::size_t>(next_seg)] = hop;
          frontier.push_back(next_seg);
        }
      }
    }
  }

  finalized_ = true;
}

const std::vector<int>& Topology::nodes_on_segment(int segment) const {
  return per_segment_nodes_.at(static_cast<std::size_t>(segment));
}

std::optional<int> Topology::find_node(const std::string& name) const {
  for (int id = 0; id < node_count(); ++id)
    if (nodes_[static_cast<std::size_t>(id)].name == name) return id;
  return std::nullopt;
}

std::optional<std::pair<int, int>> Topology::find_by_ip(const IpAddress& ip) const {
  auto it = ip_index_.find(ip);
  if (it == ip_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<NextHop> Topology::next_hop(int router, int target_segment) const {
  if (router < 0 || router >= node_count()) return std::nullopt;
  if (target_segment < 0 || target_segment >= segment_count()) return std::nullopt;
  return route_[static_cast<std::size_t>(router)][static_cast<std::size_t>(target_segment)];
}

std::optional<std::pair<int, int>> Topology::gateway(int segment) const {
  return gateway_.at(static_cast<std::size_t>(segment));
}

std::optional<int> Topology::segment_of_ip(const IpAddress& ip) const {
  auto owner = find_by_ip(ip);
  if (!owner) return std::nullopt;
  return nodes_[static_cast<std::size_t>(owner->first)]
      .attachments[static_cast<std::size_t>(owner->second)]
      .segment;
}

}  // namespace suarp::sim
