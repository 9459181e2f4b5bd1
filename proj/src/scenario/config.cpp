#include "scenario/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crypto/sha1.hpp"

namespace suarp::scenario {

namespace {

using nlohmann::json;

core::MacAddress parse_mac_field(const json& value, const std::string& where) {
  auto mac = core::MacAddress::parse(value.get<std::string>());
  if (!mac) throw ConfigError(where + ": bad MAC " + value.get<std::string>());
  return *mac;
}

core::IpAddress parse_ip_field(const json& value, const std::string& where) {
  auto ip = core::IpAddress::parse(value.get<std::string>());
  if (!ip) throw ConfigError(where + ": bad IP " + value.get<std::string>());
  return *ip;
}

sim::NodeKind parse_kind(const std::string& kind, const std::string& where) {
  if (kind == "host") return sim::NodeKind::Host;
  if (kind == "dhcp_server") return sim::NodeKind::DhcpServer;
  if (kind == "dhcp_plus") return sim::NodeKind::DhcpPlus;
  if (kind == "dhcp_minus") return sim::NodeKind::DhcpMinus;
  if (kind == "router") return sim::NodeKind::Router;
  if (kind == "adversary") return sim::NodeKind::Adversary;
  throw ConfigError(where + ": unknown node kind " + kind);
}

agents::SuarpVariant parse_suarp_variant(const std::string& name) {
  if (name == "base") return agents::SuarpVariant::Base;
  if (name == "v1") return agents::SuarpVariant::AltV1;
  if (name == "v2") return agents::SuarpVariant::AltV2;
  throw ConfigError("unknown variant " + name);
}

agents::SdhcpVariant parse_sdhcp_variant(const std::string& name) {
  if (name == "base") return agents::SdhcpVariant::Base;
  if (name == "v1") return agents::SdhcpVariant::AltV1;
  if (name == "v2") return agents::SdhcpVariant::AltV2;
  throw ConfigError("unknown variant " + name);
}

AttachmentConfig parse_attachment(const json& node, const std::string& where) {
  AttachmentConfig att;
  att.segment = node.at("segment").get<std::string>();
  att.mac = parse_mac_field(node.at("mac"), where);
  if (node.contains("ip")) att.ip = parse_ip_field(node.at("ip"), where);
  if (node.contains("relay_server"))
    att.relay_server = node.at("relay_server").get<std::string>();
  return att;
}

core::Bytes parse_hex(const std::string& hex, const std::string& where) {
  if (hex.size() % 2 != 0) throw ConfigError(where + ": odd hex length");
  core::Bytes out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    auto nibble = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw ConfigError(where + ": bad hex digit");
    };
    out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  return out;
}

}  // namespace

core::Bytes derived_key(const core::MacAddress& host, const core::MacAddress& server) {
  core::Bytes input{'k', 'e', 'y', ':'};
  input.insert(input.end(), host.octets.begin(), host.octets.end());
  input.insert(input.end(), server.octets.begin(), server.octets.end());
  auto digest = crypto::sha1(input);
  return core::Bytes(digest.begin(), digest.begin() + 16);
}

core::Bytes derived_rn(const core::MacAddress& host, const core::MacAddress& server) {
  core::Bytes input{'r', 'n', ':'};
  input.insert(input.end(), host.octets.begin(), host.octets.end());
  input.insert(input.end(), server.octets.begin(), server.octets.end());
  auto digest = crypto::sha1(input);
  return core::Bytes(digest.begin(), digest.begin() + 16);
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  ScenarioConfig cfg;
  try {
    cfg.name = root.value("name", cfg.name);
    cfg.duration = core::SimTime::ms(root.value("duration_ms", 60'000ull));
    cfg.seed = root.value("seed", 1ull);
    cfg.record_trace = root.value("record_trace", true);
    if (root.contains("timers")) {
      const auto& t = root["timers"];
      cfg.timers.t1 = core::SimTime::ms(t.value("t1", 500ull));
      cfg.timers.t2 = core::SimTime::ms(t.value("t2", 200ull));
      cfg.timers.t3 = core::SimTime::ms(t.value("t3", 1000ull));
      cfg.timers.t4 = core::SimTime::ms(t.value("t4", 300'000ull));
      cfg.timers.delta_t = core::SimTime::ms(t.value("delta_t", 300ull));
    }
    cfg.propagation_delay =
        core::SimTime::ms(root.value("propagation_delay_ms", 1ull));
    if (root.contains("loss")) {
      cfg.drop_probability = root["loss"].value("drop_probability", 0.0);
      if (root["loss"].contains("per_segment"))
        for (const auto& [segment, p] : root["loss"]["per_segment"].items())
          cfg.per_segment_loss[segment] = p.get<double>();
    }
    cfg.gratuitous_learning = root.value("gratuitous_learning", true);
    cfg.arp_retry_limit = root.value("arp_retry_limit", 3);
    cfg.suarp_retry_limit = root.value("suarp_retry_limit", 3);
    cfg.server_retransmit_limit = root.value("server_retransmit_limit", 3);

    if (root.contains("arp")) {
      std::string mode = root["arp"].value("mode", "legacy");
      if (mode == "legacy") cfg.arp_mode = ArpMode::Legacy;
      else if (mode == "suarp") cfg.arp_mode = ArpMode::Suarp;
      else if (mode == "static") cfg.arp_mode = ArpMode::Static;
      else throw ConfigError("arp.mode must be legacy|suarp|static");
      cfg.suarp_variant = parse_suarp_variant(root["arp"].value("variant", "base"));
      cfg.arp_server = root["arp"].value("server", "");
    }
    if (root.contains("dhcp")) {
      std::string mode = root["dhcp"].value("mode", "none");
      if (mode == "none") cfg.dhcp_mode = DhcpMode::None;
      else if (mode == "legacy") cfg.dhcp_mode = DhcpMode::Legacy;
      else if (mode == "sdhcp") cfg.dhcp_mode = DhcpMode::Sdhcp;
      else throw ConfigError("dhcp.mode must be none|legacy|sdhcp");
      cfg.sdhcp_variant = parse_sdhcp_variant(root["dhcp"].value("variant", "base"));
      cfg.encrypt_ack = root["dhcp"].value("encrypt_ack", false);
      cfg.auto_renew = root["dhcp"].value("auto_renew", false);
    }

    for (const auto& segment : root.at("segments"))
      cfg.segments.push_back(segment.get<std::string>());

    for (const auto& jnode : root.at("nodes")) {
      NodeConfig node;
      node.name = jnode.at("name").get<std::string>();
      node.kind = parse_kind(jnode.value("kind", "host"), node.name);

      if (jnode.contains("attachments")) {
        for (const auto& jatt : jnode["attachments"])
          node.attachments.push_back(parse_attachment(jatt, node.name));
      } else {
        node.attachments.push_back(parse_attachment(jnode, node.name));
      }

      if (jnode.contains("pool")) {
        node.pool_first = parse_ip_field(jnode["pool"].at(0), node.name);
        node.pool_last = parse_ip_field(jnode["pool"].at(1), node.name);
      }
      node.lease_duration = core::SimTime::ms(jnode.value("lease_ms", 600'000ull));
      node.offer_hold = core::SimTime::ms(jnode.value("offer_hold_ms", 2'000ull));
      node.force_active = jnode.value("force_active", false);
      if (jnode.contains("mappings"))
        for (const auto& [ip_text, mac_value] : jnode["mappings"].items())
          node.mappings[*core::IpAddress::parse(ip_text)] =
              parse_mac_field(mac_value, node.name);

      if (jnode.contains("tap")) {
        node.adversary.inject = jnode["tap"].value("inject", false);
        node.adversary.mitm = jnode["tap"].value("mitm", false);
        node.adversary.promiscuous = jnode["tap"].value("promiscuous", false);
      }
      node.adversary.has_key = jnode.value("has_key", false);
      if (jnode.contains("poison")) {
        agents::PoisonPlan plan;
        for (const auto& pair : jnode["poison"].at("pairs"))
          plan.pairs.push_back({parse_ip_field(pair.at(0), node.name),
                                parse_ip_field(pair.at(1), node.name)});
        plan.cadence = core::SimTime::ms(jnode["poison"].value("cadence_ms", 100ull));
        plan.rounds = jnode["poison"].value("rounds", 1);
        plan.forged_per_round = jnode["poison"].value("forged_per_round", 1);
        plan.forge_requests = jnode["poison"].value("forge_requests", true);
        node.adversary.poison = plan;
      }
      if (jnode.contains("spoof")) {
        agents::SpoofPlan plan;
        plan.cloned_mac = parse_mac_field(jnode["spoof"].at("cloned_mac"), node.name);
        plan.dos_first = jnode["spoof"].value("dos_first", true);
        plan.attempts = jnode["spoof"].value("attempts", 1);
        plan.spacing = core::SimTime::ms(jnode["spoof"].value("spacing_ms", 150ull));
        node.adversary.spoof = plan;
        node.adversary.spoof_victim = jnode["spoof"].value("victim", "");
      }
      if (jnode.contains("insider")) {
        agents::InsiderPlan plan;
        plan.forgeries_per_exchange = jnode["insider"].value("forgeries", 100);
        node.adversary.insider = plan;
        node.adversary.insider_victim = jnode["insider"].at("victim").get<std::string>();
        node.adversary.insider_server = jnode["insider"].at("server").get<std::string>();
      }
      cfg.nodes.push_back(std::move(node));
    }

    if (root.contains("keys")) {
      for (const auto& jkey : root["keys"]) {
        KeyEntry entry;
        entry.host = jkey.at("host").get<std::string>();
        entry.server = jkey.at("server").get<std::string>();
        entry.key = parse_hex(jkey.at("key").get<std::string>(), "keys");
        entry.rn = parse_hex(jkey.at("rn").get<std::string>(), "keys");
        std::string side = jkey.value("side", "both");
        if (side == "host") entry.side = KeyEntry::Side::HostOnly;
        else if (side == "server") entry.side = KeyEntry::Side::ServerOnly;
        else if (side == "both") entry.side = KeyEntry::Side::Both;
        else throw ConfigError("keys.side must be both|host|server");
        cfg.keys.push_back(std::move(entry));
      }
    }
    cfg.provision_all = root.value("provision_all", true);

    if (root.contains("traffic")) {
      for (const auto& jentry : root["traffic"]) {
        TrafficEntry entry;
        entry.at = core::SimTime::ms(jentry.at("at").get<std::uint64_t>());
        entry.node = jentry.at("node").get<std::string>();
        std::string action = jentry.at("action").get<std::string>();
        if (action == "resolve") entry.verb = sim::AgentAction::Verb::Resolve;
        else if (action == "data") entry.verb = sim::AgentAction::Verb::SendData;
        else if (action == "dhcp_acquire") entry.verb = sim::AgentAction::Verb::DhcpAcquire;
        else if (action == "dhcp_renew") entry.verb = sim::AgentAction::Verb::DhcpRenew;
        else if (action == "detach") entry.verb = sim::AgentAction::Verb::Detach;
        else if (action == "attach") entry.verb = sim::AgentAction::Verb::Attach;
        else if (action == "attack") entry.verb = sim::AgentAction::Verb::AdversaryKick;
        else throw ConfigError("unknown traffic action " + action);
        if (jentry.contains("target"))
          entry.target = parse_ip_field(jentry["target"], "traffic");
        entry.size = jentry.value("size", 64u);
        entry.repeat = jentry.value("repeat", 1);
        entry.every = core::SimTime::ms(jentry.value("every", 0ull));
        cfg.traffic.push_back(entry);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

void ScenarioConfig::validate() {
  timers.validate();

  std::set<std::string> segment_names(segments.begin(), segments.end());
  if (segment_names.size() != segments.size())
    throw ConfigError("duplicate segment name");

  std::set<std::string> node_names;
  for (const auto& node : nodes) {
    if (!node_names.insert(node.name).second)
      throw ConfigError("duplicate node name " + node.name);
    for (const auto& att : node.attachments)
      if (!segment_names.count(att.segment))
        throw ConfigError(node.name + " references unknown segment " + att.segment);
  }
  auto find_node = [&](const std::string& name) -> const NodeConfig* {
    for (const auto& node : nodes)
      if (node.name == name) return &node;
    return nullptr;
  };

  for (const auto& node : nodes) {
    for (const auto& att : node.attachments) {
      if (att.relay_server) {
        if (node.kind != sim::NodeKind::Router)
          throw ConfigError("relay agent on non-router " + node.name);
        const NodeConfig* server = find_node(*att.relay_server);
        if (!server)
          throw ConfigError("relay agent on " + node.name +
                            " has no server configured: unknown node " +
                            *att.relay_server);
      }
    }
    if (node.kind == sim::NodeKind::Adversary) {
      if ((node.adversary.poison || node.adversary.spoof) && !node.adversary.inject)
        throw ConfigError("adversary " + node.name + " needs an inject tap");
      if (node.adversary.spoof && !node.adversary.spoof_victim.empty() &&
          !find_node(node.adversary.spoof_victim))
        throw ConfigError("spoof victim not found: " + node.adversary.spoof_victim);
      if (node.adversary.poison)
        for (const auto& pair : node.adversary.poison->pairs)
          if (pair.victim_ip == pair.impersonated_ip)
            throw ConfigError("poison pair with identical victim and impersonated IP");
      if (node.adversary.insider) {
        if (!find_node(node.adversary.insider_victim) ||
            !find_node(node.adversary.insider_server))
          throw ConfigError("insider plan references unknown nodes");
      }
    }
  }

  // Resolution server default: the first DHCP+ (dynamic) or DHCP- (static).
  if (arp_mode != ArpMode::Legacy && arp_server.empty()) {
    sim::NodeKind wanted = arp_mode == ArpMode::Static ? sim::NodeKind::DhcpMinus
                                                       : sim::NodeKind::DhcpPlus;
    for (const auto& node : nodes)
      if (node.kind == wanted) {
        arp_server = node.name;
        break;
      }
    if (arp_server.empty() && arp_mode == ArpMode::Static) {
      // Static hosts may also learn the server from identity adverts.
      for (const auto& node : nodes)
        if (node.kind == sim::NodeKind::DhcpMinus) arp_server = node.name;
    }
  }
  if (arp_mode == ArpMode::Suarp && arp_server.empty())
    throw ConfigError("suarp mode but no dhcp_plus server in topology");
  if (!arp_server.empty() && !find_node(arp_server))
    throw ConfigError("arp.server not found: " + arp_server);

  if (dhcp_mode == DhcpMode::Sdhcp) {
    bool has_plus = false;
    for (const auto& node : nodes)
      if (node.kind == sim::NodeKind::DhcpPlus) has_plus = true;
    if (!has_plus) throw ConfigError("sdhcp mode but no dhcp_plus server");
  }

  for (const auto& entry : traffic)
    if (!find_node(entry.node))
      throw ConfigError("traffic entry for unknown node " + entry.node);

  for (const auto& entry : keys) {
    if (!find_node(entry.host)) throw ConfigError("key entry for unknown host " + entry.host);
    if (!find_node(entry.server)) throw ConfigError("key entry for unknown server " + entry.server);
    if (entry.key.size() != 16) throw ConfigError("shared keys must be 16 bytes");
    if (entry.rn.size() != crypto::kNonceLen) throw ConfigError("rn must be 16 bytes");
  }

  // Secure modes demand provisioned keys for every participating host.
  bool secure = arp_mode != ArpMode::Legacy || dhcp_mode == DhcpMode::Sdhcp;
  if (secure && !provision_all && !arp_server.empty()) {
    for (const auto& node : nodes) {
      if (node.kind != sim::NodeKind::Host) continue;
      bool keyed = false;
      for (const auto& entry : keys)
        if (entry.host == node.name && entry.side != KeyEntry::Side::ServerOnly)
          keyed = true;
      if (!keyed)
        throw ConfigError("unprovisioned key for host " + node.name);
    }
  }
}

}  // namespace suarp::scenario
