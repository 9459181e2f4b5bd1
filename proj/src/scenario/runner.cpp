#include "scenario/runner.hpp"

#include <map>

#include <json.hpp>

#include "agents/router.hpp"

namespace suarp::scenario {

namespace {

using nlohmann::ordered_json;

struct BuildResult {
  sim::Sim sim;
  std::map<int, agents::HostAgent*> hosts;
  std::map<int, agents::ServerAgent*> servers;
  std::map<int, agents::AdversaryAgent*> adversaries;
  std::map<core::IpAddress, int> host_by_ip;  // static addresses only
};

int index_of(const ScenarioConfig& cfg, const std::string& name) {
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
    if (cfg.nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

/// The node hosts key against for both unicast resolution and secure DHCP.
int keying_server(const ScenarioConfig& cfg) {
  if (!cfg.arp_server.empty()) return index_of(cfg, cfg.arp_server);
  if (cfg.dhcp_mode == DhcpMode::Sdhcp)
    for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
      if (cfg.nodes[i].kind == sim::NodeKind::DhcpPlus) return static_cast<int>(i);
  return -1;
}

BuildResult build(const ScenarioConfig& cfg) {
  sim::Topology topo;
  std::map<std::string, int> segment_ids;
  for (const auto& segment : cfg.segments)
    segment_ids[segment] = topo.add_segment(segment);

  for (const auto& node : cfg.nodes) {
    sim::NodeSpec spec;
    spec.name = node.name;
    spec.kind = node.kind;
    for (const auto& att : node.attachments) {
      sim::Attachment attachment;
      attachment.segment = segment_ids.at(att.segment);
      attachment.mac = att.mac;
      attachment.ip = att.ip;
      if (att.relay_server) {
        attachment.relay = true;
        attachment.relay_server = index_of(cfg, *att.relay_server);
      }
      spec.attachments.push_back(attachment);
    }
    topo.add_node(std::move(spec));
  }
  topo.finalize();

  sim::SimConfig sim_cfg;
  sim_cfg.seed = cfg.seed;
  sim_cfg.propagation_delay = cfg.propagation_delay;
  sim_cfg.record_trace = cfg.record_trace;
  sim_cfg.loss.drop_probability = cfg.drop_probability;
  for (const auto& [segment, p] : cfg.per_segment_loss)
    sim_cfg.loss.per_segment[segment_ids.at(segment)] = p;

  BuildResult result{sim::Sim(std::move(topo), sim_cfg), {}, {}, {}, {}};
  sim::Sim& sim = result.sim;

  const int key_server = keying_server(cfg);
  core::MacAddress key_server_mac;
  if (key_server >= 0)
    key_server_mac = cfg.nodes[static_cast<std::size_t>(key_server)].attachments[0].mac;

  auto association_material =
      [&](const core::MacAddress& host_mac) -> std::pair<core::Bytes, core::Bytes> {
    return {derived_key(host_mac, key_server_mac), derived_rn(host_mac, key_server_mac)};
  };

  // Explicit key entries override derived material.
  auto explicit_entry = [&](const std::string& host) -> const KeyEntry* {
    for (const auto& entry : cfg.keys)
      if (entry.host == host) return &entry;
    return nullptr;
  };

  // Coexistence: legacy servers sharing a broadcast domain with a DHCP+
  // server resign to passive mode.
  std::vector<agents::ServerPresence> presences;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const NodeConfig& node = cfg.nodes[i];
    agents::ServerRole role;
    if (node.kind == sim::NodeKind::DhcpServer) role = agents::ServerRole::Legacy;
    else if (node.kind == sim::NodeKind::DhcpPlus) role = agents::ServerRole::Plus;
    else if (node.kind == sim::NodeKind::DhcpMinus) role = agents::ServerRole::Minus;
    else continue;
    presences.push_back({static_cast<int>(i), role,
                         segment_ids.at(node.attachments[0].segment),
                         node.force_active});
  }
  std::set<int> responders = agents::coexistence_arbitrate(presences);

  crypto::KeyStore server_store;  // accumulated below, one per server node
  std::map<int, crypto::KeyStore> server_stores;

  // Provision host-side stores and remember the server side.
  std::map<int, crypto::KeyStore> host_stores;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const NodeConfig& node = cfg.nodes[i];
    if (node.kind != sim::NodeKind::Host || key_server < 0) continue;
    const KeyEntry* entry = explicit_entry(node.name);
    core::MacAddress host_mac = node.attachments[0].mac;
    crypto::AssociationId id{host_mac, key_server_mac};

    core::Bytes key_bytes, rn_bytes;
    KeyEntry::Side side = KeyEntry::Side::Both;
    if (entry) {
      key_bytes = entry->key;
      rn_bytes = entry->rn;
      side = entry->side;
    } else if (cfg.provision_all) {
      std::tie(key_bytes, rn_bytes) = association_material(host_mac);
    } else {
      continue;
    }
    crypto::SharedKey key{key_bytes};
    crypto::Nonce rn{rn_bytes};
    if (side != KeyEntry::Side::ServerOnly)
      host_stores[static_cast<int>(i)].provision(id, key, rn);
    if (side != KeyEntry::Side::HostOnly)
      server_stores[key_server].provision(id, key, rn);
  }

  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const NodeConfig& node = cfg.nodes[i];
    const int node_id = static_cast<int>(i);
    switch (node.kind) {
      case sim::NodeKind::Host: {
        agents::HostOptions opts;
        opts.use_suarp = cfg.arp_mode != ArpMode::Legacy;
        opts.suarp_variant = cfg.suarp_variant;
        opts.static_registration = cfg.arp_mode == ArpMode::Static;
        opts.dhcp_mode = cfg.dhcp_mode == DhcpMode::None
                             ? agents::HostOptions::DhcpMode::None
                             : (cfg.dhcp_mode == DhcpMode::Legacy
                                    ? agents::HostOptions::DhcpMode::Legacy
                                    : agents::HostOptions::DhcpMode::Secure);
        opts.sdhcp_variant = cfg.sdhcp_variant;
        opts.auto_renew = cfg.auto_renew;
        opts.gratuitous_learning = cfg.gratuitous_learning;
        opts.arp_retry_limit = cfg.arp_retry_limit;
        opts.suarp_retry_limit = cfg.suarp_retry_limit;
        opts.timers = cfg.timers;
        opts.server_node = key_server;

        auto agent = std::make_unique<agents::HostAgent>(
            opts, std::move(host_stores[node_id]));
        result.hosts[node_id] = agent.get();
        if (!node.attachments[0].ip.is_zero())
          result.host_by_ip[node.attachments[0].ip] = node_id;
        sim.add_agent(node_id, std::move(agent));
        break;
      }
      case sim::NodeKind::DhcpServer:
      case sim::NodeKind::DhcpPlus:
      case sim::NodeKind::DhcpMinus: {
        agents::ServerOptions opts;
        opts.role = node.kind == sim::NodeKind::DhcpServer
                        ? agents::ServerRole::Legacy
                        : (node.kind == sim::NodeKind::DhcpPlus
                               ? agents::ServerRole::Plus
                               : agents::ServerRole::Minus);
        opts.passive = opts.role == agents::ServerRole::Legacy &&
                       responders.count(node_id) == 0;
        opts.pool_first = node.pool_first;
        opts.pool_last = node.pool_last;
        opts.lease_duration = node.lease_duration;
        opts.offer_hold = node.offer_hold;
        opts.secure_dhcp = cfg.dhcp_mode == DhcpMode::Sdhcp &&
                           opts.role == agents::ServerRole::Plus;
        opts.sdhcp_variant = cfg.sdhcp_variant;
        opts.encrypt_ack = cfg.encrypt_ack;
        opts.suarp_variant = cfg.suarp_variant;
        opts.retransmit_limit = cfg.server_retransmit_limit;
        opts.timers = cfg.timers;
        opts.static_mappings = node.mappings;

        crypto::KeyStore store;
        if (node_id == key_server) store = std::move(server_stores[node_id]);
        auto agent = std::make_unique<agents::ServerAgent>(opts, std::move(store));
        result.servers[node_id] = agent.get();
        sim.add_agent(node_id, std::move(agent));
        break;
      }
      case sim::NodeKind::Router:
        sim.add_agent(node_id, std::make_unique<agents::RouterAgent>());
        break;
      case sim::NodeKind::Adversary: {
        agents::AdversaryOptions opts;
        opts.inject = node.adversary.inject;
        opts.mitm = node.adversary.mitm;
        opts.promiscuous = node.adversary.promiscuous;
        opts.poison = node.adversary.poison;
        if (node.adversary.poison) {
          opts.poison->against_suarp = cfg.arp_mode != ArpMode::Legacy;
          opts.poison->suarp_variant = cfg.suarp_variant;
        }
        opts.spoof = node.adversary.spoof;
        if (node.adversary.spoof) {
          opts.spoof->victim_node = node.adversary.spoof_victim.empty()
                                        ? -1
                                        : index_of(cfg, node.adversary.spoof_victim);
          opts.spoof->against_sdhcp = cfg.dhcp_mode == DhcpMode::Sdhcp;
          opts.spoof->sdhcp_variant = cfg.sdhcp_variant;
        }
        opts.insider = node.adversary.insider;
        if (node.adversary.insider) {
          opts.insider->victim_node = index_of(cfg, node.adversary.insider_victim);
          opts.insider->server_node = index_of(cfg, node.adversary.insider_server);
        }

        crypto::KeyStore store;
        if (node.adversary.has_key && node.adversary.insider && key_server >= 0) {
          // The insider holds its victim's shared key.
          const NodeConfig& victim =
              cfg.nodes[static_cast<std::size_t>(index_of(cfg, node.adversary.insider_victim))];
          core::MacAddress victim_mac = victim.attachments[0].mac;
          const KeyEntry* entry = explicit_entry(victim.name);
          core::Bytes key_bytes, rn_bytes;
          if (entry) {
            key_bytes = entry->key;
            rn_bytes = entry->rn;
          } else {
            std::tie(key_bytes, rn_bytes) = association_material(victim_mac);
          }
          store.provision({victim_mac, key_server_mac},
                          crypto::SharedKey{key_bytes}, crypto::Nonce{rn_bytes});
        }
        auto agent = std::make_unique<agents::AdversaryAgent>(opts, std::move(store));
        result.adversaries[node_id] = agent.get();
        sim.add_agent(node_id, std::move(agent));
        break;
      }
    }
  }

  for (const auto& entry : cfg.traffic) {
    int node = index_of(cfg, entry.node);
    for (int i = 0; i < entry.repeat; ++i) {
      sim::AgentAction action;
      action.verb = entry.verb;
      action.target = entry.target;
      action.size = entry.size;
      core::SimTime at{entry.at.ticks + static_cast<std::uint64_t>(i) * entry.every.ticks};
      result.sim.schedule_action(at, node, action);
    }
  }
  return result;
}

ordered_json attack_outcomes_json(const std::vector<AttackOutcome>& outcomes) {
  ordered_json list = ordered_json::array();
  for (const auto& outcome : outcomes) {
    ordered_json entry;
    entry["adversary"] = outcome.adversary;
    entry["kind"] = outcome.kind;
    entry["attempts"] = outcome.attempts;
    entry["successes"] = outcome.successes;
    entry["intercepted"] = outcome.intercepted;
    entry["forwarded"] = outcome.forwarded;
    entry["first_success_ms"] = outcome.first_success_ms;
    entry["dwell_ms"] = outcome.dwell_ms;
    list.push_back(entry);
  }
  return list;
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
  BuildResult built = build(cfg);
  built.sim.run_until(cfg.duration);

  RunArtifacts artifacts;
  artifacts.summary = analysis::summarize_trace(built.sim.trace());
  artifacts.trace_jsonl = built.sim.trace().to_jsonl();

  // Per-run report: the projection row this session contributes.
  {
    const auto& s = artifacts.summary;
    analysis::Projection no_ack = analysis::project_suarp(s, false);
    analysis::Projection with_ack = analysis::project_suarp(s, true);
    analysis::Projection sarp = analysis::project_sarp(s);
    std::string csv =
        "total_pkts,arp_pkts,arp_reply_pkts,suarp_pkts_no_ack,suarp_pkts_with_ack,"
        "sarp_pkts,pct_arp,pct_suarp_no_ack,pct_suarp_with_ack,pct_sarp\n";
    char row[256];
    std::snprintf(row, sizeof(row), "%llu,%llu,%llu,%llu,%llu,%llu,%.2f,%.2f,%.2f,%.2f\n",
                  static_cast<unsigned long long>(s.total_pkts),
                  static_cast<unsigned long long>(s.arp_pkts),
                  static_cast<unsigned long long>(s.arp_reply_pkts),
                  static_cast<unsigned long long>(no_ack.pkts),
                  static_cast<unsigned long long>(with_ack.pkts),
                  static_cast<unsigned long long>(sarp.pkts),
                  analysis::round2(analysis::pct_of(s.arp_pkts, s.total_pkts)),
                  analysis::round2(no_ack.pct), analysis::round2(with_ack.pct),
                  analysis::round2(sarp.pct));
    artifacts.report_csv = csv + row;
  }

  // Aggregate agent counters.
  agents::HostStats hosts_total;
  for (const auto& [id, host] : built.hosts) {
    const auto& s = host->stats();
    hosts_total.resolutions_completed += s.resolutions_completed;
    hosts_total.resolutions_failed += s.resolutions_failed;
    hosts_total.cache_hits += s.cache_hits;
    hosts_total.unknown_mapping += s.unknown_mapping;
    hosts_total.icp += s.icp;
    hosts_total.icf += s.icf;
    hosts_total.duplicates_reacked += s.duplicates_reacked;
    hosts_total.acks_piggybacked += s.acks_piggybacked;
    hosts_total.acks_standalone += s.acks_standalone;
    hosts_total.data_sent += s.data_sent;
    hosts_total.data_received += s.data_received;
    hosts_total.leases_bound += s.leases_bound;
    hosts_total.naks += s.naks;
    hosts_total.dhcp_failures += s.dhcp_failures;
  }
  agents::ServerStats servers_total;
  for (const auto& [id, server] : built.servers) {
    const auto& s = server->stats();
    servers_total.suarp_answered += s.suarp_answered;
    servers_total.suarp_unknown += s.suarp_unknown;
    servers_total.suarp_rejected += s.suarp_rejected;
    servers_total.acks_accepted += s.acks_accepted;
    servers_total.acks_rejected += s.acks_rejected;
    servers_total.retransmits += s.retransmits;
    servers_total.offers += s.offers;
    servers_total.binds += s.binds;
    servers_total.naks += s.naks;
    servers_total.reclaims += s.reclaims;
    servers_total.rejected_requests += s.rejected_requests;
    servers_total.registrations += s.registrations;
  }

  ordered_json metrics;
  metrics["scenario"] = cfg.name;
  metrics["seed"] = cfg.seed;
  metrics["duration_ms"] = cfg.duration.ticks;
  metrics["ledger"] = {{"emitted", built.sim.trace().emitted()},
                       {"delivered", built.sim.trace().delivered()},
                       {"dropped_loss", built.sim.trace().dropped_loss()},
                       {"dropped_boundary", built.sim.trace().dropped_boundary()}};
  {
    const auto& s = artifacts.summary;
    ordered_json summary;
    summary["total_pkts"] = s.total_pkts;
    summary["arp_pkts"] = s.arp_pkts;
    summary["arp_reply_pkts"] = s.arp_reply_pkts;
    summary["avg_arp_size"] = analysis::round2(s.avg_arp_size);
    summary["pct_arp"] = analysis::round2(analysis::pct_of(s.arp_pkts, s.total_pkts));
    summary["arp_present"] = s.arp_present;
    metrics["summary"] = summary;
  }
  {
    ordered_json by_kind;
    for (int k = 1; k <= static_cast<int>(core::MsgKind::Data); ++k) {
      auto kind = static_cast<core::MsgKind>(k);
      std::uint64_t count = built.sim.trace().emitted_of(kind);
      if (count > 0) by_kind[core::msg_kind_name(kind)] = count;
    }
    metrics["emitted_by_kind"] = by_kind;
  }
  metrics["hosts"] = {{"resolutions_completed", hosts_total.resolutions_completed},
                      {"resolutions_failed", hosts_total.resolutions_failed},
                      {"cache_hits", hosts_total.cache_hits},
                      {"unknown_mapping", hosts_total.unknown_mapping},
                      {"icp", hosts_total.icp},
                      {"icf", hosts_total.icf},
                      {"duplicates_reacked", hosts_total.duplicates_reacked},
                      {"acks_piggybacked", hosts_total.acks_piggybacked},
                      {"acks_standalone", hosts_total.acks_standalone},
                      {"data_sent", hosts_total.data_sent},
                      {"data_received", hosts_total.data_received},
                      {"leases_bound", hosts_total.leases_bound},
                      {"naks", hosts_total.naks},
                      {"dhcp_failures", hosts_total.dhcp_failures}};
  metrics["servers"] = {{"suarp_answered", servers_total.suarp_answered},
                        {"suarp_unknown", servers_total.suarp_unknown},
                        {"suarp_rejected", servers_total.suarp_rejected},
                        {"acks_accepted", servers_total.acks_accepted},
                        {"acks_rejected", servers_total.acks_rejected},
                        {"retransmits", servers_total.retransmits},
                        {"offers", servers_total.offers},
                        {"binds", servers_total.binds},
                        {"naks", servers_total.naks},
                        {"reclaims", servers_total.reclaims},
                        {"rejected_requests", servers_total.rejected_requests},
                        {"registrations", servers_total.registrations}};

  // Attack outcomes.
  for (const auto& [node_id, adversary] : built.adversaries) {
    const NodeConfig& node = cfg.nodes[static_cast<std::size_t>(node_id)];
    const auto& counters = adversary->counters();
    core::MacAddress adversary_mac = node.attachments[0].mac;

    if (node.adversary.poison) {
      AttackOutcome outcome;
      outcome.adversary = node.name;
      outcome.kind = "poisoning";
      outcome.attempts = counters.forged_sent;
      outcome.intercepted = counters.intercepted;
      outcome.forwarded = counters.forwarded;
      for (const auto& pair : node.adversary.poison->pairs) {
        auto victim_it = built.host_by_ip.find(pair.victim_ip);
        if (victim_it == built.host_by_ip.end()) continue;
        const agents::HostAgent* victim = built.hosts.at(victim_it->second);
        std::optional<core::SimTime> first, last;
        for (const auto& insert : victim->stats().cache_insert_log) {
          if (insert.ip == pair.impersonated_ip && insert.mac == adversary_mac) {
            ++outcome.successes;
            if (!first) first = insert.at;
            last = insert.at;
          }
        }
        if (first && outcome.first_success_ms < 0)
          outcome.first_success_ms = static_cast<std::int64_t>(first->ticks);
        if (first) {
          // Dwell: poisoned from the first forged insert until overwrite,
          // expiry, or the end of the run.
          core::SimTime end = cfg.duration;
          for (const auto& insert : victim->stats().cache_insert_log) {
            if (insert.ip == pair.impersonated_ip && !(insert.mac == adversary_mac) &&
                insert.at > *first) {
              end = insert.at;
              break;
            }
          }
          core::SimTime expiry = *last + cfg.timers.t4;
          if (expiry < end) end = expiry;
          outcome.dwell_ms += (end - *first).ticks;
        }
      }
      artifacts.attacks.push_back(outcome);
    }
    if (node.adversary.spoof) {
      AttackOutcome outcome;
      outcome.adversary = node.name;
      outcome.kind = "spoofing";
      outcome.attempts = counters.spoof_attempts;
      outcome.successes = counters.leases_obtained;
      artifacts.attacks.push_back(outcome);
    }
    if (node.adversary.insider) {
      AttackOutcome outcome;
      outcome.adversary = node.name;
      outcome.kind = "insider_ack";
      outcome.attempts = counters.insider_forgeries;
      int server_node = index_of(cfg, node.adversary.insider_server);
      auto server_it = built.servers.find(server_node);
      if (server_it != built.servers.end()) {
        std::uint64_t accepted = server_it->second->stats().acks_accepted;
        // One acknowledgment belongs to the victim's own exchange.
        outcome.successes = accepted > 1 ? accepted - 1 : 0;
      }
      artifacts.attacks.push_back(outcome);
    }
  }
  if (!artifacts.attacks.empty()) {
    ordered_json report;
    report["scenario"] = cfg.name;
    report["seed"] = cfg.seed;
    report["attacks"] = attack_outcomes_json(artifacts.attacks);
    artifacts.attack_report_json = report.dump(2) + "\n";
  }

  artifacts.metrics_json = metrics.dump(2) + "\n";
  return artifacts;
}

// ---------------------------------------------------------------------------
// Attack matrix
// ---------------------------------------------------------------------------

namespace {

ScenarioConfig matrix_base(const std::string& name, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.seed = seed;
  cfg.duration = core::SimTime::seconds(40);
  cfg.record_trace = false;  // counters only; these runs are large
  cfg.segments = {"lan1"};
  return cfg;
}

NodeConfig make_host(const std::string& name, const std::string& mac,
                     const std::string& ip) {
  NodeConfig node;
  node.name = name;
  node.kind = sim::NodeKind::Host;
  AttachmentConfig att;
  att.segment = "lan1";
  att.mac = *core::MacAddress::parse(mac);
  if (!ip.empty()) att.ip = *core::IpAddress::parse(ip);
  node.attachments.push_back(att);
  return node;
}

TrafficEntry traffic_at(std::uint64_t at, const std::string& node,
                        sim::AgentAction::Verb verb, const std::string& target = "") {
  TrafficEntry entry;
  entry.at = core::SimTime::ms(at);
  entry.node = node;
  entry.verb = verb;
  if (!target.empty()) entry.target = *core::IpAddress::parse(target);
  return entry;
}

/// Poisoning cell: A resolves B while the attacker injects forged
/// mappings / responses claiming B's address resolves to the attacker.
ScenarioConfig poisoning_cell(ArpMode mode, agents::SuarpVariant variant,
                              std::uint64_t seed, int attempts) {
  ScenarioConfig cfg = matrix_base("poisoning", seed);
  cfg.arp_mode = mode;
  cfg.suarp_variant = variant;

  cfg.nodes.push_back(make_host("A", "aa:00:00:00:00:01", "10.0.0.1"));
  cfg.nodes.push_back(make_host("B", "aa:00:00:00:00:02", "10.0.0.2"));
  if (mode != ArpMode::Legacy) {
    NodeConfig server;
    server.name = "S";
    server.kind = sim::NodeKind::DhcpPlus;
    AttachmentConfig att;
    att.segment = "lan1";
    att.mac = *core::MacAddress::parse("aa:00:00:00:00:10");
    att.ip = *core::IpAddress::parse("10.0.0.10");
    server.attachments.push_back(att);
    server.mappings[*core::IpAddress::parse("10.0.0.1")] =
        *core::MacAddress::parse("aa:00:00:00:00:01");
    server.mappings[*core::IpAddress::parse("10.0.0.2")] =
        *core::MacAddress::parse("aa:00:00:00:00:02");
    cfg.nodes.push_back(server);
    cfg.arp_server = "S";
  }

  NodeConfig attacker;
  attacker.name = "C";
  attacker.kind = sim::NodeKind::Adversary;
  AttachmentConfig att;
  att.segment = "lan1";
  att.mac = *core::MacAddress::parse("aa:00:00:00:00:66");
  att.ip = *core::IpAddress::parse("10.0.0.66");
  attacker.attachments.push_back(att);
  attacker.adversary.inject = true;
  attacker.adversary.mitm = mode == ArpMode::Legacy;
  agents::PoisonPlan plan;
  plan.pairs.push_back({*core::IpAddress::parse("10.0.0.1"),
                        *core::IpAddress::parse("10.0.0.2")});
  plan.forge_requests = false;
  if (mode == ArpMode::Legacy) {
    plan.rounds = attempts;
    plan.forged_per_round = 1;
    plan.cadence = core::SimTime::ms(1);
  } else {
    plan.rounds = 1;
    plan.forged_per_round = attempts;
  }
  attacker.adversary.poison = plan;
  cfg.nodes.push_back(attacker);

  cfg.traffic.push_back(traffic_at(10, "A", sim::AgentAction::Verb::Resolve, "10.0.0.2"));
  cfg.traffic.push_back(traffic_at(10, "C", sim::AgentAction::Verb::AdversaryKick));
  // Victim keeps talking so interception is visible in the legacy cell.
  auto ping = traffic_at(500, "A", sim::AgentAction::Verb::SendData, "10.0.0.2");
  ping.repeat = 10;
  ping.every = core::SimTime::ms(200);
  ping.size = 84;
  cfg.traffic.push_back(ping);
  return cfg;
}

/// Spoofing cell: victim V acquires, the attacker knocks it offline and
/// re-enters the network under V's hardware address.
ScenarioConfig spoofing_cell(DhcpMode mode, agents::SdhcpVariant variant,
                             std::uint64_t seed, int attempts) {
  ScenarioConfig cfg = matrix_base("spoofing", seed);
  cfg.dhcp_mode = mode;
  cfg.sdhcp_variant = variant;
  cfg.duration = core::SimTime::seconds(mode == DhcpMode::Legacy ? 10 : 40);

  cfg.nodes.push_back(make_host("V", "aa:00:00:00:00:01", ""));

  NodeConfig server;
  server.name = "S";
  server.kind = mode == DhcpMode::Legacy ? sim::NodeKind::DhcpServer
                                         : sim::NodeKind::DhcpPlus;
  AttachmentConfig att;
  att.segment = "lan1";
  att.mac = *core::MacAddress::parse("aa:00:00:00:00:10");
  att.ip = *core::IpAddress::parse("10.0.0.10");
  server.attachments.push_back(att);
  server.pool_first = *core::IpAddress::parse("10.0.0.100");
  server.pool_last = *core::IpAddress::parse("10.0.0.150");
  server.offer_hold = core::SimTime::ms(100);
  cfg.nodes.push_back(server);
  if (mode == DhcpMode::Sdhcp) cfg.arp_server = "S";

  NodeConfig attacker;
  attacker.name = "C";
  attacker.kind = sim::NodeKind::Adversary;
  AttachmentConfig catt;
  catt.segment = "lan1";
  catt.mac = *core::MacAddress::parse("aa:00:00:00:00:66");
  catt.ip = *core::IpAddress::parse("10.0.0.66");
  attacker.attachments.push_back(catt);
  attacker.adversary.inject = true;
  agents::SpoofPlan plan;
  plan.cloned_mac = *core::MacAddress::parse("aa:00:00:00:00:01");
  plan.dos_first = true;
  plan.attempts = mode == DhcpMode::Legacy ? 1 : attempts;
  plan.spacing = core::SimTime::ms(mode == DhcpMode::Legacy ? 50 : 3);
  attacker.adversary.spoof = plan;
  attacker.adversary.spoof_victim = "V";
  cfg.nodes.push_back(attacker);

  cfg.traffic.push_back(traffic_at(0, "V", sim::AgentAction::Verb::DhcpAcquire));
  cfg.traffic.push_back(traffic_at(100, "C", sim::AgentAction::Verb::AdversaryKick));
  return cfg;
}

/// Insider cell: the attacker knows the shared key and sniffs the whole
/// exchange, then races forged version-2 acknowledgments at the server.
ScenarioConfig insider_cell(std::uint64_t seed, int attempts) {
  ScenarioConfig cfg = matrix_base("insider_ack", seed);
  cfg.arp_mode = ArpMode::Suarp;
  cfg.suarp_variant = agents::SuarpVariant::AltV2;

  cfg.nodes.push_back(make_host("A", "aa:00:00:00:00:01", "10.0.0.1"));
  cfg.nodes.push_back(make_host("B", "aa:00:00:00:00:02", "10.0.0.2"));
  NodeConfig server;
  server.name = "S";
  server.kind = sim::NodeKind::DhcpPlus;
  AttachmentConfig att;
  att.segment = "lan1";
  att.mac = *core::MacAddress::parse("aa:00:00:00:00:10");
  att.ip = *core::IpAddress::parse("10.0.0.10");
  server.attachments.push_back(att);
  server.mappings[*core::IpAddress::parse("10.0.0.2")] =
      *core::MacAddress::parse("aa:00:00:00:00:02");
  cfg.nodes.push_back(server);
  cfg.arp_server = "S";

  NodeConfig attacker;
  attacker.name = "C";
  attacker.kind = sim::NodeKind::Adversary;
  AttachmentConfig catt;
  catt.segment = "lan1";
  catt.mac = *core::MacAddress::parse("aa:00:00:00:00:66");
  catt.ip = *core::IpAddress::parse("10.0.0.66");
  attacker.attachments.push_back(catt);
  attacker.adversary.inject = true;
  attacker.adversary.promiscuous = true;
  attacker.adversary.has_key = true;
  agents::InsiderPlan plan;
  plan.forgeries_per_exchange = attempts;
  attacker.adversary.insider = plan;
  attacker.adversary.insider_victim = "A";
  attacker.adversary.insider_server = "S";
  cfg.nodes.push_back(attacker);

  cfg.traffic.push_back(traffic_at(10, "A", sim::AgentAction::Verb::Resolve, "10.0.0.2"));
  return cfg;
}

MatrixCell evaluate_cell(const std::string& attack, const std::string& protocol,
                         bool expect_blocked, const RunArtifacts& artifacts) {
  MatrixCell cell;
  cell.attack = attack;
  cell.protocol = protocol;
  cell.expect_blocked = expect_blocked;
  for (const auto& outcome : artifacts.attacks) {
    cell.attempts += outcome.attempts;
    cell.successes += outcome.successes;
  }
  return cell;
}

}  // namespace

AttackMatrixResult run_attack_matrix(int seed_count, int attempts_per_secure_cell) {
  AttackMatrixResult result;
  std::vector<std::vector<MatrixCell>> per_seed;

  for (int s = 0; s < seed_count; ++s) {
    std::uint64_t seed = 1000 + static_cast<std::uint64_t>(s);
    std::vector<MatrixCell> cells;

    {
      ScenarioConfig cfg = poisoning_cell(ArpMode::Legacy, agents::SuarpVariant::Base,
                                          seed, 100);
      cfg.validate();
      cells.push_back(evaluate_cell("poisoning", "arp", false, run_scenario(cfg)));
    }
    for (auto variant : {agents::SuarpVariant::Base, agents::SuarpVariant::AltV1,
                         agents::SuarpVariant::AltV2}) {
      ScenarioConfig cfg = poisoning_cell(ArpMode::Suarp, variant, seed,
                                          attempts_per_secure_cell);
      cfg.validate();
      std::string protocol =
          std::string("suarp-") + agents::suarp_variant_name(variant);
      cells.push_back(evaluate_cell("poisoning", protocol, true, run_scenario(cfg)));
    }
    {
      ScenarioConfig cfg = spoofing_cell(DhcpMode::Legacy, agents::SdhcpVariant::Base,
                                         seed, 1);
      cfg.validate();
      cells.push_back(evaluate_cell("spoofing", "dhcp", false, run_scenario(cfg)));
    }
    for (auto variant : {agents::SdhcpVariant::Base, agents::SdhcpVariant::AltV1,
                         agents::SdhcpVariant::AltV2}) {
      ScenarioConfig cfg = spoofing_cell(DhcpMode::Sdhcp, variant, seed,
                                         attempts_per_secure_cell);
      cfg.validate();
      std::string protocol =
          std::string("sdhcp-") + agents::sdhcp_variant_name(variant);
      cells.push_back(evaluate_cell("spoofing", protocol, true, run_scenario(cfg)));
    }
    {
      ScenarioConfig cfg = insider_cell(seed, attempts_per_secure_cell);
      cfg.validate();
      cells.push_back(
          evaluate_cell("insider_ack", "suarp-v2", true, run_scenario(cfg)));
    }
    per_seed.push_back(std::move(cells));
  }

  // Seed-to-seed agreement on the success/blocked pattern.
  for (std::size_t s = 1; s < per_seed.size(); ++s) {
    for (std::size_t c = 0; c < per_seed[s].size(); ++c) {
      if ((per_seed[s][c].successes == 0) != (per_seed[0][c].successes == 0))
        result.identical_across_seeds = false;
    }
  }

  // Aggregate.
  result.cells = per_seed.at(0);
  for (std::size_t s = 1; s < per_seed.size(); ++s) {
    for (std::size_t c = 0; c < per_seed[s].size(); ++c) {
      result.cells[c].attempts += per_seed[s][c].attempts;
      result.cells[c].successes += per_seed[s][c].successes;
    }
  }
  for (const auto& cell : result.cells)
    if (!cell.as_expected()) result.as_expected = false;
  if (!result.identical_across_seeds) result.as_expected = false;

  std::ostringstream text;
  text << "attack        protocol     attempts   successes  verdict\n";
  for (const auto& cell : result.cells) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-13s %-12s %-10llu %-10llu %s\n",
                  cell.attack.c_str(), cell.protocol.c_str(),
                  static_cast<unsigned long long>(cell.attempts),
                  static_cast<unsigned long long>(cell.successes),
                  cell.expect_blocked ? (cell.successes == 0 ? "BLOCKED" : "BREACHED")
                                      : (cell.successes > 0 ? "SUCCESS" : "FAILED"));
    text << line;
  }
  text << "seeds: " << seed_count
       << (result.identical_across_seeds ? " (identical outcomes)"
                                         : " (OUTCOMES DIFFER)")
       << "\n";
  result.text = text.str();

  ordered_json json;
  json["seeds"] = seed_count;
  json["identical_across_seeds"] = result.identical_across_seeds;
  json["as_expected"] = result.as_expected;
  ordered_json cells = ordered_json::array();
  for (const auto& cell : result.cells) {
    ordered_json entry;
    entry["attack"] = cell.attack;
    entry["protocol"] = cell.protocol;
    entry["attempts"] = cell.attempts;
    entry["successes"] = cell.successes;
    entry["expected"] = cell.expect_blocked ? "blocked" : "success";
    entry["as_expected"] = cell.as_expected();
    cells.push_back(entry);
  }
  json["cells"] = cells;
  result.json = json.dump(2) + "\n";
  return result;
}

}  // namespace suarp::scenario
