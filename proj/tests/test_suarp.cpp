#include <doctest.h>

#include "helpers/lan_fixture.hpp"

using namespace suarp;
using namespace suarp::testing;
using sim::AgentAction;
using core::SimTime;
using agents::SuarpVariant;

namespace {

/// One host + DHCP+ server + passive bystander, keys provisioned.
struct SuarpNet {
  Lan net;
  int a, b, srv;
  agents::HostOptions host_opts;

  explicit SuarpNet(SuarpVariant variant, core::TimerConfig timers = {}) {
    crypto::KeyStore host_store, server_store;
    provision_pair(host_store, server_store, mac("aa:00:00:00:00:01"),
                   mac("aa:00:00:00:00:10"));

    agents::ServerOptions server_opts;
    server_opts.suarp_variant = variant;
    server_opts.timers = timers;
    server_opts.static_mappings[ip("10.0.0.2")] = mac("aa:00:00:00:00:02");
    srv = net.server("S", "aa:00:00:00:00:10", "10.0.0.10", server_opts,
                     server_store);

    host_opts.use_suarp = true;
    host_opts.suarp_variant = variant;
    host_opts.timers = timers;
    host_opts.server_node = srv;
    a = net.host("A", "aa:00:00:00:00:01", "10.0.0.1", host_opts, host_store);
    b = net.host("B", "aa:00:00:00:00:02", "10.0.0.2", agents::HostOptions{});
  }
};

int suarp_emissions(const sim::TraceLog& trace) {
  return count_events(trace, "emit", "SuarpReq") +
         count_events(trace, "emit", "SuarpRes") +
         count_events(trace, "emit", "SuarpAck");
}

/// Records and re-injects bit-flipped copies of a sniffed response, one per
/// round, timed to land while the victim awaits a fresh response.
class Mutographer : public sim::Agent {
 public:
  Mutographer(core::MacAddress victim, SimTime first_round, SimTime spacing,
              int rounds)
      : victim_(victim), first_round_(first_round), spacing_(spacing),
        rounds_(rounds) {}

  int emitted{0};
  int parse_failures{0};

  void on_start(sim::Ctx& ctx) override {
    ctx.set_promiscuous();
    for (int r = 0; r < rounds_; ++r)
      ctx.schedule_timer(SimTime{first_round_.ticks + static_cast<std::uint64_t>(r) * spacing_.ticks},
                         1, 0);
  }
  void on_frame(sim::Ctx&, const core::Frame& frame, int) override {
    if (frame.payload.kind() == core::MsgKind::SuarpRes &&
        frame.dst_mac == victim_)
      recorded_ = frame;
  }
  void on_timer(sim::Ctx& ctx, std::uint32_t, std::uint64_t) override {
    if (!recorded_) return;
    core::Bytes bytes = core::serialize_message(recorded_->payload);
    std::size_t bit = ctx.rng()() % (bytes.size() * 8);
    bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      core::ProtocolMessage mutant = core::parse_message(bytes);
      ctx.send(core::Frame::make(recorded_->src_mac, victim_, std::move(mutant),
                                 ctx.now()));
      ++emitted;
    } catch (const core::MalformedMessage&) {
      ++parse_failures;  // rejected before it could even hit the wire format
    }
  }

 private:
  core::MacAddress victim_;
  SimTime first_round_, spacing_;
  int rounds_;
  std::optional<core::Frame> recorded_;
};

/// Counts integrity material on resolution frames.
class MicCounter : public sim::Agent {
 public:
  int request_mics{0}, response_mics{0}, response_masked{0}, ack_mics{0};
  void on_start(sim::Ctx& ctx) override { ctx.set_promiscuous(); }
  void on_frame(sim::Ctx&, const core::Frame& frame, int) override {
    switch (frame.payload.kind()) {
      case core::MsgKind::SuarpReq:
        request_mics += static_cast<int>(frame.payload.mics.size());
        break;
      case core::MsgKind::SuarpRes:
        response_mics += static_cast<int>(frame.payload.mics.size());
        response_masked += static_cast<int>(frame.payload.masked.size());
        break;
      case core::MsgKind::SuarpAck:
        ack_mics += static_cast<int>(frame.payload.mics.size());
        break;
      default:
        break;
    }
  }
};

}  // namespace

TEST_CASE("cold resolution with a piggyback opportunity takes two frames") {
  for (auto variant : {SuarpVariant::Base, SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    CAPTURE(static_cast<int>(variant));
    SuarpNet t(variant);
    auto& sim = t.net.build(1);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    // Outbound traffic to the server inside t2 carries the ACK.
    t.net.act(SimTime::ms(50), t.a, AgentAction::Verb::SendData, "10.0.0.10", 200);
    sim.run_until(SimTime::seconds(10));

    CHECK(suarp_emissions(sim.trace()) == 2);
    CHECK(count_events(sim.trace(), "emit", "SuarpAck") == 0);
    CHECK(t.net.host_agent(t.a).stats().acks_piggybacked == 1);
    CHECK(t.net.host_agent(t.a).stats().acks_standalone == 0);
    CHECK(t.net.server_agent(t.srv).stats().acks_accepted == 1);
    auto cached = t.net.host_agent(t.a).cache().lookup(ip("10.0.0.2"), sim.now());
    REQUIRE(cached.has_value());
    CHECK(*cached == mac("aa:00:00:00:00:02"));
  }
}

TEST_CASE("cold resolution without piggyback takes three frames") {
  for (auto variant : {SuarpVariant::Base, SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    CAPTURE(static_cast<int>(variant));
    SuarpNet t(variant);
    auto& sim = t.net.build(2);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    sim.run_until(SimTime::seconds(10));

    CHECK(suarp_emissions(sim.trace()) == 3);
    CHECK(count_events(sim.trace(), "emit", "SuarpAck") == 1);
    CHECK(t.net.host_agent(t.a).stats().acks_standalone == 1);
    CHECK(t.net.server_agent(t.srv).stats().acks_accepted == 1);

    // The standalone ACK leaves right after the piggyback window shuts,
    // inside (t2, t3].
    std::uint64_t icp_at = 0, ack_at = 0;
    for (const auto& ev : sim.trace().events()) {
      if (ev.kind == "state" && ev.outcome == "icp") icp_at = ev.t.ticks;
      if (ev.kind == "emit" && ev.msg_kind == "SuarpAck") ack_at = ev.t.ticks;
    }
    CHECK(ack_at == icp_at + 200 + 1);
    CHECK(ack_at - icp_at > 200);
    CHECK(ack_at - icp_at <= 1000);
  }
}

TEST_CASE("resolution is unicast only: no broadcast frames anywhere") {
  SuarpNet t(SuarpVariant::AltV2);
  auto& sim = t.net.build(3);
  t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
  t.net.act(SimTime::ms(100), t.a, AgentAction::Verb::SendData, "10.0.0.2", 80);
  sim.run_until(SimTime::seconds(10));

  for (const auto& ev : sim.trace().events()) {
    if (ev.kind == "emit") CHECK(ev.dst != "ff:ff:ff:ff:ff:ff");
    if (ev.kind == "deliver") CHECK(ev.dst != "ff:ff:ff:ff:ff:ff");
  }
}

TEST_CASE("cache hit answers without any frames; expiry forces a requery") {
  core::TimerConfig timers;
  timers.t4 = SimTime::ms(2000);
  SuarpNet t(SuarpVariant::Base, timers);
  auto& sim = t.net.build(4);
  t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
  t.net.act(SimTime::ms(1000), t.a, AgentAction::Verb::Resolve, "10.0.0.2");  // hit
  // Entry lands at t=12; by 12 + 2000 it is stale and must be re-queried.
  t.net.act(SimTime::ms(2500), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
  sim.run_until(SimTime::seconds(10));

  CHECK(count_events(sim.trace(), "emit", "SuarpReq") == 2);
  CHECK(t.net.host_agent(t.a).stats().cache_hits == 1);
  CHECK(t.net.host_agent(t.a).stats().resolutions_completed == 2);
}

TEST_CASE("silent server triggers retransmissions spaced t1 apart, then failure") {
  Lan net;
  agents::HostOptions opts;
  opts.use_suarp = true;
  opts.server_node = 1;  // the bystander below; it never answers
  crypto::KeyStore store, peer;
  provision_pair(store, peer, mac("aa:00:00:00:00:01"), mac("aa:00:00:00:00:02"));
  int a = net.host("A", "aa:00:00:00:00:01", "10.0.0.1", opts, store);
  net.host("mute", "aa:00:00:00:00:02", "10.0.0.9", agents::HostOptions{});
  auto& sim = net.build(5);
  net.act(SimTime::ms(10), a, AgentAction::Verb::Resolve, "10.0.0.2");
  sim.run_until(SimTime::seconds(20));

  std::vector<std::uint64_t> emits;
  for (const auto& ev : sim.trace().events())
    if (ev.kind == "emit" && ev.msg_kind == "SuarpReq") emits.push_back(ev.t.ticks);
  REQUIRE(emits.size() == 4);  // initial + bounded retries
  CHECK(emits[1] - emits[0] == 500);
  CHECK(emits[2] - emits[1] == 500);
  CHECK(emits[3] - emits[2] == 500);
  CHECK(count_state(sim.trace(), "A", "server_unreachable") == 1);
  CHECK(net.host_agent(a).stats().resolutions_failed == 1);
}

TEST_CASE("lost ack: the server retransmits verbatim and the host re-acks once") {
  // Seed chosen so the loss pattern drops exactly the first standalone ACK
  // (request, response and the remaining frames get through).
  SuarpNet t(SuarpVariant::Base);
  auto& sim = t.net.build(4, 0.3);
  t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
  sim.run_until(SimTime::seconds(20));

  const auto& host_stats = t.net.host_agent(t.a).stats();
  const auto& server_stats = t.net.server_agent(t.srv).stats();
  CHECK(host_stats.icp == 1);
  CHECK(host_stats.duplicates_reacked == 1);
  CHECK(host_stats.cache_insert_log.size() == 1);  // no double insertion
  CHECK(server_stats.retransmits == 1);
  CHECK(server_stats.acks_accepted == 1);
  CHECK(host_stats.resolutions_completed == 1);
}

TEST_CASE("every single-bit mutation of a response is rejected") {
  for (auto variant : {SuarpVariant::Base, SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    CAPTURE(static_cast<int>(variant));
    core::TimerConfig timers;
    timers.t4 = SimTime::ms(50);  // forces a fresh exchange every round
    timers.t2 = SimTime::ms(5);   // fast ACK so the exchange clears between rounds
    timers.t3 = SimTime::ms(10);
    SuarpNet t(variant, timers);

    const int rounds = 1000;
    int mut_id = t.net.add_node(
        {"M", sim::NodeKind::Adversary,
         {{t.net.lan(), mac("aa:00:00:00:00:77"), ip("10.0.0.77"), false, -1}}},
        [rounds]() -> std::unique_ptr<sim::Agent> {
          return std::make_unique<Mutographer>(mac("aa:00:00:00:00:01"),
                                               SimTime::ms(110), SimTime::ms(100),
                                               rounds);
        });
    auto& sim = t.net.build(6);
    for (int r = 0; r <= rounds; ++r)
      t.net.act(SimTime::ms(10 + 100 * static_cast<std::uint64_t>(r)), t.a,
                AgentAction::Verb::Resolve, "10.0.0.2");
    sim.run_until(SimTime::ms(10 + 100 * (rounds + 2)));

    auto* mut = dynamic_cast<Mutographer*>(sim.agent(mut_id));
    REQUIRE(mut != nullptr);
    CHECK(mut->emitted + mut->parse_failures == rounds);
    CHECK(mut->emitted > 800);

    // Not one mutant was accepted: the integrity verdict count matches the
    // legitimate exchanges exactly, and every cache insert carries B's true
    // MAC.
    const auto& host_stats = t.net.host_agent(t.a).stats();
    CHECK(host_stats.icp == static_cast<std::uint64_t>(rounds) + 1);
    for (const auto& insert : host_stats.cache_insert_log) {
      CHECK(insert.ip == ip("10.0.0.2"));
      CHECK(insert.mac == mac("aa:00:00:00:00:02"));
    }
    // The bulk of the mutants was verified against an open exchange and
    // failed the integrity check; the remainder mutated the addressing or
    // timestamp fields and fell out earlier (unsolicited or stale), which
    // is a rejection all the same.
    CHECK(host_stats.icf > static_cast<std::uint64_t>(mut->emitted) * 6 / 10);
    CHECK(host_stats.duplicates_reacked == 0);
  }
}

TEST_CASE("stale responses are discarded even when byte-valid") {
  // Tight t3 shrinks the duplicate-recognition window far below delta_t, so
  // a byte-identical replay exercises the freshness gate alone.
  core::TimerConfig timers;
  timers.t1 = SimTime::ms(500);
  timers.t2 = SimTime::ms(1);
  timers.t3 = SimTime::ms(2);
  timers.delta_t = SimTime::ms(300);
  SuarpNet t(SuarpVariant::Base, timers);

  agents::AdversaryOptions on_time;
  on_time.inject = true;
  on_time.promiscuous = true;
  on_time.replay = agents::ReplayPlan{SimTime::ms(310), 1};  // lands at t_r - t_s = delta_t
  int r1 = t.net.adversary("R1", "aa:00:00:00:00:71", "10.0.0.71", on_time);

  agents::AdversaryOptions late;
  late.inject = true;
  late.promiscuous = true;
  late.replay = agents::ReplayPlan{SimTime::ms(311), 1};  // delta_t + 1: stale
  int r2 = t.net.adversary("R2", "aa:00:00:00:00:72", "10.0.0.72", late);

  auto& sim = t.net.build(7);
  t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
  sim.run_until(SimTime::seconds(5));

  const auto& host_stats = t.net.host_agent(t.a).stats();
  // The on-time replay misses the duplicate window and no exchange is
  // pending: ignored without a verdict. The late one fails freshness: ICF.
  CHECK(host_stats.icf == 1);
  CHECK(count_state(sim.trace(), "A", "unsolicited") == 1);
  CHECK(host_stats.cache_insert_log.size() == 1);
  CHECK(host_stats.icp == 1);
  (void)r1;
  (void)r2;
}

TEST_CASE("piggyback window boundary: attached at t2, standalone at t2 + 1") {
  SUBCASE("data frame exactly at the window edge rides the ack") {
    SuarpNet t(SuarpVariant::Base);
    auto& sim = t.net.build(8);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    // ICP lands at t=12; t2 = 200, so a frame at 212 is the last chance.
    t.net.act(SimTime::ms(212), t.a, AgentAction::Verb::SendData, "10.0.0.10", 64);
    sim.run_until(SimTime::seconds(5));
    CHECK(t.net.host_agent(t.a).stats().acks_piggybacked == 1);
    CHECK(t.net.host_agent(t.a).stats().acks_standalone == 0);
    CHECK(count_events(sim.trace(), "emit", "SuarpAck") == 0);
    CHECK(t.net.server_agent(t.srv).stats().acks_accepted == 1);
  }
  SUBCASE("one tick later the ack has already gone standalone") {
    SuarpNet t(SuarpVariant::Base);
    auto& sim = t.net.build(9);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    t.net.act(SimTime::ms(213), t.a, AgentAction::Verb::SendData, "10.0.0.10", 64);
    sim.run_until(SimTime::seconds(5));
    CHECK(t.net.host_agent(t.a).stats().acks_piggybacked == 0);
    CHECK(t.net.host_agent(t.a).stats().acks_standalone == 1);
    CHECK(count_events(sim.trace(), "emit", "SuarpAck") == 1);
    CHECK(t.net.server_agent(t.srv).stats().acks_accepted == 1);
  }
}

TEST_CASE("forged or keyless requests are rejected without a response") {
  for (auto variant : {SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    CAPTURE(static_cast<int>(variant));
    SuarpNet t(variant);
    // An extra keyless host tries to resolve: its MIC1 cannot verify.
    agents::HostOptions opts = t.host_opts;
    crypto::KeyStore one_sided;  // host side only; the server knows nothing
    provision_pair(one_sided, one_sided, mac("aa:00:00:00:00:03"),
                   mac("aa:00:00:00:00:10"));
    int x = t.net.host("X", "aa:00:00:00:00:03", "10.0.0.3", opts, one_sided);
    auto& sim = t.net.build(10);
    t.net.act(SimTime::ms(10), x, AgentAction::Verb::Resolve, "10.0.0.2");
    sim.run_until(SimTime::seconds(10));

    CHECK(count_events(sim.trace(), "emit", "SuarpRes") == 0);
    CHECK(t.net.server_agent(t.srv).stats().suarp_rejected >= 1);
    CHECK(t.net.host_agent(x).stats().resolutions_failed == 1);  // timed out
  }
}

TEST_CASE("unknown mappings get an authenticated negative answer") {
  SuarpNet t(SuarpVariant::AltV1);
  auto& sim = t.net.build(11);
  t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.99");
  sim.run_until(SimTime::seconds(10));

  const auto& host_stats = t.net.host_agent(t.a).stats();
  CHECK(host_stats.unknown_mapping == 1);
  CHECK(host_stats.icp == 1);  // the negative answer itself verified
  CHECK(host_stats.cache_insert_log.empty());
  CHECK(t.net.server_agent(t.srv).stats().suarp_unknown == 1);
  // Fail fast: exactly one request, no retransmission storm.
  CHECK(count_events(sim.trace(), "emit", "SuarpReq") == 1);
}

TEST_CASE("completed exchanges leave both nonce stores identical") {
  for (auto variant : {SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    CAPTURE(static_cast<int>(variant));
    SuarpNet t(variant);
    auto& sim = t.net.build(12);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    sim.run_until(SimTime::seconds(10));

    crypto::AssociationId id{mac("aa:00:00:00:00:01"), mac("aa:00:00:00:00:10")};
    const auto& host_assoc = t.net.host_agent(t.a).keystore().get(id);
    const auto& server_assoc = t.net.server_agent(t.srv).keystore().get(id);
    CHECK(host_assoc.current_rn == server_assoc.current_rn);
    // And it actually rolled: the previous nonce differs from the current.
    REQUIRE(host_assoc.previous_rn.has_value());
    CHECK_FALSE(*host_assoc.previous_rn == host_assoc.current_rn);

    // The next exchange runs under the rolled nonce.
    t.net.act(SimTime::seconds(11), t.a, AgentAction::Verb::Resolve, "10.0.0.99");
    sim.run_until(SimTime::seconds(20));
    CHECK(t.net.host_agent(t.a).stats().unknown_mapping == 1);
  }
}

TEST_CASE("per-cycle verified integrity material grows with the variant") {
  std::map<int, int> mics_per_variant;
  int idx = 0;
  for (auto variant : {SuarpVariant::Base, SuarpVariant::AltV1, SuarpVariant::AltV2}) {
    SuarpNet t(variant);
    int counter_id = t.net.add_node(
        {"W", sim::NodeKind::Adversary,
         {{t.net.lan(), mac("aa:00:00:00:00:78"), ip("10.0.0.78"), false, -1}}},
        [] { return std::make_unique<MicCounter>(); });
    auto& sim = t.net.build(13);
    t.net.act(SimTime::ms(10), t.a, AgentAction::Verb::Resolve, "10.0.0.2");
    sim.run_until(SimTime::seconds(5));
    auto* counter = dynamic_cast<MicCounter*>(sim.agent(counter_id));
    REQUIRE(counter != nullptr);
    mics_per_variant[idx++] = counter->request_mics + counter->response_mics +
                              counter->ack_mics;
  }
  // Base: response MIC only. V1 adds the request MIC. V2 adds the
  // session-key proof on the response and the MIC-based acknowledgment.
  CHECK(mics_per_variant[0] == 1);
  CHECK(mics_per_variant[1] == 2);
  CHECK(mics_per_variant[2] == 3);
  CHECK(mics_per_variant[2] > mics_per_variant[1]);
  CHECK(mics_per_variant[1] > mics_per_variant[0]);
}

TEST_CASE("unprovisioned host cannot start an exchange") {
  Lan net;
  agents::ServerOptions server_opts;
  server_opts.static_mappings[ip("10.0.0.2")] = mac("aa:00:00:00:00:02");
  int srv = net.server("S", "aa:00:00:00:00:10", "10.0.0.10", server_opts);
  agents::HostOptions opts;
  opts.use_suarp = true;
  opts.server_node = srv;
  int a = net.host("A", "aa:00:00:00:00:01", "10.0.0.1", opts);  // empty keystore
  auto& sim = net.build(14);
  net.act(SimTime::ms(10), a, AgentAction::Verb::Resolve, "10.0.0.2");
  sim.run_until(SimTime::seconds(5));

  CHECK(count_events(sim.trace(), "emit", "SuarpReq") == 0);
  CHECK(count_state(sim.trace(), "A", "unprovisioned_key") == 1);
}

TEST_CASE("static mode: power-up registration enables resolution") {
  Lan net;
  agents::ServerOptions registry_opts;
  registry_opts.role = agents::ServerRole::Minus;
  registry_opts.suarp_variant = SuarpVariant::Base;
  registry_opts.advert_interval = SimTime::seconds(5);

  crypto::KeyStore a_store, b_store, registry_store;
  provision_pair(a_store, registry_store, mac("aa:00:00:00:00:01"),
                 mac("aa:00:00:00:00:10"));
  provision_pair(b_store, registry_store, mac("aa:00:00:00:00:02"),
                 mac("aa:00:00:00:00:10"));
  int registry = net.server("reg", "aa:00:00:00:00:10", "10.0.0.10",
                            registry_opts, registry_store, -1,
                            sim::NodeKind::DhcpMinus);

  agents::HostOptions host_opts;
  host_opts.use_suarp = true;
  host_opts.static_registration = true;
  host_opts.server_node = registry;
  int a = net.host("A", "aa:00:00:00:00:01", "10.0.0.1", host_opts, a_store);
  net.host("B", "aa:00:00:00:00:02", "10.0.0.2", host_opts, b_store);

  // An unkeyed host registers into the void: the registry must ignore it.
  agents::HostOptions stray_opts = host_opts;
  crypto::KeyStore stray_store;
  provision_pair(stray_store, stray_store, mac("aa:00:00:00:00:03"),
                 mac("aa:00:00:00:00:10"));  // one-sided: registry has no entry
  int stray = net.host("Z", "aa:00:00:00:00:03", "10.0.0.3", stray_opts, stray_store);

  auto& sim = net.build(15);
  net.act(SimTime::ms(500), a, AgentAction::Verb::Resolve, "10.0.0.2");
  net.act(SimTime::ms(800), a, AgentAction::Verb::Resolve, "10.0.0.3");
  sim.run_until(SimTime::seconds(10));

  // Registered targets resolve; the keyless one stays unknown.
  const auto& host_stats = net.host_agent(a).stats();
  CHECK(host_stats.resolutions_completed == 1);
  CHECK(host_stats.unknown_mapping == 1);
  CHECK(net.server_agent(registry).registrations().size() == 2);
  CHECK(count_state(sim.trace(), "reg", "register_ignored") == 1);
  auto cached = net.host_agent(a).cache().lookup(ip("10.0.0.2"), sim.now());
  REQUIRE(cached.has_value());
  CHECK(*cached == mac("aa:00:00:00:00:02"));
  (void)stray;
}

TEST_CASE("static mode: hosts learn an unknown registry from its adverts") {
  Lan net;
  agents::ServerOptions registry_opts;
  registry_opts.role = agents::ServerRole::Minus;
  registry_opts.advert_interval = SimTime::ms(1000);
  crypto::KeyStore a_store, registry_store;
  provision_pair(a_store, registry_store, mac("aa:00:00:00:00:01"),
                 mac("aa:00:00:00:00:10"));
  int registry = net.server("reg", "aa:00:00:00:00:10", "10.0.0.10",
                            registry_opts, registry_store, -1,
                            sim::NodeKind::DhcpMinus);

  agents::HostOptions host_opts;
  host_opts.use_suarp = true;
  host_opts.static_registration = true;
  host_opts.server_node = -1;  // identity learned from the broadcast advert
  int a = net.host("A", "aa:00:00:00:00:01", "10.0.0.1", host_opts, a_store);

  auto& sim = net.build(16);
  sim.run_until(SimTime::seconds(5));
  CHECK(count_state(sim.trace(), "A", "server_learned") == 1);
  CHECK(net.server_agent(registry).registrations().count(ip("10.0.0.1")) == 1);
}
