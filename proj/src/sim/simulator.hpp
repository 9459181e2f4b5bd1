#pragma once

#include <map>
#include <memory>
#include <queue>
#include <set>

#include "core/frame.hpp"
#include "core/rng.hpp"
#include "core/sim_time.hpp"
#include "sim/topology.hpp"
#include "sim/trace.hpp"

namespace suarp::sim {

using core::Frame;
using core::SimTime;

struct LossModel {
  double drop_probability{0.0};
  std::map<int, double> per_segment;  // segment id -> override

  double probability_for(int segment) const {
    auto it = per_segment.find(segment);
    return it == per_segment.end() ? drop_probability : it->second;
  }
};

struct SimConfig {
  std::uint64_t seed{1};
  SimTime propagation_delay{SimTime::ms(1)};  // per hop
  LossModel loss;
  bool record_trace{true};
};

/// Scripted agent input (the traffic script and scenario hooks).
struct AgentAction {
  enum class Verb {
    Resolve,       // target = IP to resolve
    SendData,      // target = destination IP, size = payload bytes
    DhcpAcquire,
    DhcpRenew,
    Detach,        // node leaves the wire (scripted shutdown)
    Attach,
    AdversaryKick, // start the attack plan
  };
  Verb verb{Verb::Resolve};
  core::IpAddress target;
  std::uint32_t size{0};
};

class Sim;

/// Everything an agent may touch while handling an event. Agents never
/// call each other; frames, timers and scripted actions are the only
/// inputs, which keeps every run replayable.
class Ctx {
 public:
  Ctx(Sim& sim, int self) : sim_(sim), self_(self) {}

  SimTime now() const;
  const Topology& topo() const;
  int self() const { return self_; }

  /// Emit on the node's only attachment (hosts/servers).
  void send(Frame frame);
  void send_on(int attachment, Frame frame);

  void schedule_timer(SimTime delay, std::uint32_t tag, std::uint64_t arg = 0);
  void schedule_action(SimTime delay, AgentAction action);

  core::Rng& rng();
  TraceLog& trace();
  void log_state(const std::string& outcome, const std::string& detail = "");
  void log_cache(const std::string& outcome, const std::string& detail);

  /// Runtime identity tricks (adversary only): listen on a foreign MAC,
  /// sniff unaddressed traffic, knock another node off the wire.
  void install_mac_alias(core::MacAddress mac);
  void set_promiscuous();
  void detach_node(int node);

 private:
  Sim& sim_;
  int self_;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual void on_start(Ctx&) {}
  virtual void on_frame(Ctx&, const Frame&, int attachment) {}
  virtual void on_timer(Ctx&, std::uint32_t tag, std::uint64_t arg) {}
  virtual void on_action(Ctx&, const AgentAction&) {}
};

/// Deterministic discrete-event engine. Events fire in (time, insertion
/// sequence) order; a fixed seed replays byte-identically.
class Sim {
 public:
  Sim(Topology topo, SimConfig config);

  void add_agent(int node, std::unique_ptr<Agent> agent);

  void schedule_action(SimTime at, int node, AgentAction action);
  void run_until(SimTime end);

  SimTime now() const { return now_; }
  const Topology& topo() const { return topo_; }
  TraceLog& trace() { return trace_; }
  const TraceLog& trace() const { return trace_; }
  core::Rng& rng() { return rng_; }
  Agent* agent(int node) {
    return node < static_cast<int>(agents_.size()) ? agents_[static_cast<std::size_t>(node)].get() : nullptr;
  }

  // Used by Ctx.
  void emit_frame(int node, int attachment, Frame frame);
  void schedule_timer(SimTime at, int node, std::uint32_t tag, std::uint64_t arg);
  void install_mac_alias(int node, core::MacAddress mac);
  void set_detached(int node, bool detached);
  bool is_detached(int node) const { return detached_.count(node) != 0; }
  /// Wireless-style sniffing: the node receives copies of all frames on its
  /// segment, addressed to it or not.
  void set_promiscuous(int node, bool enabled);

 private:
  struct Event {
    SimTime at;
    std::uint64_t seq{0};
    enum class Kind { FrameDelivery, TimerExpiry, Action, Start } kind;
    int node{-1};
    Frame frame;            // FrameDelivery
    std::uint32_t timer_tag{0};
    std::uint64_t timer_arg{0};
    AgentAction action;     // Action
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;  // min-heap
      return a.seq > b.seq;
    }
  };

  void push_event(Event ev);
  void dispatch(const Event& ev);

  Topology topo_;
  SimConfig config_;
  core::Rng rng_;
  TraceLog trace_;
  SimTime now_{SimTime::ms(0)};
  std::uint64_t next_seq_{0};
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::vector<std::unique_ptr<Agent>> agents_;
  std::map<int, std::set<core::MacAddress>> aliases_;
  std::set<int> detached_;
  std::set<int> promiscuous_;
};

}  // namespace suarp::sim
