#include "sim/simulator.hpp"

namespace suarp::sim {

SimTime Ctx::now() const { return sim_.now(); }
const Topology& Ctx::topo() const { return sim_.topo(); }

void Ctx::send(Frame frame) { sim_.emit_frame(self_, 0, std::move(frame)); }

void Ctx::send_on(int attachment, Frame frame) {
  sim_.emit_frame(self_, attachment, std::move(frame));
}

void Ctx::schedule_timer(SimTime delay, std::uint32_t tag, std::uint64_t arg) {
  sim_.schedule_timer(sim_.now() + delay, self_, tag, arg);
}

void Ctx::schedule_action(SimTime delay, AgentAction action) {
  sim_.schedule_action(sim_.now() + delay, self_, std::move(action));
}

core::Rng& Ctx::rng() { return sim_.rng(); }
TraceLog& Ctx::trace() { return sim_.trace(); }

void Ctx::log_state(const std::string& outcome, const std::string& detail) {
  sim_.trace().state(sim_.now(), sim_.topo().node(self_).name, outcome, detail);
}

void Ctx::log_cache(const std::string& outcome, const std::string& detail) {
  sim_.trace().cache(sim_.now(), sim_.topo().node(self_).name, outcome, detail);
}

void Ctx::install_mac_alias(core::MacAddress mac) {
  sim_.install_mac_alias(self_, mac);
}

void Ctx::set_promiscuous() { sim_.set_promiscuous(self_, true); }

void Ctx::detach_node(int node) { sim_.set_detached(node, true); }

Sim::Sim(Topology topo, SimConfig config)
    : topo_(std::move(topo)), config_(config), rng_(config.seed),
      trace_(config.record_trace) {
  agents_.resize(static_cast<std::size_t>(topo_.node_count()));
}

void Sim::add_agent(int node, std::unique_ptr<Agent> agent) {
  agents_.at(static_cast<std::size_t>(node)) = std::move(agent);
  // Startup runs before any same-tick scripted action: agents are added
  // before actions are scheduled, and events fire in insertion order.
  Event ev;
  ev.at = now_;
  ev.kind = Event::Kind::Start;
  ev.node = node;
  push_event(std::move(ev));
}

void Sim::push_event(Event ev) {
  ev.seq = next_seq_++;
  queue_.push(std::move(ev));
}

void Sim::schedule_action(SimTime at, int node, AgentAction action) {
  Event ev;
  ev.at = at;
  ev.kind = Event::Kind::Action;
  ev.node = node;
  ev.action = std::move(action);
  push_event(std::move(ev));
}

void Sim::schedule_timer(SimTime at, int node, std::uint32_t tag,
                         std::uint64_t arg) {
  Event ev;
  ev.at = at;
  ev.kind = Event::Kind::TimerExpiry;
  ev.node = node;
  ev.timer_tag = tag;
  ev.timer_arg = arg;
  push_event(std::move(ev));
}

void Sim::install_mac_alias(int node, core::MacAddress mac) {
  aliases_[node].insert(mac);
}

void Sim::set_detached(int node, bool detached) {
  if (detached)
    detached_.insert(node);
  else
    detached_.erase(node);
}

void Sim::set_promiscuous(int node, bool enabled) {
  if (enabled)
    promiscuous_.insert(node);
  else
    promiscuous_.erase(node);
}

void Sim::emit_frame(int node, int attachment, Frame frame) {
  if (detached_.count(node)) return;  // a powered-off node emits nothing
  const NodeSpec& sender = topo_.node(node);
  const Attachment& att = sender.attachments.at(static_cast<std::size_t>(attachment));
  trace_.emit(now_, frame);

  bool matched = false;
  for (int receiver : topo_.nodes_on_segment(att.segment)) {
    if (receiver == node) continue;
    if (detached_.count(receiver)) continue;
    const NodeSpec& spec = topo_.node(receiver);

    bool addressed = frame.dst_mac.is_broadcast();
    int rx_attachment = -1;
    for (std::size_t a = 0; a < spec.attachments.size(); ++a) {
      if (spec.attachments[a].segment != att.segment) continue;
      rx_attachment = static_cast<int>(a);
      if (!addressed && spec.attachments[a].mac == frame.dst_mac) addressed = true;
    }
    if (!addressed) {
      auto alias_it = aliases_.find(receiver);
      if (alias_it != aliases_.end() && alias_it->second.count(frame.dst_mac))
        addressed = true;
    }
    bool sniffed = !addressed && promiscuous_.count(receiver) != 0;
    if ((!addressed && !sniffed) || rx_attachment < 0) continue;

    if (addressed) matched = true;
    double p = config_.loss.probability_for(att.segment);
    if (p > 0.0 && core::random_unit(rng_) < p) {
      trace_.drop_loss(now_, frame);
      continue;
    }
    Event ev;
    ev.at = now_ + config_.propagation_delay;
    ev.kind = Event::Kind::FrameDelivery;
    ev.node = receiver;
    ev.frame = frame;
    // Delivery dispatch needs the receiving attachment; encode it in
    // timer_arg to keep the event struct flat.
    ev.timer_arg = static_cast<std::uint64_t>(rx_attachment);
    push_event(std::move(ev));
  }
  if (!matched) trace_.drop_boundary(now_, frame);
}

void Sim::dispatch(const Event& ev) {
  Agent* agent = ev.node >= 0 ? agents_.at(static_cast<std::size_t>(ev.node)).get() : nullptr;
  if (!agent) return;

  Ctx ctx(*this, ev.node);
  switch (ev.kind) {
    case Event::Kind::FrameDelivery:
      // In-flight frames to a node that detached meanwhile just vanish.
      if (detached_.count(ev.node)) return;
      trace_.deliver(now_, ev.frame, topo_.node(ev.node).name);
      agent->on_frame(ctx, ev.frame, static_cast<int>(ev.timer_arg));
      break;
    case Event::Kind::TimerExpiry:
      if (detached_.count(ev.node)) return;
      agent->on_timer(ctx, ev.timer_tag, ev.timer_arg);
      break;
    case Event::Kind::Action:
      if (ev.action.verb == AgentAction::Verb::Detach) {
        set_detached(ev.node, true);
        trace_.state(now_, topo_.node(ev.node).name, "detached", "");
        return;
      }
      if (ev.action.verb == AgentAction::Verb::Attach) {
        set_detached(ev.node, false);
        trace_.state(now_, topo_.node(ev.node).name, "attached", "");
        return;
      }
      if (detached_.count(ev.node)) return;
      agent->on_action(ctx, ev.action);
      break;
    case Event::Kind::Start:
      agent->on_start(ctx);
      break;
  }
}

void Sim::run_until(SimTime end) {
  while (!queue_.empty() && queue_.top().at <= end) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    dispatch(ev);
  }
  now_ = end;
}

}  // namespace suarp::sim
