#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/frame.hpp"
#include "core/sim_time.hpp"

namespace suarp::sim {

/// One trace line. Frame events use MAC text for src/dst; agent-level
/// events (cache mutations, state transitions) use node names.
struct TraceEvent {
  core::SimTime t;
  std::string kind;      // emit | deliver | drop_loss | drop_boundary | cache | state
  std::string src;
  std::string dst;
  std::string msg_kind;  // empty for non-frame events
  std::uint32_t size{0};
  std::string outcome;
  std::string detail;
};

/// Append-only event log plus an always-on accounting ledger. The ledger
/// stays active even when event retention is disabled for large
/// adversarial sweeps.
class TraceLog {
 public:
  explicit TraceLog(bool record_events = true) : record_(record_events) {}

  void emit(core::SimTime t, const core::Frame& frame);
  void deliver(core::SimTime t, const core::Frame& frame,
               const std::string& receiver);
  void drop_loss(core::SimTime t, const core::Frame& frame);
  void drop_boundary(core::SimTime t, const core::Frame& frame);
  void cache(core::SimTime t, const std::string& node, const std::string& outcome,
             const std::string& detail);
  void state(core::SimTime t, const std::string& node, const std::string& outcome,
             const std::string& detail);

  const std::vector<TraceEvent>& events() const { return events_; }

  /// One JSON object per line, fixed key order; byte-stable for a fixed
  /// (scenario, seed).
  std::string to_jsonl() const;

  // Ledger.
  std::uint64_t emitted() const { return emitted_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t dropped_loss() const { return dropped_loss_; }
  std::uint64_t dropped_boundary() const { return dropped_boundary_; }
  std::uint64_t emitted_of(core::MsgKind kind) const {
    return emitted_by_kind_[static_cast<std::size_t>(kind)];
  }
  std::uint64_t emitted_bytes_of(core::MsgKind kind) const {
    return emitted_bytes_by_kind_[static_cast<std::size_t>(kind)];
  }

 private:
  void push(TraceEvent ev);

  bool record_;
  std::vector<TraceEvent> events_;
  std::uint64_t emitted_{0}, delivered_{0}, dropped_loss_{0}, dropped_boundary_{0};
  std::array<std::uint64_t, 16> emitted_by_kind_{};
  std::array<std::uint64_t, 16> emitted_bytes_by_kind_{};
};

}  // namespace suarp::sim
