#include "sim/trace.hpp"

namespace suarp::sim {

namespace {

void append_json_string(std::string& out, const std::string& value) {
  out.push_back('"');
  for (char c : value) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

}  // namespace

void TraceLog::push(TraceEvent ev) {
  if (record_) events_.push_back(std::move(ev));
}

void TraceLog::emit(core::SimTime t, const core::Frame& frame) {
  ++emitted_;
  auto kind_idx = static_cast<std::size_t>(frame.payload.kind());
  ++emitted_by_kind_[kind_idx];
  emitted_bytes_by_kind_[kind_idx] += frame.wire_size;
  push({t, "emit", frame.src_mac.to_string(), frame.dst_mac.to_string(),
        core::msg_kind_name(frame.payload.kind()), frame.wire_size, "", ""});
}

void TraceLog::deliver(core::SimTime t, const core::Frame& frame,
                       const std::string& receiver) {
  ++delivered_;
  push({t, "deliver", frame.src_mac.to_string(), frame.dst_mac.to_string(),
        core::msg_kind_name(frame.payload.kind()), frame.wire_size, "ok",
        receiver});
}

void TraceLog::drop_loss(core::SimTime t, const core::Frame& frame) {
  ++dropped_loss_;
  push({t, "drop_loss", frame.src_mac.to_string(), frame.dst_mac.to_string(),
        core::msg_kind_name(frame.payload.kind()), frame.wire_size, "lost", ""});
}

void TraceLog::drop_boundary(core::SimTime t, const core::Frame& frame) {
  ++dropped_boundary_;
  push({t, "drop_boundary", frame.src_mac.to_string(), frame.dst_mac.to_string(),
        core::msg_kind_name(frame.payload.kind()), frame.wire_size, "no_receiver",
        ""});
}

void TraceLog::cache(core::SimTime t, const std::string& node,
                     const std::string& outcome, const std::string& detail) {
  push({t, "cache", node, "", "", 0, outcome, detail});
}

void TraceLog::state(core::SimTime t, const std::string& node,
                     const std::string& outcome, const std::string& detail) {
  push({t, "state", node, "", "", 0, outcome, detail});
}

std::string TraceLog::to_jsonl() const {
  std::string out;
  out.reserve(events_.size() * 96);
  for (const auto& ev : events_) {
    out += "{\"t\":";
    out += std::to_string(ev.t.ticks);
    out += ",\"kind\":";
    append_json_string(out, ev.kind);
    out += ",\"src\":";
    append_json_string(out, ev.src);
    out += ",\"dst\":";
    append_json_string(out, ev.dst);
    out += ",\"msg_kind\":";
    append_json_string(out, ev.msg_kind);
    out += ",\"size\":";
    out += std::to_string(ev.size);
    out += ",\"outcome\":";
    append_json_string(out, ev.outcome);
    if (!ev.detail.empty()) {
      out += ",\"detail\":";
      append_json_string(out, ev.detail);
    }
    out += "}\n";
  }
  return out;
}

}  // namespace suarp::sim
