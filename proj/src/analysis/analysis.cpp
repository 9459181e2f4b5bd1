#include "analysis/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "core/message.hpp"

namespace suarp::analysis {

namespace {

std::string fmt2(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(value));
  return buf;
}

std::uint64_t schedule_sum(const std::vector<int>& schedule) {
  std::uint64_t total = 0;
  for (int w : schedule) total += static_cast<std::uint64_t>(w);
  return total;
}

}  // namespace

double round2(double value) {
  return std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
}

double pct_of(std::uint64_t part, std::uint64_t total) {
  if (total == 0) return 0.0;
  return static_cast<double>(part) / static_cast<double>(total) * 100.0;
}

Projection project_suarp(const SessionSummary& summary, bool with_ack) {
  std::uint64_t pkts = (with_ack ? 3 : 2) * summary.arp_reply_pkts;
  return {pkts, pct_of(pkts, summary.total_pkts)};
}

Projection project_sarp(const SessionSummary& summary) {
  std::uint64_t pkts = summary.arp_pkts + 6 * summary.arp_reply_pkts;
  return {pkts, pct_of(pkts, summary.total_pkts)};
}

ReductionResult reduction_factor(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows) {
  ReductionResult result;
  double sum = 0;
  int counted = 0;
  for (const auto& [arp, reduced] : rows) {
    if (reduced == 0) {
      ++result.skipped;
      continue;
    }
    sum += static_cast<double>(arp) / static_cast<double>(reduced);
    ++counted;
  }
  result.factor = counted == 0 ? 0.0 : sum / counted;
  return result;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "arp") return Scheme::Arp;
  if (name == "suarp1") return Scheme::Suarp1;
  if (name == "suarp2") return Scheme::Suarp2;
  if (name == "suarp3") return Scheme::Suarp3;
  if (name == "dhcp") return Scheme::Dhcp;
  if (name == "sdhcp1") return Scheme::Sdhcp1;
  if (name == "sdhcp2") return Scheme::Sdhcp2;
  if (name == "sdhcp3") return Scheme::Sdhcp3;
  throw UnknownScheme(name);
}

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Arp: return "arp";
    case Scheme::Suarp1: return "suarp1";
    case Scheme::Suarp2: return "suarp2";
    case Scheme::Suarp3: return "suarp3";
    case Scheme::Dhcp: return "dhcp";
    case Scheme::Sdhcp1: return "sdhcp1";
    case Scheme::Sdhcp2: return "sdhcp2";
    case Scheme::Sdhcp3: return "sdhcp3";
  }
  return "?";
}

std::vector<int> scheme_schedule(Scheme scheme, const CostModel& model) {
  // Excluding ACK encryption downgrades only the schemes whose final step
  // is an encrypted acknowledgment; the version-2 MIC-only ACK keeps its
  // crypto weight.
  const int enc_ack = model.ack_encryption_counted ? 2 : 1;
  switch (scheme) {
    case Scheme::Arp: return {1};
    // request, MIC-bearing response, acknowledgment
    case Scheme::Suarp1: return {1, 2, enc_ack};
    case Scheme::Suarp2: return {2, 2, enc_ack};
    case Scheme::Suarp3: return {2, 2, 2};
    // discover, offer, request, acknowledgment
    case Scheme::Dhcp: return {1, 1, 1, 1};
    case Scheme::Sdhcp1: return {1, 2, 2, enc_ack};
    case Scheme::Sdhcp2: return {2, 2, 2, enc_ack};
    case Scheme::Sdhcp3: return {2, 2, 2, 2};
  }
  throw UnknownScheme("?");
}

std::uint64_t cost_for_session(const SessionSummary& summary, Scheme scheme,
                               const CostModel& model) {
  std::uint64_t cycles =
      scheme == Scheme::Arp ? summary.arp_pkts : summary.arp_reply_pkts;
  return cycles * schedule_sum(scheme_schedule(scheme, model));
}

SessionSummary summarize_trace(const sim::TraceLog& trace) {
  SessionSummary summary;
  summary.total_pkts = trace.emitted();
  std::uint64_t requests = trace.emitted_of(core::MsgKind::ArpRequest);
  std::uint64_t replies = trace.emitted_of(core::MsgKind::ArpReply);
  summary.arp_pkts = requests + replies;
  summary.arp_reply_pkts = replies;
  std::uint64_t arp_bytes = trace.emitted_bytes_of(core::MsgKind::ArpRequest) +
                            trace.emitted_bytes_of(core::MsgKind::ArpReply);
  summary.arp_present = summary.arp_pkts > 0;
  summary.avg_arp_size =
      summary.arp_present
          ? static_cast<double>(arp_bytes) / static_cast<double>(summary.arp_pkts)
          : 0.0;
  return summary;
}

SessionSummary summarize_trace_jsonl(const std::string& jsonl) {
  SessionSummary summary;
  std::uint64_t arp_bytes = 0;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json event;
    try {
      event = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw MalformedTrace("line " + std::to_string(line_no) + " is not JSON");
    }
    if (!event.contains("kind") || !event.contains("msg_kind") ||
        !event.contains("size"))
      throw MalformedTrace("line " + std::to_string(line_no) + " missing fields");
    if (event["kind"] != "emit") continue;
    ++summary.total_pkts;
    std::string kind = event["msg_kind"];
    if (kind == "ArpRequest" || kind == "ArpReply") {
      ++summary.arp_pkts;
      arp_bytes += event["size"].get<std::uint64_t>();
      if (kind == "ArpReply") ++summary.arp_reply_pkts;
    }
  }
  summary.arp_present = summary.arp_pkts > 0;
  summary.avg_arp_size =
      summary.arp_present
          ? static_cast<double>(arp_bytes) / static_cast<double>(summary.arp_pkts)
          : 0.0;
  return summary;
}

std::vector<SessionSummary> read_summary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw MalformedCsv("empty input");
  if (line != "session,hosts,total_pkts,arp_pkts,arp_reply_pkts,avg_arp_size")
    throw MalformedCsv("unexpected header: " + line);

  std::vector<SessionSummary> sessions;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    if (cols.size() != 6)
      throw MalformedCsv("line " + std::to_string(line_no) + ": want 6 columns");
    SessionSummary s;
    try {
      s.session = std::stoi(cols[0]);
      s.host_count = std::stoi(cols[1]);
      s.total_pkts = std::stoull(cols[2]);
      s.arp_pkts = std::stoull(cols[3]);
      s.arp_reply_pkts = std::stoull(cols[4]);
      s.avg_arp_size = std::stod(cols[5]);
    } catch (const std::exception&) {
      throw MalformedCsv("line " + std::to_string(line_no) + ": bad number");
    }
    s.arp_present = s.arp_pkts > 0;
    s.validate();
    sessions.push_back(s);
  }
  if (sessions.empty()) throw MalformedCsv("no data rows");
  return sessions;
}

std::string write_summary_csv(const std::vector<SessionSummary>& sessions) {
  std::string out = "session,hosts,total_pkts,arp_pkts,arp_reply_pkts,avg_arp_size\n";
  for (const auto& s : sessions) {
    out += std::to_string(s.session) + "," + std::to_string(s.host_count) + "," +
           std::to_string(s.total_pkts) + "," + std::to_string(s.arp_pkts) + "," +
           std::to_string(s.arp_reply_pkts) + "," + fmt2(s.avg_arp_size) + "\n";
  }
  return out;
}

TablesReport make_tables_report(const std::vector<SessionSummary>& sessions) {
  TablesReport report;
  std::string header =
      "session,total_pkts,arp_pkts,suarp_pkts,pct_arp,pct_suarp,pct_sarp\n";
  report.table2_csv = header;
  report.table3_csv = header;

  std::vector<std::pair<std::uint64_t, std::uint64_t>> rows2, rows3;
  for (const auto& s : sessions) {
    Projection no_ack = project_suarp(s, false);
    Projection with_ack = project_suarp(s, true);
    Projection sarp = project_sarp(s);
    double arp_pct = pct_of(s.arp_pkts, s.total_pkts);

    auto row = [&](const Projection& p) {
      return std::to_string(s.session) + "," + std::to_string(s.total_pkts) +
             "," + std::to_string(s.arp_pkts) + "," + std::to_string(p.pkts) +
             "," + fmt2(arp_pct) + "," + fmt2(p.pct) + "," + fmt2(sarp.pct) +
             "\n";
    };
    report.table2_csv += row(no_ack);
    report.table3_csv += row(with_ack);
    rows2.push_back({s.arp_pkts, no_ack.pkts});
    rows3.push_back({s.arp_pkts, with_ack.pkts});
  }

  ReductionResult r2 = reduction_factor(rows2);
  ReductionResult r3 = reduction_factor(rows3);
  report.factor_no_ack = r2.factor;
  report.factor_with_ack = r3.factor;
  report.factor_blend = (r2.factor + r3.factor) / 2.0;

  std::ostringstream text;
  text << "session  total    arp   suarp2x  suarp3x  %arp   %suarp2x  %suarp3x  %sarp\n";
  for (const auto& s : sessions) {
    Projection no_ack = project_suarp(s, false);
    Projection with_ack = project_suarp(s, true);
    Projection sarp = project_sarp(s);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-7d  %-7llu %-5llu %-8llu %-8llu %-6s %-9s %-9s %s\n",
                  s.session,
                  static_cast<unsigned long long>(s.total_pkts),
                  static_cast<unsigned long long>(s.arp_pkts),
                  static_cast<unsigned long long>(no_ack.pkts),
                  static_cast<unsigned long long>(with_ack.pkts),
                  fmt2(pct_of(s.arp_pkts, s.total_pkts)).c_str(),
                  fmt2(no_ack.pct).c_str(), fmt2(with_ack.pct).c_str(),
                  fmt2(sarp.pct).c_str());
    text << line;
  }
  text << "broadcast packet reduction (no ack):   " << fmt2(r2.factor) << "x\n";
  text << "broadcast packet reduction (with ack): " << fmt2(r3.factor) << "x\n";
  text << "blended (50% piggyback):               " << fmt2(report.factor_blend)
       << "x\n";
  if (r2.skipped > 0)
    text << "warning: " << r2.skipped
         << " session(s) skipped (zero reduced packet count)\n";
  report.text = text.str();

  nlohmann::ordered_json metrics;
  metrics["sessions"] = sessions.size();
  metrics["reduction_factor_no_ack"] = round2(r2.factor);
  metrics["reduction_factor_with_ack"] = round2(r3.factor);
  metrics["reduction_factor_blend"] = round2(report.factor_blend);
  metrics["skipped_sessions"] = r2.skipped;
  report.metrics_json = metrics.dump(2) + "\n";
  return report;
}

}  // namespace suarp::analysis
