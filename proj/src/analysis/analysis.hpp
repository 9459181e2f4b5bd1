#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sim/trace.hpp"

namespace suarp::analysis {

class MalformedTrace : public std::runtime_error {
 public:
  explicit MalformedTrace(const std::string& what)
      : std::runtime_error("malformed trace: " + what) {}
};

class MalformedCsv : public std::runtime_error {
 public:
  explicit MalformedCsv(const std::string& what)
      : std::runtime_error("malformed csv: " + what) {}
};

class UnknownScheme : public std::invalid_argument {
 public:
  explicit UnknownScheme(const std::string& name)
      : std::invalid_argument("unknown scheme: " + name) {}
};

/// One capture session's packet counts (the row shape of the published
/// traffic tables).
struct SessionSummary {
  int session{0};
  int host_count{0};
  std::uint64_t total_pkts{0};
  std::uint64_t arp_pkts{0};
  std::uint64_t arp_reply_pkts{0};
  double avg_arp_size{0.0};
  bool arp_present{true};  // false when the trace held no ARP frames at all

  void validate() const {
    if (arp_reply_pkts > arp_pkts || arp_pkts > total_pkts)
      throw MalformedCsv("session counts must satisfy replies <= arp <= total");
  }
};

/// Two-decimal half-up rounding, the rendering used by all reports.
double round2(double value);

double pct_of(std::uint64_t part, std::uint64_t total);

struct Projection {
  std::uint64_t pkts{0};
  double pct{0.0};
};

/// Unicast resolution projections from a capture: one request/response pair
/// per reply seen (2x), plus a standalone ACK in the worst case (3x).
Projection project_suarp(const SessionSummary& summary, bool with_ack);

/// Four-step PKI-style secure ARP projection. The packet formula
/// arp + 6 * replies is an empirical fit validated against the published
/// percentage columns (see the fit test before trusting changes).
Projection project_sarp(const SessionSummary& summary);

struct ReductionResult {
  double factor{0.0};  // mean over sessions of arp / reduced
  int skipped{0};      // sessions with zero reduced-packet counts
};
ReductionResult reduction_factor(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows);

enum class Scheme { Arp, Suarp1, Suarp2, Suarp3, Dhcp, Sdhcp1, Sdhcp2, Sdhcp3 };

Scheme parse_scheme(const std::string& name);
const char* scheme_name(Scheme scheme);

/// Per-step weights: 1 for a plain step, 2 when the step carries
/// encryption or MIC work. `ack_encryption_counted = false` reproduces the
/// variant that ignores crypto on the final acknowledgment step.
struct CostModel {
  bool ack_encryption_counted{true};
};
std::vector<int> scheme_schedule(Scheme scheme, const CostModel& model);

/// Session time cost: resolution cycles times the summed step weights.
/// Plain ARP is one weight-1 step per captured ARP packet; every other
/// scheme runs one cycle per observed reply.
std::uint64_t cost_for_session(const SessionSummary& summary, Scheme scheme,
                               const CostModel& model);

SessionSummary summarize_trace(const sim::TraceLog& trace);
SessionSummary summarize_trace_jsonl(const std::string& jsonl);

/// CSV schema: session,hosts,total_pkts,arp_pkts,arp_reply_pkts,avg_arp_size
std::vector<SessionSummary> read_summary_csv(const std::string& text);
std::string write_summary_csv(const std::vector<SessionSummary>& sessions);

/// Everything the tables subcommand emits.
struct TablesReport {
  std::string table2_csv;  // session,total_pkts,arp_pkts,suarp_pkts,pct_arp,pct_suarp,pct_sarp
  std::string table3_csv;
  std::string text;
  std::string metrics_json;
  double factor_no_ack{0.0};
  double factor_with_ack{0.0};
  double factor_blend{0.0};
};
TablesReport make_tables_report(const std::vector<SessionSummary>& sessions);

}  // namespace suarp::analysis
