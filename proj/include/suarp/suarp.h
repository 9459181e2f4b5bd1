/*
 * suarp - secure unicast address resolution simulator, C API.
 *
 * The library wraps a deterministic LAN simulator plus the traffic
 * analysis toolkit behind opaque handles. All returned strings are owned
 * by their handle and stay valid until the handle is freed. Functions
 * returning suarp_status set a thread-local error message retrievable via
 * suarp_last_error().
 */
#ifndef SUARP_H
#define SUARP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum suarp_status {
  SUARP_OK = 0,
  SUARP_ERR = 1,        /* internal failure */
  SUARP_ERR_CONFIG = 2, /* invalid scenario / input schema */
  SUARP_ERR_IO = 3,     /* unreadable or unwritable file */
} suarp_status;

const char* suarp_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* suarp_last_error(void);

/* ---- scenarios ---- */

typedef struct suarp_scenario suarp_scenario;
typedef struct suarp_run suarp_run;

suarp_status suarp_scenario_load_file(const char* path, suarp_scenario** out);
suarp_status suarp_scenario_load_text(const char* json_text, suarp_scenario** out);
void suarp_scenario_set_seed(suarp_scenario* scenario, uint64_t seed);
const char* suarp_scenario_name(const suarp_scenario* scenario);
void suarp_scenario_free(suarp_scenario* scenario);

suarp_status suarp_scenario_run(const suarp_scenario* scenario, suarp_run** out);

/* Trace of every frame emission/delivery/drop plus agent state changes,
 * one JSON object per line. Byte-identical for a fixed (scenario, seed). */
const char* suarp_run_trace(const suarp_run* run);
const char* suarp_run_metrics(const suarp_run* run);    /* JSON */
const char* suarp_run_report_csv(const suarp_run* run); /* CSV projections */
/* NULL when the scenario has no adversary. */
const char* suarp_run_attack_report(const suarp_run* run);
void suarp_run_free(suarp_run* run);

/* ---- analysis reports ---- */

typedef struct suarp_report suarp_report;

/* Input CSV schema:
 *   session,hosts,total_pkts,arp_pkts,arp_reply_pkts,avg_arp_size
 * Report keys: "table2.csv", "table3.csv", "summary.txt", "metrics.json". */
suarp_status suarp_tables_from_csv_text(const char* csv_text, suarp_report** out);
suarp_status suarp_tables_from_csv_file(const char* path, suarp_report** out);

/* Full adversarial sweep over `seeds` seeds. Keys: "matrix.txt",
 * "matrix.json". attempts_per_cell = 0 selects the default (10000). */
suarp_status suarp_attack_matrix(uint32_t seeds, uint32_t attempts_per_cell,
                                 suarp_report** out);

/* NULL for unknown keys. */
const char* suarp_report_get(const suarp_report* report, const char* key);
void suarp_report_free(suarp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SUARP_H */
