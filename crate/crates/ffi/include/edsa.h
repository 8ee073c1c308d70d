#ifndef EDSA_H
#define EDSA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum EdsaStatus {
  EDSA_STATUS_OK = 0,
  EDSA_STATUS_NULL_ARGUMENT = 1,
  EDSA_STATUS_INVALID_UTF8 = 2,
  EDSA_STATUS_INVALID_INPUT = 3,
  EDSA_STATUS_SOLVE_FAILED = 4,
  EDSA_STATUS_REJECTED = 5,
  EDSA_STATUS_NO_DATA = 6,
  EDSA_STATUS_PANIC = 7,
} EdsaStatus;

typedef struct EdsaLedger EdsaLedger;

typedef struct EdsaPrices EdsaPrices;

typedef struct EdsaReport EdsaReport;

typedef struct EdsaScenario EdsaScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library from the same thread.
const char *edsa_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void edsa_string_free(char *s);

// Parses and validates a TOML scenario.
//
// # Safety
// `toml` must be a valid C string and `out` a valid pointer.
enum EdsaStatus edsa_scenario_from_toml(const char *toml, struct EdsaScenario **out);

// # Safety
// `s` must be null or a scenario from [`edsa_scenario_from_toml`], freed once.
void edsa_scenario_free(struct EdsaScenario *s);

// # Safety
// `s` must be a live scenario handle.
size_t edsa_scenario_demand_count(const struct EdsaScenario *s);

// # Safety
// `s` must be a live scenario handle.
size_t edsa_scenario_device_count(const struct EdsaScenario *s);

// # Safety
// `s` must be a live scenario handle and `out` a valid pointer.
enum EdsaStatus edsa_solve_greedy(const struct EdsaScenario *s, struct EdsaReport **out);

// Exact search with the default size limits and a time budget in
// milliseconds.
//
// # Safety
// `s` must be a live scenario handle and `out` a valid pointer.
enum EdsaStatus edsa_solve_exact(const struct EdsaScenario *s,
                                 uint64_t timeout_ms,
                                 struct EdsaReport **out);

// # Safety
// `r` must be null or a report handle, freed once.
void edsa_report_free(struct EdsaReport *r);

// Plan revenue; NaN for a null handle.
//
// # Safety
// `r` must be null or a live report handle.
double edsa_report_revenue(const struct EdsaReport *r);

// # Safety
// `r` must be null or a live report handle.
size_t edsa_report_selected_count(const struct EdsaReport *r);

// Whether the plan is proved optimal.
//
// # Safety
// `r` must be null or a live report handle.
bool edsa_report_is_optimal(const struct EdsaReport *r);

// Full report as JSON.
//
// # Safety
// `r` must be a live report handle and `out` a valid pointer.
enum EdsaStatus edsa_report_to_json(const struct EdsaReport *r, char **out);

// # Safety
// `out` must be a valid pointer.
enum EdsaStatus edsa_prices_new(struct EdsaPrices **out);

// # Safety
// `p` must be null or a price ledger handle, freed once.
void edsa_prices_free(struct EdsaPrices *p);

// Appends a traded price.
//
// # Safety
// `p` must be a live price ledger handle.
enum EdsaStatus edsa_prices_record(struct EdsaPrices *p,
                                   uint16_t data_type,
                                   double price,
                                   double quality_score,
                                   double risk_score,
                                   int64_t timestamp);

// Quotes a final price from the records in `[start, end)`. Returns
// `NoData` when the window holds no records of the type.
//
// # Safety
// `p` must be a live price ledger handle and `out` a valid pointer.
enum EdsaStatus edsa_prices_quote(const struct EdsaPrices *p,
                                  uint16_t data_type,
                                  int64_t start,
                                  int64_t end,
                                  double quality_score,
                                  double risk_score,
                                  double beta,
                                  double exe_fee,
                                  double *out);

// Creates an empty ledger. `keys_json` maps actor ids to signing secrets,
// e.g. `{"seller":"s1","buyer":"b1"}`; `config_json` may be null for the
// default configuration.
//
// # Safety
// String arguments must be valid C strings (or null where allowed) and
// `out` a valid pointer.
enum EdsaStatus edsa_ledger_new(const char *keys_json,
                                const char *config_json,
                                struct EdsaLedger **out);

// # Safety
// `l` must be null or a ledger handle, freed once.
void edsa_ledger_free(struct EdsaLedger *l);

// Signs `payload_json` with each of the `n_signers` actors and submits it.
// On success the receipt JSON is written to `receipt_out` (for reads, the
// query result). A rejected transaction returns `Rejected` and leaves the
// ledger unchanged.
//
// # Safety
// `l` must be a live ledger handle, `signers` must point to `n_signers`
// valid C strings, and `receipt_out` must be a valid pointer.
enum EdsaStatus edsa_ledger_submit(struct EdsaLedger *l,
                                   const char *payload_json,
                                   const char *const *signers,
                                   size_t n_signers,
                                   char **receipt_out);

// Number of committed log entries.
//
// # Safety
// `l` must be null or a live ledger handle.
size_t edsa_ledger_len(const struct EdsaLedger *l);

// Hex digest of the materialized state.
//
// # Safety
// `l` must be a live ledger handle and `out` a valid pointer.
enum EdsaStatus edsa_ledger_state_digest(const struct EdsaLedger *l, char **out);

// Hash-chained log as newline-delimited JSON.
//
// # Safety
// `l` must be a live ledger handle and `out` a valid pointer.
enum EdsaStatus edsa_ledger_log_ndjson(const struct EdsaLedger *l, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDSA_H */
