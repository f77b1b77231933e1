#ifndef REGRET_FORGE_H
#define REGRET_FORGE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_ARGUMENT = 2,
  RF_STATUS_PARSE = 3,
  RF_STATUS_INFEASIBLE = 4,
  RF_STATUS_TIME_LIMIT = 5,
  RF_STATUS_NUMERICAL = 6,
  RF_STATUS_IO = 7,
  RF_STATUS_NO_SOLUTION = 8,
  RF_STATUS_PANIC = 9,
} RfStatus;

typedef enum RfDirection {
  RF_DIRECTION_MAX = 0,
  RF_DIRECTION_MIN = 1,
} RfDirection;

typedef enum RfAlgorithm {
  RF_ALGORITHM_FIX = 0,
  RF_ALGORITHM_DS = 1,
  RF_ALGORITHM_IDS_H = 2,
  RF_ALGORITHM_IDS_B = 3,
  RF_ALGORITHM_BC = 4,
  RF_ALGORITHM_ORACLE = 5,
} RfAlgorithm;

typedef enum RfReportStatus {
  RF_REPORT_STATUS_OPTIMAL = 0,
  RF_REPORT_STATUS_FEASIBLE = 1,
  RF_REPORT_STATUS_TIME_LIMIT = 2,
  RF_REPORT_STATUS_INFEASIBLE = 3,
} RfReportStatus;

// Opaque instance handle.
typedef struct RfInstance RfInstance;

// Opaque report handle.
typedef struct RfReport RfReport;

// Solver settings. A negative or non-finite `time_limit_s` means no limit.
typedef struct RfSolveOptions {
  double time_limit_s;
  // Hamming radius for `RF_ALGORITHM_IDS_H`.
  uint32_t d;
  bool local_exact;
} RfSolveOptions;

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *rf_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rf_version(void);

struct RfSolveOptions rf_solve_options_default(void);

// Parses an instance in the native text format.
enum RfStatus rf_instance_parse_native(const char *text, struct RfInstance **out);

// Reads and parses a native-format file.
enum RfStatus rf_instance_load(const char *path, struct RfInstance **out);

void rf_instance_free(struct RfInstance *inst);

// Number of binary variables, 0 for a null handle.
size_t rf_instance_num_vars(const struct RfInstance *inst);

// Number of constraint rows, 0 for a null handle.
size_t rf_instance_num_constraints(const struct RfInstance *inst);

enum RfStatus rf_instance_direction(const struct RfInstance *inst, enum RfDirection *out);

// Serializes the instance; release the string with [`rf_string_free`].
enum RfStatus rf_instance_to_native(const struct RfInstance *inst, char **out);

void rf_string_free(char *s);

// Runs `algorithm` on `inst`. `opts` may be null for the defaults. Budget
// exhaustion and empty feasible regions are reported through the report
// status, not through the return code.
enum RfStatus rf_solve(const struct RfInstance *inst,
                       enum RfAlgorithm algorithm,
                       const struct RfSolveOptions *opts,
                       struct RfReport **out);

void rf_report_free(struct RfReport *rep);

enum RfStatus rf_report_status(const struct RfReport *rep, enum RfReportStatus *out);

// Max regret of the reported solution; `RF_STATUS_NO_SOLUTION` if none.
enum RfStatus rf_report_max_regret(const struct RfReport *rep, int64_t *out);

int64_t rf_report_lower_bound(const struct RfReport *rep);

size_t rf_report_iterations(const struct RfReport *rep);

double rf_report_elapsed_seconds(const struct RfReport *rep);

// Copies the solution into `buf` as 0/1 bytes; `len` must equal the number
// of variables.
enum RfStatus rf_report_solution(const struct RfReport *rep, uint8_t *buf, size_t len);

// Exact max regret of the 0/1 vector `x` of length `len`.
enum RfStatus rf_evaluate_max_regret(const struct RfInstance *inst,
                                     const uint8_t *x,
                                     size_t len,
                                     int64_t *out);

#endif  /* REGRET_FORGE_H */
