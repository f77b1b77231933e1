#include <stdio.h>
#include <string.h>
#include "regret_forge.h"

static const char *KP =
    "MMRBIP v1 kp MAX 4 1\n"
    "4 7\n5 9\n6 10\n6 11\n"
    "LE 10 4 0 3 1 4 2 5 3 6\n";

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            const char *m = rf_last_error_message();                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    m ? m : "no message");                               \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    RfInstance *inst = NULL;
    CHECK(rf_instance_parse_native(KP, &inst) == RF_STATUS_OK);
    CHECK(rf_instance_num_vars(inst) == 4);

    RfSolveOptions opts = rf_solve_options_default();
    opts.time_limit_s = 30.0;
    int64_t regret[2];
    RfAlgorithm algs[2] = {RF_ALGORITHM_BC, RF_ALGORITHM_ORACLE};
    for (int k = 0; k < 2; k++) {
        RfReport *rep = NULL;
        CHECK(rf_solve(inst, algs[k], &opts, &rep) == RF_STATUS_OK);
        RfReportStatus st;
        CHECK(rf_report_status(rep, &st) == RF_STATUS_OK);
        CHECK(st == RF_REPORT_STATUS_OPTIMAL);
        CHECK(rf_report_max_regret(rep, &regret[k]) == RF_STATUS_OK);
        uint8_t x[4];
        CHECK(rf_report_solution(rep, x, 4) == RF_STATUS_OK);
        int64_t again = -1;
        CHECK(rf_evaluate_max_regret(inst, x, 4, &again) == RF_STATUS_OK);
        CHECK(again == regret[k]);
        rf_report_free(rep);
    }
    CHECK(regret[0] == regret[1]);

    char *text = NULL;
    CHECK(rf_instance_to_native(inst, &text) == RF_STATUS_OK);
    CHECK(strcmp(text, KP) == 0);
    rf_string_free(text);

    RfInstance *bad = NULL;
    CHECK(rf_instance_parse_native("MMRBIP v9\n", &bad) == RF_STATUS_PARSE);
    CHECK(bad == NULL);
    CHECK(rf_last_error_message() != NULL);

    rf_instance_free(inst);
    printf("regret %lld\n", (long long)regret[0]);
    return 0;
}
