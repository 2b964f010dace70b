#include <math.h>
#include <stdio.h>
#include <string.h>

#include "infdiv.h"

#define CHECK(cond)                                               \
    do {                                                          \
        if (!(cond)) {                                            \
            fprintf(stderr, "check failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                             \
        }                                                         \
    } while (0)

int main(void) {
    double z0 = 0.0, residual = 1.0;
    CHECK(infdiv_root_z0(&z0, &residual) == INFDIV_STATUS_OK);
    CHECK(fabs(z0 - 4.493409457909064) < 1e-12);

    InfdivSample *sample = NULL;
    CHECK(infdiv_sample_from_registry("uniform", 2000, 7, &sample) == INFDIV_STATUS_OK);
    CHECK(infdiv_sample_len(sample) == 2000);

    InfdivTestConfig cfg = infdiv_test_config_default();
    CHECK(cfg.bootstrap_b == 199);
    InfdivReport *report = NULL;
    CHECK(infdiv_run_test(sample, &cfg, &report) == INFDIV_STATUS_OK);
    CHECK(infdiv_report_decision(report) == 1);
    CHECK(infdiv_report_statistic_count(report) == 2);

    InfdivStatisticResult stat;
    CHECK(infdiv_report_statistic(report, 0, &stat) == INFDIV_STATUS_OK);
    CHECK(stat.statistic == INFDIV_STAT_T3);
    CHECK(stat.observed > 0.05);

    char *json = NULL;
    CHECK(infdiv_report_to_json(report, &json) == INFDIV_STATUS_OK);
    CHECK(strstr(json, "REJECT_ID") != NULL);
    infdiv_string_free(json);

    CHECK(infdiv_cr_constant(3.0, &z0) == INFDIV_STATUS_INVALID_ARGUMENT);
    CHECK(strstr(infdiv_last_error(), "(0, 2)") != NULL);

    infdiv_report_free(report);
    infdiv_sample_free(sample);
    printf("ok\n");
    return 0;
}
