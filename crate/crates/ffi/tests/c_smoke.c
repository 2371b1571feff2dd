#include <stdio.h>
#include <string.h>
#include "lcw.h"

int main(void) {
    LcwMetric *m = NULL;
    if (lcw_metric_from_catalog("sl2r", &m) != LCW_STATUS_OK) return 1;
    if (lcw_metric_dim(m) != 3) return 2;
    double p[3] = {0.0, 0.0, 0.0};
    char *json = NULL;
    LcwVerdict v;
    if (lcw_check_json(m, p, 3, 1e-8, 0, &json, &v) != LCW_STATUS_OK) return 3;
    if (v != LCW_VERDICT_FAILS) return 4;
    lcw_string_free(json);
    if (lcw_metric_parse("dim = 3\ng11 = 1 +\n", &m) == LCW_STATUS_OK) return 5;
    if (strlen(lcw_last_error()) == 0) return 6;
    lcw_metric_free(m);
    printf("ok\n");
    return 0;
}
