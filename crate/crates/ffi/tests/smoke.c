#include <stdio.h>
#include "oraclesep.h"

int main(void) {
    OsBundle *b = NULL;
    if (oraclesep_bundle_new(4, 9, &b) != OS_STATUS_OK) {
        fprintf(stderr, "%s\n", oraclesep_last_error());
        return 1;
    }
    uint64_t ct = 0, out = 0;
    if (oraclesep_bundle_obf(b, 0, 5, &ct) != OS_STATUS_OK) return 2;
    if (oraclesep_bundle_eval(b, ct, 7, &out) != OS_STATUS_OK || out != 7) return 3;
    oraclesep_bundle_free(b);

    OsReports *r = NULL;
    if (oraclesep_run_suite("abcd", 1, 20, &r) != OS_STATUS_OK) return 4;
    size_t n = oraclesep_reports_len(r), bad = oraclesep_reports_failures(r);
    oraclesep_reports_free(r);
    printf("%zu rows, %zu failures\n", n, bad);
    return n == 20 && bad == 0 ? 0 : 5;
}
