#include <stdio.h>
#include <string.h>
#include "wtds.h"

static int failures = 0;
#define CHECK(cond, msg)                                        \
    do {                                                        \
        if (!(cond)) {                                          \
            fprintf(stderr, "FAIL: %s\n", msg);                 \
            failures++;                                         \
        }                                                       \
    } while (0)

int main(void) {
    CHECK(wtds_version() != NULL, "version");

    const char *text =
        "p wtds 6 8 1\n"
        "e 1 3\ne 3 2\ne 1 4\ne 4 2\ne 1 5\ne 5 2\ne 1 6\ne 6 2\n";
    WtdsInstance *inst = NULL;
    CHECK(wtds_instance_parse(text, &inst) == WTDS_STATUS_OK, "parse ok");
    CHECK(inst != NULL, "parse handle");

    WtdsReport *rep = NULL;
    CHECK(wtds_kernelize(inst, &rep) == WTDS_STATUS_OK, "kernelize ok");
    int decided = wtds_report_decided(rep);
    CHECK(decided >= -1 && decided <= 1, "decided in range");

    char *kernel = NULL;
    CHECK(wtds_report_kernel_text(rep, &kernel) == WTDS_STATUS_OK, "kernel text");
    CHECK(kernel != NULL && strstr(kernel, "p wtds") != NULL, "kernel header");
    wtds_string_free(kernel);

    char *json = NULL;
    CHECK(wtds_report_json(rep, &json) == WTDS_STATUS_OK, "report json");
    CHECK(json != NULL && strstr(json, "\"bounds\"") != NULL, "json bounds");
    wtds_string_free(json);
    wtds_report_free(rep);

    int decision = -7;
    CHECK(wtds_solve(inst, 15, &decision) == WTDS_STATUS_OK, "solve ok");
    CHECK(decision == 0 || decision == 1, "solve decision");
    CHECK(wtds_solve(inst, 2, &decision) == WTDS_STATUS_TOO_LARGE, "solve cap");
    CHECK(wtds_last_error_message() != NULL, "error message set");
    wtds_instance_free(inst);

    WtdsInstance *bad = NULL;
    CHECK(wtds_instance_parse("p wtds 1 9 0\n", &bad) == WTDS_STATUS_PARSE_ERROR,
          "parse error status");
    CHECK(bad == NULL, "parse error leaves handle null");
    CHECK(wtds_last_error_message() != NULL, "parse error message");

    wtds_instance_free(NULL);
    wtds_report_free(NULL);
    wtds_string_free(NULL);

    if (failures == 0) {
        printf("C ABI smoke test: all checks passed\n");
        return 0;
    }
    fprintf(stderr, "C ABI smoke test: %d failures\n", failures);
    return 1;
}
