#include <stdio.h>
#include <string.h>

#include "noether.h"

static const char *PROBLEM =
    "independent t\n"
    "dependent u\n"
    "lagrangian L = 1/2*d(u;t)^2 - 1/2*u^2\n"
    "symmetry time { X[t] = 1 }\n";

int main(void) {
    NoetherProblem *p = NULL;
    if (noether_problem_parse(PROBLEM, NULL, &p) != NOETHER_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", noether_last_error());
        return 1;
    }
    const char *argv[] = {"current", "L", "time"};
    NoetherOptions opts = noether_options_default();
    opts.records = true;
    char *report = NULL;
    NoetherStatus s = noether_run(p, argv, 3, &opts, &report);
    int ok = s == NOETHER_STATUS_OK && strstr(report, "B[t]=1/2*d(u;t)^2 + 1/2*u^2\n") != NULL;
    fputs(report, stdout);
    noether_string_free(report);

    const char *bad[] = {"current", "L", "missing"};
    ok = ok && noether_run(p, bad, 3, NULL, &report) == NOETHER_STATUS_INPUT;
    noether_string_free(report);
    ok = ok && noether_run(p, argv, 3, NULL, NULL) == NOETHER_STATUS_NULL_ARGUMENT;

    noether_problem_free(p);
    return ok ? 0 : 1;
}
