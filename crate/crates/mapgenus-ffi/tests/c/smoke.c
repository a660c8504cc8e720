#include <stdio.h>
#include <string.h>

#include "mapgenus.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);        \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    MgTables *t = NULL;
    CHECK(mg_tables_new(2, 4, &t) == MG_STATUS_OK && t != NULL);

    uint64_t n = 0;
    CHECK(mg_count_u64(t, MG_KIND_REGULAR, 1, 2, 2, &n) == MG_STATUS_OK);
    CHECK(n == 60);

    char *s = NULL;
    CHECK(mg_count(t, MG_KIND_TWO_LEGGED, 2, 2, 3, &s) == MG_STATUS_OK);
    CHECK(strcmp(s, "21240") == 0);
    mg_string_free(s);

    CHECK(mg_count(t, MG_KIND_REGULAR, 3, 1, 2, &s) == MG_STATUS_NOT_COVERED);
    CHECK(mg_last_error() != NULL);

    MgHistogram *h = NULL;
    CHECK(mg_oracle_enumerate(2, 2, 0, 1, &h) == MG_STATUS_OK);
    uint64_t g1 = 0;
    CHECK(mg_histogram_count(h, 1, &g1) == MG_STATUS_OK && g1 == 60);
    mg_histogram_free(h);

    mg_tables_free(t);
    printf("ok %s\n", mg_version());
    return 0;
}
