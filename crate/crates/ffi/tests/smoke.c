#include <stdio.h>
#include <string.h>

#include "feyn.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    const char *spin =
        "{\"type\":\"discrete\",\"sites\":1,\"configs\":["
        "{\"weight\":\"1/2\",\"values\":[\"1\"]},"
        "{\"weight\":\"1/2\",\"values\":[\"-1\"]}]}";
    FeynMeasure *m = NULL;
    CHECK(feyn_measure_from_json(spin, &m) == FEYN_STATUS_OK);

    char *json = NULL;
    CHECK(feyn_series_json(m, "{\"p\":4,\"order\":2}", &json) == FEYN_STATUS_OK);
    CHECK(strstr(json, "\"coefficients\":[\"1\",\"-1\",\"1/2\"]") != NULL);
    feyn_string_free(json);

    CHECK(feyn_series_json(m, "{\"p\":4}", &json) == FEYN_STATUS_CONFIG);
    CHECK(feyn_last_error() != NULL);

    size_t sites[2] = {0, 0};
    char *value = NULL;
    CHECK(feyn_moment(m, sites, 2, true, &value) == FEYN_STATUS_OK);
    CHECK(strcmp(value, "1") == 0);
    feyn_string_free(value);
    feyn_measure_free(m);

    uint64_t count = 0;
    CHECK(feyn_graph_count(0, 2, 2, FEYN_CONNECTED_ONLY, 0, &count) == FEYN_STATUS_OK);
    CHECK(count == 11);

    printf("ok %s\n", feyn_version());
    return 0;
}
