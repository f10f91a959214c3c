#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ffpinn.h"

#define CHECK(cond)                                                       \
    do {                                                                  \
        if (!(cond)) {                                                    \
            const char *m = ffpinn_last_error_message();                  \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    m ? m : "no error");                                  \
            return 1;                                                     \
        }                                                                 \
    } while (0)

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: smoke OUT_DIR\n");
        return 2;
    }
    FfpinnConfig *cfg = NULL;
    CHECK(ffpinn_config_from_preset("poisson-mff", &cfg) == FFPINN_STATUS_OK);
    CHECK(ffpinn_config_set_iterations(cfg, 3) == FFPINN_STATUS_OK);
    CHECK(ffpinn_config_validate(cfg) == FFPINN_STATUS_OK);

    FfpinnNetwork *net = NULL;
    CHECK(ffpinn_network_new(cfg, &net) == FFPINN_STATUS_OK);
    size_t in = 0, out = 0, np = 0;
    CHECK(ffpinn_network_dims(net, &in, &out, &np) == FFPINN_STATUS_OK);
    CHECK(in == 1 && out == 1 && np > 0);
    double x[3] = {0.0, 0.5, 1.0}, y[3];
    CHECK(ffpinn_network_predict(net, x, 3, y, 3) == FFPINN_STATUS_OK);
    CHECK(isfinite(y[0]) && isfinite(y[1]) && isfinite(y[2]));
    CHECK(ffpinn_network_predict(net, x, 3, y, 2) == FFPINN_STATUS_VALIDATION);
    ffpinn_network_free(net);

    FfpinnRecord *rec = NULL;
    CHECK(ffpinn_run(cfg, argv[1], &rec) == FFPINN_STATUS_OK);
    CHECK(ffpinn_record_succeeded(rec));
    double err = -1.0;
    CHECK(ffpinn_record_metric(rec, "final_relative_l2", &err) == FFPINN_STATUS_OK);
    CHECK(err > 0.0);
    char *json = NULL;
    CHECK(ffpinn_record_to_json(rec, &json) == FFPINN_STATUS_OK);
    CHECK(strstr(json, "\"input_hash\"") != NULL);
    ffpinn_string_free(json);
    ffpinn_record_free(rec);

    FfpinnConfig *bad = NULL;
    CHECK(ffpinn_config_from_json("{\"benchmark\": 3}", &bad) == FFPINN_STATUS_VALIDATION);
    CHECK(bad == NULL && ffpinn_last_error_message() != NULL);
    ffpinn_config_free(cfg);
    printf("final_relative_l2 %.6e\n", err);
    return 0;
}
