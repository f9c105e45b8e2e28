/* Minimal C client: samples one linear field and box-counts its zero set. */
#include <math.h>
#include <stdio.h>

#include "levelset_lab.h"

int main(void) {
    LslConfig *cfg = lsl_config_new_default();
    if (lsl_config_set(cfg, "solver.N", "20") != LSL_STATUS_OK ||
        lsl_config_set(cfg, "solver.grid", "128") != LSL_STATUS_OK) {
        fprintf(stderr, "%s\n", lsl_last_error());
        return 1;
    }
    if (lsl_config_set(cfg, "no.such_key", "1") == LSL_STATUS_OK) {
        return 1;
    }
    LslGrid *g = NULL;
    if (lsl_sample_linear_field(cfg, 0, &g) != LSL_STATUS_OK) {
        fprintf(stderr, "%s\n", lsl_last_error());
        return 1;
    }
    double slope = 0.0;
    if (lsl_grid_level_dimension(g, 0.0, &slope) != LSL_STATUS_OK) {
        fprintf(stderr, "%s\n", lsl_last_error());
        return 1;
    }
    printf("levelset-lab %s: n = %zu, slope %.4f\n", lsl_version(), lsl_grid_resolution(g), slope);
    lsl_grid_free(g);
    lsl_config_free(cfg);
    return (slope > 1.0 && slope < 1.6) ? 0 : 1;
}
