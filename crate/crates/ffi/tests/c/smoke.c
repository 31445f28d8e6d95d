#include <math.h>
#include <stdio.h>
#include "ranklab.h"

int main(void) {
    uint32_t src[] = {0, 1, 2, 3};
    uint32_t dst[] = {1, 2, 0, 0};
    RanklabGraph *g = NULL;
    if (ranklab_graph_new(4, src, dst, 4, &g) != RANKLAB_STATUS_OK) {
        fprintf(stderr, "new: %s\n", ranklab_last_error());
        return 1;
    }
    double x[4];
    if (ranklab_pagerank(g, 0.15, 0.0, 0, x, 4) != RANKLAB_STATUS_OK) {
        fprintf(stderr, "pagerank: %s\n", ranklab_last_error());
        return 1;
    }
    double sum = x[0] + x[1] + x[2] + x[3];
    if (fabs(sum - 1.0) > 1e-9 || !(x[0] > x[3])) {
        return 2;
    }
    RanklabWalkConfig cfg = ranklab_walk_config_default();
    cfg.steps = 10000;
    cfg.diversity = RANKLAB_DIVERSITY_PD1;
    double w[4];
    if (ranklab_walk(g, &cfg, w, 3) != RANKLAB_STATUS_BUFFER_TOO_SMALL) {
        return 3;
    }
    ranklab_graph_free(g);
    printf("ok %s\n", ranklab_version());
    return 0;
}
