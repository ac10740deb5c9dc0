#include <math.h>
#include <stdio.h>

int main(void) {
    const char *json = "{\"schema_version\":1,\"name\":\"sq\",\"vertices\":[[0,0],[1,0],[1,1],[0,1]]}";
    GsPlan *plan = NULL;
    if (gs_plan_from_polygon_json(json, 1.0, &plan) != GS_STATUS_OK) {
        fprintf(stderr, "%s\n", gs_last_error());
        return 1;
    }
    size_t breaches = 0;
    GsStatus s = gs_simulate(plan, "{\"kind\":\"random_walk\"}", 100, 1, NAN, &breaches, NULL);
    printf("%zu guards, %zu breaches\n", gs_plan_guard_total(plan), breaches);
    gs_plan_free(plan);
    return s == GS_STATUS_OK ? 0 : 1;
}
