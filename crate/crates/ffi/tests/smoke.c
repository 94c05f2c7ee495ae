#include <stdio.h>
#include "scpizza.h"

int main(void) {
    const char *json = "{\"masses\":[{\"color\":0,\"polygons\":[{\"weight\":1,\"outer\":[[0,0],[1,0],[1,1],[0,1]]}]}]}";
    ScpInstance *inst = NULL;
    if (scp_instance_from_json(json, &inst) != SCP_STATUS_OK) {
        fprintf(stderr, "%s\n", scp_last_error());
        return 1;
    }
    double p[2] = {0.5, -0.5};
    double f = 0.0;
    ScpStatus st = scp_eval_f64(inst, p, 2, &f, 1);
    char *report = NULL;
    if (st == SCP_STATUS_OK) {
        st = scp_solve(inst, "1/1000", -1, 0, &report);
    }
    printf("%g %s\n", f, report ? report : scp_last_error());
    scp_string_free(report);
    scp_instance_free(inst);
    return st == SCP_STATUS_OK ? 0 : 1;
}
