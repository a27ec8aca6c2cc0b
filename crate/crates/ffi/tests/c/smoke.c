#include <math.h>
#include <stdio.h>
#include "mlcs.h"

int main(void) {
    MlcsParams *p = NULL;
    if (mlcs_params_new(1.0, 1.0, 1.0, 1.0, &p) != MLCS_STATUS_OK) return 1;
    MlcsSeries s;
    if (mlcs_ml_eval(p, 1.0, 1e-14, 1000, &s) != MLCS_STATUS_OK) return 2;
    if (fabs(s.value - exp(1.0)) > 1e-13) return 3;
    MlcsParams *bad = NULL;
    if (mlcs_params_new(0.0, 1.0, 1.0, 1.0, &bad) != MLCS_STATUS_DOMAIN) return 4;
    printf("%.17g|%s\n", s.value, mlcs_last_error());
    mlcs_params_free(p);
    return 0;
}
