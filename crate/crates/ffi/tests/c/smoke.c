#include <math.h>
#include <stdio.h>

#include "sphere_qmc.h"

int main(void) {
    double north[3] = {0.0, 0.0, 1.0};
    SqmcConfig *one = NULL;
    if (sqmc_config_from_xyz(north, 1, &one) != SQMC_STATUS_OK) return 1;
    SqmcWce w;
    if (sqmc_wce(one, 2.0, 1e-10, &w) != SQMC_STATUS_OK) return 2;
    if (fabs(w.value - 0.28209479177387814) > 1e-12) return 3;
    sqmc_config_free(one);

    SqmcConfig *c = NULL;
    if (sqmc_sample(SQMC_SAMPLER_SPHERICAL_EIG, 50, 7, 0, &c) != SQMC_STATUS_OK) return 4;
    if (sqmc_config_len(c) != 50) return 5;
    double xyz[150];
    if (sqmc_config_copy_xyz(c, xyz, 149) != SQMC_STATUS_BUFFER_TOO_SMALL) return 6;
    if (sqmc_config_copy_xyz(c, xyz, 150) != SQMC_STATUS_OK) return 7;
    sqmc_config_free(c);

    if (sqmc_wce(NULL, 2.0, 1e-8, &w) != SQMC_STATUS_NULL_POINTER) return 8;
    char msg[128];
    if (sqmc_last_error_message(msg, sizeof msg) == 0) return 9;

    SqmcExplicitConfidence e;
    if (sqmc_explicit_confidence(1000, 3.0, &e) != SQMC_STATUS_OK) return 10;
    printf("%s %.6e %.6e\n", sqmc_version(), e.wce_bound, e.failure_prob);
    return 0;
}
