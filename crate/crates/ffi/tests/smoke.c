#include <math.h>
#include <stdio.h>
#include "ckp.h"

int main(void) {
    double k1 = 0.0;
    if (ckp_favard(1, &k1) != CKP_STATUS_OK || fabs(k1 - 1.5707963267948966) > 1e-14) {
        return 1;
    }
    CkpDaubechiesMask *mask = NULL;
    if (ckp_daubechies_mask_new(1, &mask) != CKP_STATUS_OK) {
        return 2;
    }
    double buf[2];
    size_t len = 0;
    if (ckp_daubechies_mask_coeffs(mask, buf, 2, &len) != CKP_STATUS_OK || len != 2 || buf[0] != 0.5) {
        return 3;
    }
    ckp_daubechies_mask_free(mask);
    CkpRatio r;
    if (ckp_ratio(CKP_FAMILY_SPLINE, CKP_PART_PSI, 0, 1, 2.0, 1e-8, &r) == CKP_STATUS_OK) {
        return 4;
    }
    printf("%s\n", ckp_last_error_message());
    return 0;
}
