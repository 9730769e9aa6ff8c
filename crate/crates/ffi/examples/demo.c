/* cc demo.c -I../include -L../../../target/release -ltwoarc_ffi */
#include <stdio.h>
#include "twoarc.h"

int main(void) {
    TwoarcComplex pts[4] = {{-1.0, 0.0}, {-0.5, 0.0}, {0.5, 0.0}, {1.0, 0.0}};
    TwoarcTuple *tuple = NULL;
    TwoarcPair *pair = NULL;
    TwoarcCertificate cert;
    TwoarcComplex t[5];

    if (twoarc_tuple_new(pts, &tuple) != TWOARC_STATUS_OK) {
        fprintf(stderr, "%s\n", twoarc_last_error());
        return 1;
    }
    twoarc_tuple_check(tuple, 4, 1e-9, &cert);
    printf("accepted=%d m=%lld m'=%lld\n", cert.accepted, (long long)cert.m, (long long)cert.m_prime);

    TwoarcStatus s = twoarc_pair_construct(tuple, 4, 1e-9, &pair);
    if (s != TWOARC_STATUS_OK) {
        fprintf(stderr, "status %d: %s\n", (int)s, twoarc_last_error());
        twoarc_tuple_free(tuple);
        return (int)s;
    }
    twoarc_pair_t_coeffs(pair, t, 5);
    for (int i = 0; i < 5; i++) printf("t[%d] = %.12f\n", i, t[i].re);

    twoarc_pair_free(pair);
    twoarc_tuple_free(tuple);
    return 0;
}
