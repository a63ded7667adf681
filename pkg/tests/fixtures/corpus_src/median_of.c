#include <stdlib.h>

static int cmp_int(const void *a, const void *b);

int median_of(int *v, int n) {
    qsort(v, (size_t)n, sizeof(int), cmp_int);
    return v[n / 2];
}
