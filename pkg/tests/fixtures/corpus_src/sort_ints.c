#include <stdlib.h>

static int cmp_int(const void *a, const void *b);

void sort_ints(int *v, int n) {
    qsort(v, (size_t)n, sizeof(int), cmp_int);
}
