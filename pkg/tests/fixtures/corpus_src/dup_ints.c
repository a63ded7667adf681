#include <stdlib.h>
#include <string.h>

int *dup_ints(const int *v, int n) {
    int *out = malloc((size_t)n * sizeof(int));
    if (out != 0) {
        memcpy(out, v, (size_t)n * sizeof(int));
    }
    return out;
}
