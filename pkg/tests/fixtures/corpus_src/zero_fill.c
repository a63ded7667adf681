#include <string.h>

void zero_fill(int *v, int n) {
    memset(v, 0, (size_t)n * sizeof(int));
}
