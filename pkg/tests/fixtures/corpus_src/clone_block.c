#include <string.h>

void clone_block(char *dst, const char *src, int n) {
    memcpy(dst, src, (size_t)n);
}
