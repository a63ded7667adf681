#include <string.h>

int shared_prefix(const char *a, const char *b) {
    int n = 0;
    while (a[n] && b[n] && a[n] == b[n]) {
        n++;
    }
    return n;
}
