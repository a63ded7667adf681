#include <stdio.h>

int print_abs(int x) {
    int v = x < 0 ? -x : x;
    printf("%d\n", v);
    return v;
}
