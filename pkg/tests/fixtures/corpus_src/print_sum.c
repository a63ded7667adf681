#include <stdio.h>

int print_sum(int a, int b) {
    int s = a + b;
    printf("%d\n", s);
    return s;
}
