#include <stdio.h>

int print_square(int x) {
    printf("%d\n", x * x);
    return x * x;
}
