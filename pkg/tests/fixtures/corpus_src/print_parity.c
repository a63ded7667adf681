#include <stdio.h>

void print_parity(int x) {
    if (x % 2 == 0) {
        puts("even");
    } else {
        puts("odd");
    }
}
