#include <stdio.h>

void print_range(int n) {
    int i;
    for (i = 0; i < n; i++) {
        printf("%d ", i);
    }
    printf("\n");
}
