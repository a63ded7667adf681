#include <stdio.h>

void print_reverse(const int *v, int n) {
    int i;
    for (i = n - 1; i >= 0; i--) {
        printf("%d ", v[i]);
    }
    printf("\n");
}
