#include <stdio.h>

void print_fib(int n) {
    int a = 0;
    int b = 1;
    int i;
    for (i = 0; i < n; i++) {
        printf("%d ", a);
        int t = a + b;
        a = b;
        b = t;
    }
    printf("\n");
}
