#include <stdio.h>

void print_countdown(int n) {
    while (n > 0) {
        printf("%d\n", n);
        n--;
    }
    puts("go");
}
