#include <stdio.h>

void print_triangle(int rows) {
    int i;
    int j;
    for (i = 1; i <= rows; i++) {
        for (j = 0; j < i; j++) {
            printf("*");
        }
        printf("\n");
    }
}
