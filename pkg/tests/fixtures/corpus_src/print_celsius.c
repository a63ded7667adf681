#include <stdio.h>

void print_celsius(int fahrenheit) {
    int c = (fahrenheit - 32) * 5 / 9;
    printf("%dC\n", c);
}
