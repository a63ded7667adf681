#include <stdio.h>

int log_scaled(int value, int factor) {
    int scaled = value * factor;
    fprintf(stdout, "%d\n", scaled);
    return scaled;
}
