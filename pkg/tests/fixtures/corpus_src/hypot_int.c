#include <math.h>

double hypot_int(int a, int b) {
    return sqrt((double)(a * a + b * b));
}
