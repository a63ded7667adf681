#include <math.h>

double fabs_diff(double a, double b) {
    return fabs(a - b);
}
