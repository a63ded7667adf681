#include <math.h>

double log_ratio(double a, double b) {
    return log(a) - log(b);
}
