#include <stdio.h>

void echo_char_codes(const char *s) {
    while (*s) {
        printf("%d\n", (int)*s);
        s++;
    }
}
