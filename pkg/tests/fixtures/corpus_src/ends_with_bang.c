#include <string.h>

int ends_with_bang(const char *s) {
    size_t n = strlen(s);
    return n > 0 && s[n - 1] == '!';
}
