#include <string.h>

int same_text(const char *a, const char *b) {
    return strcmp(a, b) == 0;
}
