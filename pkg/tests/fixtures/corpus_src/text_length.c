#include <string.h>

int text_length(const char *s) {
    return (int)strlen(s);
}
