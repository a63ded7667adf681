#include <string.h>

void copy_text(char *dst, const char *src) {
    strcpy(dst, src);
    strcat(dst, "!");
}
