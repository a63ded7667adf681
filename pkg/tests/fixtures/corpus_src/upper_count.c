int upper_count(const char *s) {
    int n = 0;
    while (*s) {
        if (*s >= 'A' && *s <= 'Z') {
            n++;
        }
        s++;
    }
    return n;
}
