int func0(int x) {
    int n = 0;
    while (x) {
        n += x & 1;
        x = (int)((unsigned)x >> 1);
    }
    return n;
}
