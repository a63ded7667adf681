int func0(int n) {
    int r = 0;
    if (n < 0) {
        return -1;
    }
    while (n > 0) {
        r = r * 10 + n % 10;
        n /= 10;
    }
    return r;
}
