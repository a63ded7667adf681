int func0(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    long r = 1;
    int i;
    for (i = 0; i < k; i++) {
        r = r * (n - i) / (i + 1);
    }
    return (int)r;
}
