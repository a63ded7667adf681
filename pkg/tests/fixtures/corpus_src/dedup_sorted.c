int dedup_sorted(int *v, int n) {
    if (n == 0) {
        return 0;
    }
    int w = 1;
    int i;
    for (i = 1; i < n; i++) {
        if (v[i] != v[w - 1]) {
            v[w] = v[i];
            w++;
        }
    }
    return w;
}
