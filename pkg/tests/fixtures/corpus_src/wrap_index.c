int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}
