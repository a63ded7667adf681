#include <assert.h>
int func0(const int *, int);
int main(void) {
    int a[4] = {3, 9, 2, 7};
    int b[1] = {-5};
    assert(func0(a, 4) == 9);
    assert(func0(b, 1) == -5);
    return 0;
}
