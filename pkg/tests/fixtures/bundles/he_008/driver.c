#include <assert.h>
int func0(const int *, int);
int main(void) {
    int a[5] = {1, 2, 3, 4, 5};
    int b[2] = {-7, 7};
    assert(func0(a, 5) == 15);
    assert(func0(b, 2) == 0);
    assert(func0(a, 0) == 0);
    return 0;
}
