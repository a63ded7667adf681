#include <assert.h>
int func0(int, int, int);
int main(void) {
    assert(func0(1, 2, 3) == 3);
    assert(func0(9, 2, 3) == 9);
    assert(func0(1, 7, 3) == 7);
    return 0;
}
