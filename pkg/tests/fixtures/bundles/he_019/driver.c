#include <assert.h>
int func0(int, int, int);
int main(void) {
    assert(func0(5, 0, 10) == 5);
    assert(func0(-5, 0, 10) == 0);
    assert(func0(50, 0, 10) == 10);
    return 0;
}
