#include <assert.h>
int func0(int);
int main(void) {
    assert(func0(2) == 8);
    assert(func0(-3) == -27);
    assert(func0(0) == 0);
    return 0;
}
