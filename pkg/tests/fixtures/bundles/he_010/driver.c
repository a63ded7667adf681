#include <assert.h>
int func0(int);
int main(void) {
    assert(func0(0) == 0);
    assert(func0(7) == 3);
    assert(func0(255) == 8);
    return 0;
}
