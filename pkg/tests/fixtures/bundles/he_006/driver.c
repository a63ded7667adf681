#include <assert.h>
long func0(int);
int main(void) {
    assert(func0(0) == 1);
    assert(func0(5) == 120);
    assert(func0(10) == 3628800L);
    return 0;
}
