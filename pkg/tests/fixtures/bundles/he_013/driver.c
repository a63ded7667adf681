#include <assert.h>
int func0(const char *);
int main(void) {
    assert(func0("racecar") == 1);
    assert(func0("abc") == 0);
    assert(func0("") == 1);
    return 0;
}
