void func0(int);
int main(void) {
    func0(15);
    return 0;
}
