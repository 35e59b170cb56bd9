int main(void) {
    const int x = 1;
    return sizeof(x);
}
