/* sum of squares */
int main() {
    int total = 0;
    for (int i = 1; i < 5; i++) {
        total += i * i; // square
    }
    return total != 30;
}
