unsigned add(unsigned a, unsigned b) {
    while (0) { }
    return a + b;
}
