bool flag(const int x) {
    return static_cast<bool>(x);
}
