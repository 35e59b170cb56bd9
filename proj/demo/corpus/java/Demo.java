// tiny loop
class Demo {
    static int twice(int x) {
        return x * 2;
    }
}
