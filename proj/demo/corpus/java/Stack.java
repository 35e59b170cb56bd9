// minimal int stack
class Stack {
    private int[] slots = new int[16];
    private int top = 0;

    void push(int value) {
        if (top == slots.length) {
            int[] grown = new int[slots.length * 2];
            System.arraycopy(slots, 0, grown, 0, slots.length);
            slots = grown;
        }
        slots[top++] = value;
    }

    int pop() {
        return slots[--top];
    }

    boolean empty() {
        return top == 0;
    }
}
