#include <vector>
#include <numeric>

// fixed-capacity ring over a vector
class Ring {
 public:
    explicit Ring(std::size_t capacity) : slots_(capacity, 0) {}

    void push(int value) {
        slots_[head_ % slots_.size()] = value;
        ++head_;
    }

    int sum() const {
        return std::accumulate(slots_.begin(), slots_.end(), 0);
    }

 private:
    std::vector<int> slots_;
    std::size_t head_ = 0;
};

int checksum() {
    Ring ring(4);
    for (int i = 0; i < 9; i++) {
        ring.push(i * i);
    }
    return ring.sum();
}
