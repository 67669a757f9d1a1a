#pragma once

#include <cstdint>

// Lightweight multiply-accumulate accounting.  Hot paths report their work in
// bulk (one add per matrix-vector product, not per scalar), so the hook costs
// a thread-local pointer test when no counter is installed.

namespace mimovq::ops {

struct MacCounter {
    std::uint64_t macs = 0;
};

inline MacCounter*& active_counter() {
    thread_local MacCounter* active = nullptr;
    return active;
}

inline void add_macs(std::uint64_t n) {
    if (MacCounter* c = active_counter()) c->macs += n;
}

// Routes MAC accounting of the current thread into `counter` while alive.
class CountScope {
public:
    explicit CountScope(MacCounter& counter) : previous_(active_counter()) {
        active_counter() = &counter;
    }
    ~CountScope() { active_counter() = previous_; }
    CountScope(const CountScope&) = delete;
    CountScope& operator=(const CountScope&) = delete;

private:
    MacCounter* previous_;
};

}  // namespace mimovq::ops
