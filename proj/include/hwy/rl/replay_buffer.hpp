#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hwy/common/error.hpp"
#include "hwy/common/random.hpp"
#include "hwy/env/types.hpp"

namespace hwy::rl {

struct Transition {
    env::Observation s;
    int a = 1;
    double r = 0.0;
    env::Observation s_next;
    bool terminal = false;
};

class LayoutConflict : public Error {
public:
    using Error::Error;
};

// Fixed-capacity FIFO ring. Index 0 is always the oldest stored transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }
    std::uint64_t total_inserted() const { return inserted_; }

    const Transition& at(std::size_t i) const;

    /// n indices drawn uniformly with replacement.
    std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

    void clear();

private:
    std::size_t capacity_;
    std::vector<Transition> items_;
    std::size_t head_ = 0;  // slot of the oldest item once full
    std::uint64_t inserted_ = 0;
    int layout_version_ = -1;
    std::size_t feature_count_ = 0;
};

}  // namespace hwy::rl
