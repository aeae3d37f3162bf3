#include "hwy/rl/replay_buffer.hpp"

#include <string>

namespace hwy::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    items_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (t.a < 0 || t.a >= env::kActionCount) throw Error("transition action out of range: " + std::to_string(t.a));
    if (t.s.layout_version != t.s_next.layout_version || t.s.features.size() != t.s_next.features.size()) {
        throw LayoutConflict("transition mixes observation layouts");
    }
    if (layout_version_ < 0) {
        layout_version_ = t.s.layout_version;
        feature_count_ = t.s.features.size();
    } else if (t.s.layout_version != layout_version_ || t.s.features.size() != feature_count_) {
        throw LayoutConflict("transition layout differs from buffer contents");
    }
    ++inserted_;
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw Error("replay index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw Error("cannot sample from an empty replay buffer");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_int(items_.size()));
    return idx;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    std::vector<const Transition*> out;
    out.reserve(n);
    for (auto i : sample_indices(n, rng)) out.push_back(&at(i));
    return out;
}

void ReplayBuffer::clear() {
    items_.clear();
    head_ = 0;
    inserted_ = 0;
    layout_version_ = -1;
    feature_count_ = 0;
}

}  // namespace hwy::rl
