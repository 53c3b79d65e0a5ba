#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace corvo {

// Bounded FIFO handoff between two pipeline stages. push blocks while full
// (backpressure, the lossless default); push_drop_oldest evicts the stalest
// queued item instead. pop blocks until an item arrives or the channel is
// closed and drained.
template <typename T>
class BoundedChannel {
  public:
    explicit BoundedChannel(std::size_t capacity) : capacity_(capacity ? capacity : 1) {}

    void push(T item) {
        std::unique_lock<std::mutex> lock(mutex_);
        not_full_.wait(lock, [&] { return queue_.size() < capacity_ || closed_; });
        if (closed_) return;  // receiver is gone; drop silently
        queue_.push_back(std::move(item));
        not_empty_.notify_one();
    }

    // Returns true when an older item had to be evicted to make room.
    bool push_drop_oldest(T item) {
        std::unique_lock<std::mutex> lock(mutex_);
        if (closed_) return false;
        bool dropped = false;
        if (queue_.size() >= capacity_) {
            queue_.pop_front();
            dropped = true;
        }
        queue_.push_back(std::move(item));
        not_empty_.notify_one();
        return dropped;
    }

    std::optional<T> pop() {
        std::unique_lock<std::mutex> lock(mutex_);
        not_empty_.wait(lock, [&] { return !queue_.empty() || closed_; });
        if (queue_.empty()) return std::nullopt;
        T item = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return item;
    }

    // No more pushes; pending items stay poppable.
    void close() {
        std::lock_guard<std::mutex> lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return queue_.size();
    }

  private:
    mutable std::mutex mutex_;
    std::condition_variable not_empty_, not_full_;
    std::deque<T> queue_;
    std::size_t capacity_;
    bool closed_ = false;
};

}  // namespace corvo
