#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace cryodaq {

/// Mutex/condvar bounded FIFO for handing immutable batches between
/// activities. `push_force` ignores the bound; it is reserved for items that
/// must never be dropped.
template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : cap_(capacity) {}

    /// Non-blocking. False when full or closed.
    bool try_push(T v) {
        {
            std::lock_guard lk(m_);
            if (closed_ || q_.size() >= cap_) return false;
            q_.push_back(std::move(v));
        }
        not_empty_.notify_one();
        return true;
    }

    /// Waits for space. False if the queue was closed.
    bool push(T v) {
        {
            std::unique_lock lk(m_);
            not_full_.wait(lk, [&] { return closed_ || q_.size() < cap_; });
            if (closed_) return false;
            q_.push_back(std::move(v));
        }
        not_empty_.notify_one();
        return true;
    }

    bool push_force(T v) {
        {
            std::lock_guard lk(m_);
            if (closed_) return false;
            q_.push_back(std::move(v));
        }
        not_empty_.notify_one();
        return true;
    }

    /// Blocks until an item arrives; nullopt once closed and drained.
    std::optional<T> pop() {
        std::unique_lock lk(m_);
        not_empty_.wait(lk, [&] { return closed_ || !q_.empty(); });
        return take(lk);
    }

    std::optional<T> pop_for(std::chrono::milliseconds timeout) {
        std::unique_lock lk(m_);
        if (!not_empty_.wait_for(lk, timeout, [&] { return closed_ || !q_.empty(); })) return std::nullopt;
        return take(lk);
    }

    /// Producers fail from now on; consumers drain what is left.
    void close() {
        {
            std::lock_guard lk(m_);
            closed_ = true;
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::size_t size() const {
        std::lock_guard lk(m_);
        return q_.size();
    }

    std::size_t capacity() const noexcept { return cap_; }

private:
    std::optional<T> take(std::unique_lock<std::mutex>& lk) {
        if (q_.empty()) return std::nullopt;
        T v = std::move(q_.front());
        q_.pop_front();
        lk.unlock();
        not_full_.notify_one();
        return v;
    }

    std::size_t cap_;
    mutable std::mutex m_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> q_;
    bool closed_ = false;
};

}  // namespace cryodaq
