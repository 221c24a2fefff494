#include "mmsim/event_queue.hpp"

#include <string>

namespace mmsim {

namespace {
constexpr double kCausalitySlack = 1e-12;
}

void EventQueue::at(double t, std::function<void()> fn) {
    if (t < now_ - kCausalitySlack)
        throw SimError("event scheduled in the past: t=" + std::to_string(t) +
                       " now=" + std::to_string(now_));
    queue_.push(Entry{t < now_ ? now_ : t, next_order_++, std::move(fn)});
}

std::uint64_t EventQueue::run_until(double t_end) {
    std::uint64_t executed = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
        Entry e = queue_.top();
        queue_.pop();
        now_ = e.time;
        e.fn();
        ++executed;
    }
    if (t_end > now_) now_ = t_end;
    return executed;
}

}  // namespace mmsim
