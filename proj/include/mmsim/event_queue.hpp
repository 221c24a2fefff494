#ifndef MMSIM_EVENT_QUEUE_HPP
#define MMSIM_EVENT_QUEUE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "mmsim/errors.hpp"

namespace mmsim {

// Deterministic event queue: execution order is (time, insertion counter)
// lexicographic, so two events at the same instant run in the order they
// were scheduled.
class EventQueue {
public:
    double now() const { return now_; }

    void at(double t, std::function<void()> fn);
    void in(double dt, std::function<void()> fn) { at(now_ + dt, std::move(fn)); }

    // Executes every event with time <= t_end and leaves now() at t_end.
    // Returns the number of events completed by this call.
    std::uint64_t run_until(double t_end);

    bool empty() const { return queue_.empty(); }
    std::size_t pending() const { return queue_.size(); }

private:
    struct Entry {
        double time;
        std::uint64_t order;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Entry& x, const Entry& y) const {
            if (x.time != y.time) return x.time > y.time;
            return x.order > y.order;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    double now_ = 0.0;
    std::uint64_t next_order_ = 0;
};

}  // namespace mmsim

#endif  // MMSIM_EVENT_QUEUE_HPP
