// Min-queue of timestamped events. Ties at the same time pop in insertion order.

#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "relaysim/core.hpp"

namespace relaysim {

template <typename Payload>
class EventQueue {
public:
    struct Entry {
        SimTime at;
        uint64_t seq;
        Payload payload;
    };

    uint64_t push(SimTime at, Payload payload) {
        const uint64_t seq = next_seq_++;
        heap_.push(Entry{at, seq, std::move(payload)});
        return seq;
    }

    bool empty() const { return heap_.empty(); }
    size_t size() const { return heap_.size(); }
    const Entry& top() const { return heap_.top(); }

    Entry pop() {
        Entry e = std::move(const_cast<Entry&>(heap_.top()));
        heap_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    uint64_t next_seq_ = 0;
};

}  // namespace relaysim
