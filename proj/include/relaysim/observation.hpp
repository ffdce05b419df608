// What the eavesdropper records: one entry per message an adversarial entity
// received from an honest sender.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "relaysim/core.hpp"

namespace relaysim {

enum class ObservedKind : uint8_t { Inv, Ptx, TxData };

std::string_view to_string(ObservedKind kind);

struct Observation {
    SimTime at = 0;
    uint64_t seq = 0;  // engine event sequence; breaks ties at equal `at`
    NodeId observer;
    NodeId sender;
    TxId tx;
    ObservedKind kind = ObservedKind::Inv;

    bool operator==(const Observation&) const = default;
};

struct ObservationLog {
    std::vector<Observation> entries;
};

// Stable k-way merge of individually time-sorted logs into (at, seq) order.
ObservationLog merge_logs(std::span<const ObservationLog> logs);

}  // namespace relaysim
