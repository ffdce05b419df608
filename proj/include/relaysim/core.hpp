// Shared vocabulary: node identity, virtual time, transactions and relay messages.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace relaysim {

struct NodeId {
    uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(uint32_t v) : value(v) {}

    constexpr auto operator<=>(const NodeId&) const = default;
};

// Milliseconds of simulated time.
using SimTime = uint64_t;

constexpr SimTime kMillisPerMinute = 60'000;

struct TxId {
    uint64_t value = 0;

    constexpr TxId() = default;
    constexpr explicit TxId(uint64_t v) : value(v) {}

    constexpr auto operator<=>(const TxId&) const = default;
};

// `origin` is ground truth. Relay handlers never read it; only scoring does.
struct Transaction {
    TxId id;
    NodeId origin;
    SimTime created_at = 0;

    bool operator==(const Transaction&) const = default;
};

struct Inv {
    TxId tx;
};
struct GetData {
    TxId tx;
};
struct TxData {
    Transaction tx;
};
// Proxy transaction. Same payload as TxData; marks the proxying (or stem) phase.
struct Ptx {
    Transaction tx;
};

enum class MessageKind : uint8_t { Inv, GetData, TxData, Ptx };

struct Message {
    NodeId sender;
    std::variant<Inv, GetData, TxData, Ptx> body;

    MessageKind kind() const { return static_cast<MessageKind>(body.index()); }
    TxId tx_id() const;
};

enum class Direction : uint8_t { Outbound, Inbound };

std::string_view to_string(MessageKind kind);
std::string_view to_string(Direction dir);

// Base for all domain errors so callers can catch one type.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoSuchEdge : public SimError {
public:
    using SimError::SimError;
};

}  // namespace relaysim

template <>
struct std::hash<relaysim::NodeId> {
    size_t operator()(relaysim::NodeId id) const noexcept { return std::hash<uint32_t>{}(id.value); }
};

template <>
struct std::hash<relaysim::TxId> {
    size_t operator()(relaysim::TxId id) const noexcept { return std::hash<uint64_t>{}(id.value); }
};
