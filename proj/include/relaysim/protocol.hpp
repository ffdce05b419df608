// Relay protocols as per-node event handlers: Diffusion, Clover and a
// Dandelion++ baseline. Handlers only touch their own NodeState and emit
// effects through a RelayContext.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "relaysim/core.hpp"
#include "relaysim/graph.hpp"
#include "relaysim/rng.hpp"

namespace relaysim {

struct DiffusionConfig {
    bool operator==(const DiffusionConfig&) const = default;
};

struct CloverConfig {
    double p = 0.2;  // chance an inbound-received proxy transaction is diffused
    SimTime timeout_ms = kMillisPerMinute;
    bool operator==(const CloverConfig&) const = default;
};

struct DandelionConfig {
    double q = 0.1;  // fluff probability per stem hop
    SimTime epoch_ms = 10 * kMillisPerMinute;
    SimTime stem_timeout_ms = kMillisPerMinute;
    bool operator==(const DandelionConfig&) const = default;
};

using ProtocolConfig = std::variant<DiffusionConfig, CloverConfig, DandelionConfig>;

std::string_view protocol_name(const ProtocolConfig& config);
// p for Clover, q for Dandelion++, 0 for Diffusion.
double protocol_parameter(const ProtocolConfig& config);
// Throws SimError when a probability is outside (0, 1].
void validate(const ProtocolConfig& config);

enum class Phase : uint8_t { ProxyKnown, Diffused };

enum class DiffusionCause : uint8_t {
    Received,         // learned through INV/GETDATA/TX
    Created,          // Diffusion protocol: creator broadcasts immediately
    Probability,      // Clover d < p, or Dandelion++ fluff coin
    Timeout,          // proxy/stem timer expired without majority confirmation
    Duplicate,        // proxy transaction came back to a node that already proxied it
    EmptyCandidates,  // no eligible proxy left after excluding the sender
};

std::string_view to_string(DiffusionCause cause);

struct TxRecord {
    std::optional<Phase> phase;
    Transaction tx;
    bool requested = false;               // GETDATA outstanding
    std::optional<SimTime> deadline;      // pending proxy timeout, only while ProxyKnown
    std::vector<NodeId> inv_from;         // peers that announced the tx to us
    std::vector<NodeId> has_tx;           // peers known to hold the tx (no INV toward them)
    std::vector<NodeId> announced_to;
};

// Dandelion++ per-epoch stem routing.
struct DandelionRoute {
    uint64_t epoch_seed = 0;
    std::vector<NodeId> successors;

    // Stable for a given (source, epoch). The node's own transactions use source == node.
    NodeId successor_for(NodeId source) const;
};

// Picks min(2, |outbound|) distinct outbound successors.
DandelionRoute dandelion_epoch(const NetworkGraph& graph, NodeId node, uint64_t epoch_seed);
uint64_t dandelion_epoch_seed(uint64_t run_seed, NodeId node, uint64_t epoch_index);

struct NodeState {
    NodeId id;
    std::unordered_map<TxId, TxRecord> txs;
    std::optional<uint64_t> route_epoch;
    DandelionRoute route;

    explicit NodeState(NodeId node) : id(node) {}

    const TxRecord* find(TxId tx) const;
    std::optional<Phase> phase(TxId tx) const;
    size_t confirmations(const NetworkGraph& graph, TxId tx) const;
};

// Effects a handler may request. The engine implements this; tests mock it.
class RelayContext {
public:
    virtual ~RelayContext() = default;

    virtual SimTime now() const = 0;
    virtual const NetworkGraph& graph() const = 0;
    virtual uint64_t run_seed() const = 0;
    // The node's own protocol stream.
    virtual Rng& rng(NodeId node) = 0;

    // Sends immediately; the engine adds link latency.
    virtual void send(NodeId from, NodeId to, Message message) = 0;
    // Queues an INV announcement after a per-peer random diffusion delay.
    // The engine calls announce_due() when it fires.
    virtual void announce(NodeId from, NodeId to, TxId tx) = 0;
    virtual void set_timer(NodeId node, TxId tx, SimTime at) = 0;
    virtual void diffused(NodeId node, TxId tx, DiffusionCause cause) = 0;
};

// Majority threshold used by the proxy timeout: floor(|out|/2) + 1.
size_t majority_threshold(size_t outbound_count);

// Dispatch entry points used by the engine.
void on_create(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, const Transaction& tx);
void on_message(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, const Message& message);
void on_timer(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, TxId tx);
void announce_due(NodeState& node, RelayContext& ctx, NodeId peer, TxId tx);

// Shared Diffusion behaviour.
void handle_inv(NodeState& node, RelayContext& ctx, NodeId from, TxId tx);
void handle_getdata(NodeState& node, RelayContext& ctx, NodeId from, TxId tx);
void handle_txdata(NodeState& node, RelayContext& ctx, NodeId from, const Transaction& tx);
void diffuse(NodeState& node, RelayContext& ctx, const Transaction& tx, DiffusionCause cause);

// Clover.
void clover_proxy(const CloverConfig& config, NodeState& node, RelayContext& ctx, const Transaction& tx,
                  std::span<const NodeId> candidates, std::optional<NodeId> sender);
void clover_handle_ptx(const CloverConfig& config, NodeState& node, RelayContext& ctx, NodeId from,
                       const Transaction& tx);
void clover_timeout(NodeState& node, RelayContext& ctx, TxId tx);

// Dandelion++.
const DandelionRoute& dandelion_route(const DandelionConfig& config, NodeState& node, RelayContext& ctx);
void dandelion_stem_forward(const DandelionConfig& config, NodeState& node, RelayContext& ctx,
                            const Transaction& tx, NodeId source);
void dandelion_handle_stem(const DandelionConfig& config, NodeState& node, RelayContext& ctx, NodeId from,
                           const Transaction& tx);

}  // namespace relaysim
