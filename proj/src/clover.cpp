// Clover: proxy transactions follow outbound->outbound and inbound->inbound
// relays; only inbound-received ones may be diffused, with probability p.

#include <algorithm>

#include "relaysim/protocol.hpp"

namespace relaysim {

void clover_proxy(const CloverConfig& config, NodeState& node, RelayContext& ctx, const Transaction& tx,
                  std::span<const NodeId> candidates, std::optional<NodeId> sender) {
    std::vector<NodeId> eligible;
    eligible.reserve(candidates.size());
    for (NodeId c : candidates) {
        if (!sender || c != *sender) eligible.push_back(c);
    }
    if (eligible.empty()) {
        diffuse(node, ctx, tx, DiffusionCause::EmptyCandidates);
        return;
    }

    const NodeId proxy = eligible[uniform_index(ctx.rng(node.id), eligible.size())];
    auto& rec = node.txs[tx.id];
    rec.phase = Phase::ProxyKnown;
    rec.tx = tx;
    rec.deadline = ctx.now() + config.timeout_ms;
    if (std::find(rec.has_tx.begin(), rec.has_tx.end(), proxy) == rec.has_tx.end()) rec.has_tx.push_back(proxy);
    ctx.send(node.id, proxy, Message{node.id, Ptx{tx}});
    ctx.set_timer(node.id, tx.id, *rec.deadline);
}

void clover_handle_ptx(const CloverConfig& config, NodeState& node, RelayContext& ctx, NodeId from,
                       const Transaction& tx) {
    if (const auto phase = node.phase(tx.id)) {
        // Loop breaking: a proxy transaction seen twice enters the diffusing phase.
        if (*phase == Phase::ProxyKnown) diffuse(node, ctx, tx, DiffusionCause::Duplicate);
        return;
    }

    auto& rec = node.txs[tx.id];
    rec.tx = tx;
    if (std::find(rec.has_tx.begin(), rec.has_tx.end(), from) == rec.has_tx.end()) rec.has_tx.push_back(from);

    const auto& graph = ctx.graph();
    if (classify_direction(graph, node.id, from) == Direction::Outbound) {
        clover_proxy(config, node, ctx, tx, graph.outbound_peers(node.id), from);
        return;
    }
    if (uniform01(ctx.rng(node.id)) < config.p) {
        diffuse(node, ctx, tx, DiffusionCause::Probability);
    } else {
        clover_proxy(config, node, ctx, tx, graph.relay_inbound_peers(node.id), from);
    }
}

void clover_timeout(NodeState& node, RelayContext& ctx, TxId tx) {
    auto it = node.txs.find(tx);
    if (it == node.txs.end()) return;
    auto& rec = it->second;
    if (rec.phase != Phase::ProxyKnown || rec.deadline != ctx.now()) return;
    rec.deadline.reset();
    const auto& graph = ctx.graph();
    if (node.confirmations(graph, tx) < majority_threshold(graph.outbound_peers(node.id).size())) {
        diffuse(node, ctx, rec.tx, DiffusionCause::Timeout);
    }
}

}  // namespace relaysim
