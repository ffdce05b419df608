// Three-step INV / GETDATA / TX relay with per-peer random announcement delays.

#include <algorithm>

#include "relaysim/protocol.hpp"

namespace relaysim {

namespace {

bool contains(const std::vector<NodeId>& v, NodeId id) { return std::find(v.begin(), v.end(), id) != v.end(); }

void add_unique(std::vector<NodeId>& v, NodeId id) {
    if (!contains(v, id)) v.push_back(id);
}

}  // namespace

void handle_inv(NodeState& node, RelayContext& ctx, NodeId from, TxId tx) {
    auto& rec = node.txs[tx];
    add_unique(rec.inv_from, from);
    add_unique(rec.has_tx, from);
    // A ProxyKnown node still fetches the tx: the TX upgrades it to the diffusing phase.
    if (rec.phase == Phase::Diffused || rec.requested) return;
    rec.requested = true;
    ctx.send(node.id, from, Message{node.id, GetData{tx}});
}

void handle_getdata(NodeState& node, RelayContext& ctx, NodeId from, TxId tx) {
    const auto* rec = node.find(tx);
    if (!rec || !rec->phase) return;
    ctx.send(node.id, from, Message{node.id, TxData{rec->tx}});
}

void handle_txdata(NodeState& node, RelayContext& ctx, NodeId from, const Transaction& tx) {
    auto& rec = node.txs[tx.id];
    rec.requested = false;
    add_unique(rec.has_tx, from);
    if (rec.phase == Phase::Diffused) return;
    rec.tx = tx;
    diffuse(node, ctx, tx, DiffusionCause::Received);
}

void diffuse(NodeState& node, RelayContext& ctx, const Transaction& tx, DiffusionCause cause) {
    auto& rec = node.txs[tx.id];
    if (rec.phase == Phase::Diffused) return;
    rec.phase = Phase::Diffused;
    rec.tx = tx;
    rec.deadline.reset();
    ctx.diffused(node.id, tx.id, cause);

    const auto& graph = ctx.graph();
    auto schedule = [&](NodeId peer) {
        if (contains(rec.has_tx, peer) || contains(rec.announced_to, peer)) return;
        rec.announced_to.push_back(peer);
        ctx.announce(node.id, peer, tx.id);
    };
    for (NodeId peer : graph.outbound_peers(node.id)) schedule(peer);
    for (NodeId peer : graph.inbound_peers(node.id)) schedule(peer);
}

void announce_due(NodeState& node, RelayContext& ctx, NodeId peer, TxId tx) {
    const auto* rec = node.find(tx);
    if (!rec || rec->phase != Phase::Diffused) return;
    // The peer may have announced the tx to us while the delay ran.
    if (contains(rec->has_tx, peer)) return;
    ctx.send(node.id, peer, Message{node.id, Inv{tx}});
}

}  // namespace relaysim
