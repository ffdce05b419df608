// Dandelion++ baseline: per-epoch pair of outbound stem successors, fluff coin q
// at every stem hop, fail-safe timer.

#include <algorithm>

#include "relaysim/protocol.hpp"

namespace relaysim {

NodeId DandelionRoute::successor_for(NodeId source) const {
    if (successors.empty()) throw SimError("dandelion route has no successors");
    const uint64_t key = mix64(epoch_seed ^ mix64(static_cast<uint64_t>(source.value) + 1));
    return successors[key % successors.size()];
}

uint64_t dandelion_epoch_seed(uint64_t run_seed, NodeId node, uint64_t epoch_index) {
    return mix64(mix64(mix64(run_seed) ^ node.value) ^ epoch_index);
}

DandelionRoute dandelion_epoch(const NetworkGraph& graph, NodeId node, uint64_t epoch_seed) {
    auto out = graph.outbound_peers(node);
    std::vector<NodeId> pool(out.begin(), out.end());
    Rng rng = make_rng(epoch_seed, Stream::Dandelion);
    const size_t k = std::min<size_t>(2, pool.size());
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return DandelionRoute{epoch_seed, std::move(pool)};
}

const DandelionRoute& dandelion_route(const DandelionConfig& config, NodeState& node, RelayContext& ctx) {
    const uint64_t epoch = ctx.now() / config.epoch_ms;
    if (node.route_epoch != epoch) {
        node.route = dandelion_epoch(ctx.graph(), node.id, dandelion_epoch_seed(ctx.run_seed(), node.id, epoch));
        node.route_epoch = epoch;
    }
    return node.route;
}

void dandelion_stem_forward(const DandelionConfig& config, NodeState& node, RelayContext& ctx,
                            const Transaction& tx, NodeId source) {
    const auto& route = dandelion_route(config, node, ctx);
    if (route.successors.empty()) {
        diffuse(node, ctx, tx, DiffusionCause::EmptyCandidates);
        return;
    }
    const NodeId next = route.successor_for(source);
    auto& rec = node.txs[tx.id];
    rec.phase = Phase::ProxyKnown;
    rec.tx = tx;
    rec.deadline = ctx.now() + config.stem_timeout_ms;
    ctx.send(node.id, next, Message{node.id, Ptx{tx}});
    ctx.set_timer(node.id, tx.id, *rec.deadline);
}

void dandelion_handle_stem(const DandelionConfig& config, NodeState& node, RelayContext& ctx, NodeId from,
                           const Transaction& tx) {
    if (const auto phase = node.phase(tx.id)) {
        if (*phase == Phase::ProxyKnown) diffuse(node, ctx, tx, DiffusionCause::Duplicate);
        return;
    }
    auto& rec = node.txs[tx.id];
    rec.tx = tx;
    if (std::find(rec.has_tx.begin(), rec.has_tx.end(), from) == rec.has_tx.end()) rec.has_tx.push_back(from);
    if (uniform01(ctx.rng(node.id)) < config.q) {
        diffuse(node, ctx, tx, DiffusionCause::Probability);
    } else {
        dandelion_stem_forward(config, node, ctx, tx, from);
    }
}

}  // namespace relaysim
