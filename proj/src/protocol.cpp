#include "relaysim/protocol.hpp"

#include <algorithm>

namespace relaysim {

std::string_view protocol_name(const ProtocolConfig& config) {
    switch (config.index()) {
        case 0: return "diffusion";
        case 1: return "clover";
        default: return "dandelion";
    }
}

double protocol_parameter(const ProtocolConfig& config) {
    if (auto* c = std::get_if<CloverConfig>(&config)) return c->p;
    if (auto* d = std::get_if<DandelionConfig>(&config)) return d->q;
    return 0.0;
}

void validate(const ProtocolConfig& config) {
    if (auto* c = std::get_if<CloverConfig>(&config)) {
        if (!(c->p > 0.0 && c->p <= 1.0)) throw SimError("clover p must lie in (0, 1]");
    } else if (auto* d = std::get_if<DandelionConfig>(&config)) {
        if (!(d->q > 0.0 && d->q <= 1.0)) throw SimError("dandelion q must lie in (0, 1]");
        if (d->epoch_ms == 0) throw SimError("dandelion epoch must be positive");
    }
}

std::string_view to_string(DiffusionCause cause) {
    switch (cause) {
        case DiffusionCause::Received: return "received";
        case DiffusionCause::Created: return "created";
        case DiffusionCause::Probability: return "probability";
        case DiffusionCause::Timeout: return "timeout";
        case DiffusionCause::Duplicate: return "duplicate";
        case DiffusionCause::EmptyCandidates: return "empty";
    }
    return "?";
}

const TxRecord* NodeState::find(TxId tx) const {
    auto it = txs.find(tx);
    return it == txs.end() ? nullptr : &it->second;
}

std::optional<Phase> NodeState::phase(TxId tx) const {
    const auto* rec = find(tx);
    return rec ? rec->phase : std::nullopt;
}

size_t NodeState::confirmations(const NetworkGraph& graph, TxId tx) const {
    const auto* rec = find(tx);
    if (!rec) return 0;
    auto out = graph.outbound_peers(id);
    return static_cast<size_t>(std::count_if(rec->inv_from.begin(), rec->inv_from.end(), [&](NodeId peer) {
        return std::find(out.begin(), out.end(), peer) != out.end();
    }));
}

size_t majority_threshold(size_t outbound_count) { return outbound_count / 2 + 1; }

void on_create(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, const Transaction& tx) {
    if (node.find(tx.id)) return;
    std::visit(
        [&](const auto& cfg) {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, DiffusionConfig>) {
                diffuse(node, ctx, tx, DiffusionCause::Created);
            } else if constexpr (std::is_same_v<T, CloverConfig>) {
                clover_proxy(cfg, node, ctx, tx, ctx.graph().outbound_peers(node.id), std::nullopt);
            } else {
                dandelion_stem_forward(cfg, node, ctx, tx, node.id);
            }
        },
        config);
}

void on_message(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, const Message& message) {
    const NodeId from = message.sender;
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Inv>) {
                handle_inv(node, ctx, from, body.tx);
            } else if constexpr (std::is_same_v<T, GetData>) {
                handle_getdata(node, ctx, from, body.tx);
            } else if constexpr (std::is_same_v<T, TxData>) {
                handle_txdata(node, ctx, from, body.tx);
            } else {
                if (auto* c = std::get_if<CloverConfig>(&config)) {
                    clover_handle_ptx(*c, node, ctx, from, body.tx);
                } else if (auto* d = std::get_if<DandelionConfig>(&config)) {
                    dandelion_handle_stem(*d, node, ctx, from, body.tx);
                } else {
                    handle_txdata(node, ctx, from, body.tx);
                }
            }
        },
        message.body);
}

void on_timer(const ProtocolConfig& config, NodeState& node, RelayContext& ctx, TxId tx) {
    if (std::holds_alternative<DiffusionConfig>(config)) return;
    if (std::holds_alternative<CloverConfig>(config)) {
        clover_timeout(node, ctx, tx);
        return;
    }
    // Dandelion++ fail-safe: diffuse unless the tx was seen in the fluff phase.
    auto it = node.txs.find(tx);
    if (it == node.txs.end()) return;
    auto& rec = it->second;
    if (rec.phase != Phase::ProxyKnown || rec.deadline != ctx.now()) return;
    rec.deadline.reset();
    diffuse(node, ctx, rec.tx, DiffusionCause::Timeout);
}

}  // namespace relaysim
