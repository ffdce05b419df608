#include "relaysim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <variant>

#include "relaysim/event_queue.hpp"

namespace relaysim {

std::string_view to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::Create: return "CREATE";
        case TraceKind::Inv: return "INV";
        case TraceKind::GetData: return "GETDATA";
        case TraceKind::TxData: return "TX";
        case TraceKind::Ptx: return "PTX";
        case TraceKind::Diffuse: return "DIFFUSE";
    }
    return "?";
}

SimTime sample_link_delay(const LatencyModel& latency, Rng& rng) {
    if (latency.link_max_ms <= latency.link_min_ms) return latency.link_min_ms;
    return std::uniform_int_distribution<SimTime>(latency.link_min_ms, latency.link_max_ms)(rng);
}

SimTime sample_diffusion_delay(double mean_ms, Rng& rng) {
    if (mean_ms <= 0.0) return 0;
    const double draw = std::exponential_distribution<double>(1.0 / mean_ms)(rng);
    return static_cast<SimTime>(std::llround(draw));
}

std::vector<Transaction> generate_workload(const NetworkGraph& graph, const WorkloadSpec& spec) {
    if (spec.duration_ms == 0) throw SimError("workload duration must be positive");
    if (spec.per_node_rate < 0.0) throw SimError("workload rate must be non-negative");

    std::vector<Transaction> txs;
    if (spec.per_node_rate == 0.0) return txs;
    const double rate_per_ms = spec.per_node_rate / static_cast<double>(spec.duration_ms);
    for (NodeId node : graph.honest_nodes()) {
        Rng rng = make_rng(spec.seed, Stream::Workload, node.value);
        std::exponential_distribution<double> gap(rate_per_ms);
        double t = 0.0;
        while (true) {
            t += gap(rng);
            if (t >= static_cast<double>(spec.duration_ms)) break;
            txs.push_back(Transaction{TxId{}, node, static_cast<SimTime>(t)});
        }
    }
    std::sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.origin < b.origin;
    });
    for (size_t i = 0; i < txs.size(); ++i) txs[i].id = TxId{i};
    return txs;
}

namespace {

struct Deliver {
    NodeId to;
    Message message;
};
struct AnnounceDue {
    NodeId node;
    NodeId peer;
    TxId tx;
};
struct TimerFired {
    NodeId node;
    TxId tx;
};
struct CreateTx {
    Transaction tx;
};

using Payload = std::variant<Deliver, AnnounceDue, TimerFired, CreateTx>;

TraceKind trace_kind(MessageKind kind) {
    switch (kind) {
        case MessageKind::Inv: return TraceKind::Inv;
        case MessageKind::GetData: return TraceKind::GetData;
        case MessageKind::TxData: return TraceKind::TxData;
        case MessageKind::Ptx: return TraceKind::Ptx;
    }
    return TraceKind::Inv;
}

class Simulation final : public RelayContext {
public:
    Simulation(const NetworkGraph& graph, const ProtocolConfig& protocol, const LatencyModel& latency,
               uint64_t seed, const RunOptions& options)
        : graph_(graph), protocol_(protocol), latency_(latency), seed_(seed), options_(options),
          observer_logs_(graph.id_bound()), drops_proxy_(graph.id_bound(), false) {
        for (NodeId v : options.drop_proxy_at) drops_proxy_.at(v.value) = true;
        const uint32_t n = graph.node_count();
        states_.reserve(n);
        protocol_rngs_.reserve(n);
        observer_rngs_.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
            states_.emplace_back(NodeId{i});
            protocol_rngs_.push_back(make_rng(seed, Stream::Protocol, i));
            observer_rngs_.push_back(make_rng(seed, Stream::Observer, i));
        }
    }

    SimTrace execute(std::vector<Transaction> workload, SimTime duration) {
        auto& trace = trace_;
        trace.honest_nodes = static_cast<uint32_t>(graph_.honest_nodes().size());
        for (const auto& tx : workload) queue_.push(tx.created_at, CreateTx{tx});
        trace.transactions = std::move(workload);

        while (!queue_.empty()) {
            if (queue_.size() > options_.max_queue) {
                throw EventHorizonExceeded("event queue exceeded " + std::to_string(options_.max_queue) +
                                           " entries at t=" + std::to_string(now_));
            }
            auto entry = queue_.pop();
            now_ = entry.at;
            seq_ = entry.seq;
            ++trace.events_processed;
            std::visit([&](auto& payload) { dispatch(payload); }, entry.payload);
        }

        trace.end_time = std::max(now_, duration);
        trace.diffused_honest.assign(trace.transactions.size(), 0);
        for (const auto& state : states_) {
            if (graph_.role(state.id) != Role::Honest) continue;
            for (const auto& [tx, rec] : state.txs) {
                if (rec.phase == Phase::Diffused && tx.value < trace.diffused_honest.size()) {
                    ++trace.diffused_honest[tx.value];
                }
            }
        }
        trace.observations = merge_logs(observer_logs_);
        return std::move(trace_);
    }

    // RelayContext
    SimTime now() const override { return now_; }
    const NetworkGraph& graph() const override { return graph_; }
    uint64_t run_seed() const override { return seed_; }
    Rng& rng(NodeId node) override { return protocol_rngs_.at(node.value); }

    void send(NodeId from, NodeId to, Message message) override {
        const SimTime delay = sample_link_delay(latency_, link_rng(from, to));
        queue_.push(now_ + delay, Deliver{to, std::move(message)});
    }

    void announce(NodeId from, NodeId to, TxId tx) override {
        SimTime delay = 0;
        if (latency_.shared_inbound_delay && !graph_.has_outbound(from, to)) {
            delay = shared_inbound_delay(from, tx);
        } else {
            delay = sample_diffusion_delay(latency_.diffusion_delay_mean_ms, link_rng(from, to));
        }
        queue_.push(now_ + delay, AnnounceDue{from, to, tx});
    }

    void set_timer(NodeId node, TxId tx, SimTime at) override { queue_.push(at, TimerFired{node, tx}); }

    void diffused(NodeId node, TxId tx, DiffusionCause cause) override {
        trace_.records.push_back(TraceRecord{now_, TraceKind::Diffuse, node, node, tx, cause});
    }

private:
    // Keyed draw: independent of how many inbound peers get announced to.
    SimTime shared_inbound_delay(NodeId node, TxId tx) const {
        const uint64_t key = mix64(mix64(mix64(seed_ ^ 0x1b5a'7e11ULL) ^ node.value) ^ tx.value);
        const double u = static_cast<double>(key >> 11) * 0x1.0p-53;
        return static_cast<SimTime>(std::llround(-latency_.inbound_delay_mean_ms * std::log1p(-u)));
    }

    // Draws for links toward the supernode come from a separate stream so that
    // attaching it never perturbs honest-node randomness.
    Rng& link_rng(NodeId from, NodeId to) {
        if (graph_.role(to) == Role::Supernode) return observer_rngs_.at(from.value);
        return protocol_rngs_.at(from.value);
    }

    void dispatch(CreateTx& ev) {
        trace_.records.push_back(TraceRecord{now_, TraceKind::Create, ev.tx.origin, ev.tx.origin, ev.tx.id});
        on_create(protocol_, states_[ev.tx.origin.value], *this, ev.tx);
    }

    void dispatch(Deliver& ev) {
        const auto kind = ev.message.kind();
        const NodeId from = ev.message.sender;
        const TxId tx = ev.message.tx_id();
        if (options_.record_all_messages || kind == MessageKind::Ptx) {
            trace_.records.push_back(TraceRecord{now_, trace_kind(kind), from, ev.to, tx});
        }

        const Role to_role = graph_.role(ev.to);
        if (to_role != Role::Honest && graph_.role(from) == Role::Honest && kind != MessageKind::GetData) {
            const auto observed = kind == MessageKind::Inv   ? ObservedKind::Inv
                                  : kind == MessageKind::Ptx ? ObservedKind::Ptx
                                                             : ObservedKind::TxData;
            observer_logs_[ev.to.value].entries.push_back(Observation{now_, seq_, ev.to, from, tx, observed});
        }
        // The supernode only listens.
        if (to_role == Role::Supernode) return;
        if (kind == MessageKind::Ptx && drops_proxy_[ev.to.value]) return;
        on_message(protocol_, states_[ev.to.value], *this, ev.message);
    }

    void dispatch(AnnounceDue& ev) {
        announce_due(states_[ev.node.value], *this, ev.peer, ev.tx);
    }

    void dispatch(TimerFired& ev) {
        on_timer(protocol_, states_[ev.node.value], *this, ev.tx);
    }

    const NetworkGraph& graph_;
    const ProtocolConfig& protocol_;
    LatencyModel latency_;
    uint64_t seed_;
    RunOptions options_;

    EventQueue<Payload> queue_;
    SimTime now_ = 0;
    uint64_t seq_ = 0;
    SimTrace trace_;

    std::vector<NodeState> states_;
    std::vector<Rng> protocol_rngs_;
    std::vector<Rng> observer_rngs_;
    std::vector<ObservationLog> observer_logs_;
    std::vector<bool> drops_proxy_;
};

}  // namespace

SimTrace run(const NetworkGraph& graph, const ProtocolConfig& protocol, const LatencyModel& latency,
             const WorkloadSpec& workload, uint64_t seed, const RunOptions& options) {
    validate(protocol);
    if (latency.link_max_ms < latency.link_min_ms) throw SimError("link_max_ms below link_min_ms");
    if (latency.diffusion_delay_mean_ms < 0.0) throw SimError("negative diffusion delay mean");
    Simulation sim(graph, protocol, latency, seed, options);
    return sim.execute(generate_workload(graph, workload), workload.duration_ms);
}

void write_trace(std::ostream& out, const SimTrace& trace) {
    for (const auto& r : trace.records) {
        out << r.at << '\t' << to_string(r.kind) << '\t' << r.from.value << '\t' << r.to.value << '\t'
            << r.tx.value;
        if (r.kind == TraceKind::Diffuse) out << '\t' << to_string(r.cause);
        out << '\n';
    }
}

}  // namespace relaysim
