// Deterministic discrete-event kernel. One run is single threaded and a pure
// function of (graph, protocol, latency, workload, seed).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relaysim/core.hpp"
#include "relaysim/graph.hpp"
#include "relaysim/observation.hpp"
#include "relaysim/protocol.hpp"
#include "relaysim/rng.hpp"

namespace relaysim {

struct LatencyModel {
    SimTime link_min_ms = 10;
    SimTime link_max_ms = 100;
    double diffusion_delay_mean_ms = 750.0;
    // One announcement delay per (node, tx) shared by all inbound peers, as
    // with a trickle timer; outbound peers keep individual delays.
    bool shared_inbound_delay = true;
    double inbound_delay_mean_ms = 750.0;
};

struct WorkloadSpec {
    SimTime duration_ms = 10 * kMillisPerMinute;
    double per_node_rate = 3.0;  // expected transactions per honest node over the run
    uint64_t seed = 0;
};

class EventHorizonExceeded : public SimError {
public:
    using SimError::SimError;
};

// Uniform in [link_min_ms, link_max_ms].
SimTime sample_link_delay(const LatencyModel& latency, Rng& rng);
// Exponential with the given mean, rounded to the nearest millisecond.
SimTime sample_diffusion_delay(double mean_ms, Rng& rng);

// Poisson creation times for every honest node, sorted by (time, node), ids 0..k-1.
std::vector<Transaction> generate_workload(const NetworkGraph& graph, const WorkloadSpec& spec);

enum class TraceKind : uint8_t { Create, Inv, GetData, TxData, Ptx, Diffuse };

std::string_view to_string(TraceKind kind);

// Messages are recorded at delivery. Diffuse records carry the cause.
struct TraceRecord {
    SimTime at = 0;
    TraceKind kind = TraceKind::Create;
    NodeId from;
    NodeId to;
    TxId tx;
    DiffusionCause cause = DiffusionCause::Received;

    bool operator==(const TraceRecord&) const = default;
};

struct RunOptions {
    size_t max_queue = 20'000'000;
    // When false only Create, Ptx and Diffuse records are kept.
    bool record_all_messages = true;
    // Fault injection: these nodes silently discard proxy and stem messages.
    std::vector<NodeId> drop_proxy_at;
};

struct SimTrace {
    std::vector<Transaction> transactions;
    std::vector<TraceRecord> records;
    ObservationLog observations;
    // Per transaction: honest nodes holding it in the diffusing phase at the end.
    std::vector<uint32_t> diffused_honest;
    uint32_t honest_nodes = 0;
    uint64_t events_processed = 0;
    SimTime end_time = 0;
};

SimTrace run(const NetworkGraph& graph, const ProtocolConfig& protocol, const LatencyModel& latency,
             const WorkloadSpec& workload, uint64_t seed, const RunOptions& options = {});

// Tab-separated `time kind from to tx`, plus the cause for diffusion records.
void write_trace(std::ostream& out, const SimTrace& trace);

}  // namespace relaysim
