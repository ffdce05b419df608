// First-spy deanonymization over the eavesdropper's merged log, and scoring
// against ground truth.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "relaysim/core.hpp"
#include "relaysim/engine.hpp"
#include "relaysim/observation.hpp"

namespace relaysim {

class MissingGroundTruth : public SimError {
public:
    using SimError::SimError;
};

struct EstimateReport {
    std::map<TxId, NodeId> guesses;
    std::map<TxId, ObservedKind> basis;  // kind of the first observation
};

// Each tx is linked to the sender of the earliest entry mentioning it,
// whatever the message kind.
EstimateReport first_spy_estimate(const ObservationLog& log);

// Distinct senders of `tx` in observation order. Debug view only.
std::vector<NodeId> deanonymization_set(const ObservationLog& log, TxId tx);

enum class ProxyDenominator : uint8_t {
    PtxObserved,  // txs whose first observation was a proxy/stem message
    AllCreated,
};

struct PrecisionReport {
    double overall = 0.0;     // correct / created; unobserved txs count as wrong
    double proxy_only = 0.0;  // correct among Ptx-basis guesses
    size_t n_tx = 0;
    size_t n_correct = 0;
    size_t n_proxy_observed = 0;
    size_t n_proxy_correct = 0;
};

PrecisionReport score(const EstimateReport& estimates, std::span<const Transaction> ground_truth,
                      ProxyDenominator denominator = ProxyDenominator::PtxObserved);

struct HopStats {
    double mean = 0.0;
    std::map<uint32_t, size_t> histogram;  // hops -> tx count
    size_t n_tx = 0;                       // txs with a diffusion event
    // First-diffusion causes; fractions are over n_tx.
    std::map<DiffusionCause, size_t> causes;

    double fraction(DiffusionCause cause) const;
};

// Hops of a tx = Ptx deliveries recorded before its first diffusion record.
HopStats measure_proxy_hops(const SimTrace& trace);

}  // namespace relaysim
