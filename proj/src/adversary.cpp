#include "relaysim/adversary.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace relaysim {

std::string_view to_string(ObservedKind kind) {
    switch (kind) {
        case ObservedKind::Inv: return "INV";
        case ObservedKind::Ptx: return "PTX";
        case ObservedKind::TxData: return "TX";
    }
    return "?";
}

ObservationLog merge_logs(std::span<const ObservationLog> logs) {
    struct Cursor {
        size_t log;
        size_t pos;
    };
    auto later = [&](const Cursor& a, const Cursor& b) {
        const auto& x = logs[a.log].entries[a.pos];
        const auto& y = logs[b.log].entries[b.pos];
        if (x.at != y.at) return x.at > y.at;
        if (x.seq != y.seq) return x.seq > y.seq;
        return a.log > b.log;
    };
    std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
    size_t total = 0;
    for (size_t i = 0; i < logs.size(); ++i) {
        total += logs[i].entries.size();
        if (!logs[i].entries.empty()) heap.push({i, 0});
    }

    ObservationLog merged;
    merged.entries.reserve(total);
    while (!heap.empty()) {
        auto c = heap.top();
        heap.pop();
        merged.entries.push_back(logs[c.log].entries[c.pos]);
        if (++c.pos < logs[c.log].entries.size()) heap.push(c);
    }
    return merged;
}

EstimateReport first_spy_estimate(const ObservationLog& log) {
    EstimateReport report;
    for (const auto& e : log.entries) {
        if (report.guesses.emplace(e.tx, e.sender).second) report.basis.emplace(e.tx, e.kind);
    }
    return report;
}

std::vector<NodeId> deanonymization_set(const ObservationLog& log, TxId tx) {
    std::vector<NodeId> senders;
    for (const auto& e : log.entries) {
        if (e.tx == tx && std::find(senders.begin(), senders.end(), e.sender) == senders.end()) {
            senders.push_back(e.sender);
        }
    }
    return senders;
}

PrecisionReport score(const EstimateReport& estimates, std::span<const Transaction> ground_truth,
                      ProxyDenominator denominator) {
    std::unordered_map<TxId, NodeId> origin;
    origin.reserve(ground_truth.size());
    for (const auto& tx : ground_truth) origin.emplace(tx.id, tx.origin);

    PrecisionReport r;
    r.n_tx = ground_truth.size();
    for (const auto& [tx, guess] : estimates.guesses) {
        auto it = origin.find(tx);
        if (it == origin.end()) {
            throw MissingGroundTruth("no ground truth for tx " + std::to_string(tx.value));
        }
        const bool correct = it->second == guess;
        r.n_correct += correct ? 1 : 0;
        auto basis = estimates.basis.find(tx);
        if (basis != estimates.basis.end() && basis->second == ObservedKind::Ptx) {
            ++r.n_proxy_observed;
            r.n_proxy_correct += correct ? 1 : 0;
        }
    }
    if (r.n_tx > 0) r.overall = static_cast<double>(r.n_correct) / static_cast<double>(r.n_tx);
    const size_t proxy_den = denominator == ProxyDenominator::PtxObserved ? r.n_proxy_observed : r.n_tx;
    if (proxy_den > 0) r.proxy_only = static_cast<double>(r.n_proxy_correct) / static_cast<double>(proxy_den);
    return r;
}

double HopStats::fraction(DiffusionCause cause) const {
    auto it = causes.find(cause);
    if (it == causes.end() || n_tx == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(n_tx);
}

HopStats measure_proxy_hops(const SimTrace& trace) {
    const size_t n = trace.transactions.size();
    std::vector<uint32_t> hops(n, 0);
    std::vector<bool> done(n, false);
    HopStats stats;
    for (const auto& r : trace.records) {
        if (r.tx.value >= n || done[r.tx.value]) continue;
        if (r.kind == TraceKind::Ptx) {
            ++hops[r.tx.value];
        } else if (r.kind == TraceKind::Diffuse) {
            done[r.tx.value] = true;
            ++stats.causes[r.cause];
        }
    }
    uint64_t total = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!done[i]) continue;
        ++stats.n_tx;
        ++stats.histogram[hops[i]];
        total += hops[i];
    }
    if (stats.n_tx > 0) stats.mean = static_cast<double>(total) / static_cast<double>(stats.n_tx);
    return stats;
}

}  // namespace relaysim
