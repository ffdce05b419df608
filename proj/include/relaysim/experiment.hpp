// Config-driven parameter sweeps: one simulation per (protocol, adversary
// count, seed), per-cell aggregation, and CSV / JSON / text reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaysim/engine.hpp"
#include "relaysim/protocol.hpp"

namespace relaysim {

class ConfigError : public SimError {
public:
    using SimError::SimError;
};

class ReportError : public SimError {
public:
    using SimError::SimError;
};

struct ExperimentConfig {
    std::vector<ProtocolConfig> protocols;
    uint32_t n_nodes = 100;
    uint32_t out_degree = 8;
    uint32_t inbound_cap = 117;
    bool allow_reciprocal = false;
    bool supernode = true;
    // Topology is resampled per seed unless pinned.
    bool pin_topology = false;
    uint64_t topology_seed = 1;
    std::vector<uint32_t> adversary_counts{0};
    std::vector<uint64_t> seeds{1, 2, 3};
    SimTime duration_ms = 10 * kMillisPerMinute;
    double per_node_rate = 3.0;
    LatencyModel latency;
    size_t max_queue = 20'000'000;
    unsigned jobs = 1;  // 0 = hardware concurrency
    std::filesystem::path output = "results";
};

void validate(const ExperimentConfig& config);

// INI-style file with [network], [workload], [latency], [sweep] and one
// [protocol.<label>] section per protocol in the matrix.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");

struct RunSpec {
    size_t index = 0;  // position in the plan
    size_t protocol = 0;
    uint32_t adversary_count = 0;
    uint64_t seed = 0;
};

struct RunRow {
    std::string protocol;
    double p = 0.0;
    uint32_t adversary_count = 0;
    uint64_t seed = 0;
    uint32_t nodes = 0;
    uint32_t out_degree = 0;
    double overall = 0.0;
    double proxy_only = 0.0;
    size_t n_tx = 0;
    size_t n_correct = 0;
    size_t n_proxy_observed = 0;
    size_t n_proxy_correct = 0;
    double mean_hops = 0.0;
    double timeout_fraction = 0.0;
    double duplicate_fraction = 0.0;
    // Smallest per-tx fraction of honest nodes that ended in the diffusing phase.
    double completeness = 1.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct CellAggregate {
    std::string protocol;
    double p = 0.0;
    uint32_t adversary_count = 0;
    uint32_t nodes = 0;
    uint32_t out_degree = 0;
    size_t runs = 0;
    size_t failed = 0;
    double overall = 0.0;
    // Mean over runs that observed at least one proxy transaction.
    double proxy_only = 0.0;
    double proxy_only_var = 0.0;
    double mean_hops = 0.0;
    double n_tx = 0.0;
    double timeout_fraction = 0.0;
};

struct SweepResult {
    std::vector<RunRow> rows;
    std::vector<CellAggregate> aggregates;

    bool any_failed() const;
    const CellAggregate* find(std::string_view protocol, double p, uint32_t adversary_count) const;
};

// Cell-major plan: protocol, then adversary count, then seed.
std::vector<RunSpec> plan_sweep(const ExperimentConfig& config);

// One simulation. Engine errors are caught and reported in `status`.
RunRow run_one(const ExperimentConfig& config, const RunSpec& spec);

// Orders rows by plan index and computes per-cell means.
SweepResult assemble(std::vector<std::pair<size_t, RunRow>> indexed_rows);
std::vector<CellAggregate> aggregate(std::span<const RunRow> rows);

SweepResult run_sweep(const ExperimentConfig& config);

// results.csv, aggregates.csv, theory.csv, summary.txt and sweep.json.
void emit_reports(const SweepResult& result, const std::filesystem::path& dir,
                  const ExperimentConfig* config = nullptr);

void write_results_csv(std::ostream& out, std::span<const RunRow> rows);
void write_aggregates_csv(std::ostream& out, std::span<const CellAggregate> cells);
void write_theory_csv(std::ostream& out, std::span<const CellAggregate> cells);
void write_summary(std::ostream& out, std::span<const CellAggregate> cells);

std::vector<RunRow> read_results_csv(std::istream& in);

// Rebuilds aggregates, theory and summary from an existing results.csv.
SweepResult regenerate_reports(const std::filesystem::path& dir);

// Six significant digits, as used in every CSV.
std::string format_number(double value);

// Timeout that keeps timeout-forced diffusion rare:
// 4 * expected_hops_geometric(p) * link_max_ms.
SimTime recommended_timeout(double p, const LatencyModel& latency);

}  // namespace relaysim
