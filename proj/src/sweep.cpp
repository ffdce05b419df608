#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <tuple>

#include "relaysim/adversary.hpp"
#include "relaysim/analytics.hpp"
#include "relaysim/experiment.hpp"

namespace relaysim {

SimTime recommended_timeout(double p, const LatencyModel& latency) {
    return static_cast<SimTime>(std::ceil(4.0 * analytics::expected_hops_geometric(p) *
                                          static_cast<double>(latency.link_max_ms)));
}

bool SweepResult::any_failed() const {
    return std::any_of(rows.begin(), rows.end(), [](const RunRow& r) { return !r.ok(); });
}

const CellAggregate* SweepResult::find(std::string_view protocol, double p, uint32_t adversary_count) const {
    for (const auto& c : aggregates) {
        if (c.protocol == protocol && std::abs(c.p - p) < 1e-9 && c.adversary_count == adversary_count) return &c;
    }
    return nullptr;
}

std::vector<RunSpec> plan_sweep(const ExperimentConfig& config) {
    std::vector<RunSpec> plan;
    for (size_t proto = 0; proto < config.protocols.size(); ++proto) {
        for (uint32_t k : config.adversary_counts) {
            for (uint64_t seed : config.seeds) plan.push_back(RunSpec{plan.size(), proto, k, seed});
        }
    }
    return plan;
}

RunRow run_one(const ExperimentConfig& config, const RunSpec& spec) {
    const auto& protocol = config.protocols.at(spec.protocol);
    RunRow row;
    row.protocol = std::string(protocol_name(protocol));
    row.p = protocol_parameter(protocol);
    row.adversary_count = spec.adversary_count;
    row.seed = spec.seed;
    row.nodes = config.n_nodes;
    row.out_degree = config.out_degree;

    try {
        const uint64_t topo_seed = config.pin_topology ? config.topology_seed : spec.seed;
        auto graph = generate_topology(config.n_nodes, config.out_degree, config.inbound_cap, topo_seed,
                                       config.allow_reciprocal);
        graph = place_adversary(std::move(graph), spec.adversary_count, spec.seed);
        if (config.supernode) graph = attach_supernode(std::move(graph));

        RunOptions options;
        options.max_queue = config.max_queue;
        options.record_all_messages = false;
        const auto trace = run(graph, protocol, config.latency,
                               WorkloadSpec{config.duration_ms, config.per_node_rate, spec.seed}, spec.seed, options);

        const auto report = score(first_spy_estimate(trace.observations), trace.transactions);
        const auto hops = measure_proxy_hops(trace);
        row.overall = report.overall;
        row.proxy_only = report.proxy_only;
        row.n_tx = report.n_tx;
        row.n_correct = report.n_correct;
        row.n_proxy_observed = report.n_proxy_observed;
        row.n_proxy_correct = report.n_proxy_correct;
        row.mean_hops = hops.mean;
        row.timeout_fraction = hops.fraction(DiffusionCause::Timeout);
        row.duplicate_fraction = hops.fraction(DiffusionCause::Duplicate);
        if (trace.honest_nodes > 0) {
            for (uint32_t count : trace.diffused_honest) {
                row.completeness = std::min(row.completeness, static_cast<double>(count) / trace.honest_nodes);
            }
        }
    } catch (const SimError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        row.status = "failed: " + msg;
    }
    // Keep only what results.csv can hold so reports rebuilt from it match.
    for (double* v : {&row.overall, &row.proxy_only, &row.mean_hops, &row.timeout_fraction,
                      &row.duplicate_fraction, &row.completeness}) {
        *v = std::stod(format_number(*v));
    }
    return row;
}

std::vector<CellAggregate> aggregate(std::span<const RunRow> rows) {
    using Key = std::tuple<std::string, double, uint32_t>;
    std::vector<CellAggregate> cells;
    std::map<Key, size_t> index;
    std::vector<std::vector<const RunRow*>> members;

    for (const auto& row : rows) {
        Key key{row.protocol, row.p, row.adversary_count};
        auto [it, inserted] = index.emplace(key, cells.size());
        if (inserted) {
            CellAggregate c;
            c.protocol = row.protocol;
            c.p = row.p;
            c.adversary_count = row.adversary_count;
            c.nodes = row.nodes;
            c.out_degree = row.out_degree;
            cells.push_back(c);
            members.emplace_back();
        }
        members[it->second].push_back(&row);
    }

    for (size_t i = 0; i < cells.size(); ++i) {
        auto& c = cells[i];
        std::vector<double> proxy;
        for (const RunRow* r : members[i]) {
            ++c.runs;
            if (!r->ok()) {
                ++c.failed;
                continue;
            }
            c.overall += r->overall;
            c.mean_hops += r->mean_hops;
            c.n_tx += static_cast<double>(r->n_tx);
            c.timeout_fraction += r->timeout_fraction;
            if (r->n_proxy_observed > 0) proxy.push_back(r->proxy_only);
        }
        const size_t ok = c.runs - c.failed;
        if (ok > 0) {
            c.overall /= ok;
            c.mean_hops /= ok;
            c.n_tx /= ok;
            c.timeout_fraction /= ok;
        }
        if (!proxy.empty()) {
            for (double v : proxy) c.proxy_only += v;
            c.proxy_only /= proxy.size();
            if (proxy.size() > 1) {
                for (double v : proxy) c.proxy_only_var += (v - c.proxy_only) * (v - c.proxy_only);
                c.proxy_only_var /= proxy.size() - 1;
            }
        }
    }
    return cells;
}

SweepResult assemble(std::vector<std::pair<size_t, RunRow>> indexed_rows) {
    std::sort(indexed_rows.begin(), indexed_rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SweepResult result;
    result.rows.reserve(indexed_rows.size());
    for (auto& [i, row] : indexed_rows) result.rows.push_back(std::move(row));
    result.aggregates = aggregate(result.rows);
    return result;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    validate(config);
    const auto plan = plan_sweep(config);
    std::vector<std::pair<size_t, RunRow>> rows(plan.size());

    unsigned jobs = config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.jobs;
    jobs = static_cast<unsigned>(std::min<size_t>(jobs, std::max<size_t>(plan.size(), 1)));

    // Cells share nothing mutable; each worker writes only its own slots.
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < plan.size(); i = next++) rows[i] = {plan[i].index, run_one(config, plan[i])};
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    return assemble(std::move(rows));
}

}  // namespace relaysim
