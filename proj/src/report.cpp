#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "relaysim/analytics.hpp"
#include "relaysim/experiment.hpp"

namespace relaysim {

namespace {

constexpr const char* kResultsHeader =
    "protocol,p,adversary_count,seed,nodes,out_degree,overall,proxy_only,n_tx,n_correct,n_proxy_observed,"
    "n_proxy_correct,mean_hops,timeout_fraction,duplicate_fraction,completeness,status";

constexpr const char* kAggregatesHeader =
    "protocol,p,adversary_count,runs,failed,overall,proxy_only,proxy_only_var,mean_hops,n_tx,timeout_fraction";

constexpr const char* kTheoryHeader = "protocol,p,adversary_count,metric,theory,simulated,abs_error";

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ReportError("cannot write " + path.string());
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw ReportError("write failed for " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

struct TheoryRow {
    std::string metric;
    double theory;
    double simulated;
};

std::vector<TheoryRow> theory_rows(const CellAggregate& c) {
    std::vector<TheoryRow> out;
    if (c.protocol == "diffusion" || c.nodes == 0) return out;
    const double R = c.nodes;
    const double S = c.adversary_count;
    out.push_back({"d_overall", analytics::d_overall(S, R), c.overall});
    if (c.protocol == "clover" && c.p > 0.0) {
        // Expected adversarial outbound peers of a generic node.
        const double a = c.out_degree * S / R;
        out.push_back({"d_proxy", analytics::d_proxy(c.p, c.out_degree, a), c.proxy_only});
        out.push_back({"hops_empirical", analytics::expected_hops_empirical(c.p), c.mean_hops});
        out.push_back({"hops_geometric", analytics::expected_hops_geometric(c.p), c.mean_hops});
    }
    return out;
}

nlohmann::json to_json(const ProtocolConfig& p) {
    nlohmann::json j;
    j["type"] = std::string(protocol_name(p));
    if (auto* c = std::get_if<CloverConfig>(&p)) {
        j["p"] = c->p;
        j["timeout_ms"] = c->timeout_ms;
    } else if (auto* d = std::get_if<DandelionConfig>(&p)) {
        j["q"] = d->q;
        j["epoch_ms"] = d->epoch_ms;
        j["stem_timeout_ms"] = d->stem_timeout_ms;
    }
    return j;
}

nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["nodes"] = c.n_nodes;
    j["out_degree"] = c.out_degree;
    j["inbound_cap"] = c.inbound_cap;
    j["allow_reciprocal"] = c.allow_reciprocal;
    j["supernode"] = c.supernode;
    j["pin_topology"] = c.pin_topology;
    j["adversary_counts"] = c.adversary_counts;
    j["seeds"] = c.seeds;
    j["duration_ms"] = c.duration_ms;
    j["per_node_rate"] = c.per_node_rate;
    j["latency"] = {{"link_min_ms", c.latency.link_min_ms},
                    {"link_max_ms", c.latency.link_max_ms},
                    {"diffusion_delay_mean_ms", c.latency.diffusion_delay_mean_ms},
                    {"shared_inbound_delay", c.latency.shared_inbound_delay},
                    {"inbound_delay_mean_ms", c.latency.inbound_delay_mean_ms}};
    auto& protos = j["protocols"] = nlohmann::json::array();
    for (const auto& p : c.protocols) protos.push_back(to_json(p));
    return j;
}

}  // namespace

std::string format_number(double value) {
    std::ostringstream os;
    os << std::setprecision(6) << value;
    return os.str();
}

void write_results_csv(std::ostream& out, std::span<const RunRow> rows) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << r.protocol << ',' << format_number(r.p) << ',' << r.adversary_count << ',' << r.seed << ','
            << r.nodes << ',' << r.out_degree << ',' << format_number(r.overall) << ','
            << format_number(r.proxy_only) << ',' << r.n_tx << ',' << r.n_correct << ',' << r.n_proxy_observed
            << ',' << r.n_proxy_correct << ',' << format_number(r.mean_hops) << ','
            << format_number(r.timeout_fraction) << ',' << format_number(r.duplicate_fraction) << ','
            << format_number(r.completeness) << ',' << r.status << '\n';
    }
}

void write_aggregates_csv(std::ostream& out, std::span<const CellAggregate> cells) {
    out << kAggregatesHeader << '\n';
    for (const auto& c : cells) {
        out << c.protocol << ',' << format_number(c.p) << ',' << c.adversary_count << ',' << c.runs << ','
            << c.failed << ',' << format_number(c.overall) << ',' << format_number(c.proxy_only) << ','
            << format_number(c.proxy_only_var) << ',' << format_number(c.mean_hops) << ','
            << format_number(c.n_tx) << ',' << format_number(c.timeout_fraction) << '\n';
    }
}

void write_theory_csv(std::ostream& out, std::span<const CellAggregate> cells) {
    out << kTheoryHeader << '\n';
    for (const auto& c : cells) {
        for (const auto& t : theory_rows(c)) {
            out << c.protocol << ',' << format_number(c.p) << ',' << c.adversary_count << ',' << t.metric << ','
                << format_number(t.theory) << ',' << format_number(t.simulated) << ','
                << format_number(std::abs(t.theory - t.simulated)) << '\n';
        }
    }
}

void write_summary(std::ostream& out, std::span<const CellAggregate> cells) {
    out << std::left << std::setw(10) << "protocol" << std::right << std::setw(6) << "p" << std::setw(6) << "|S|"
        << std::setw(6) << "runs" << std::setw(10) << "overall" << std::setw(10) << "theory" << std::setw(10)
        << "proxy" << std::setw(8) << "hops" << std::setw(10) << "timeout" << '\n';
    for (const auto& c : cells) {
        std::string theory = "-";
        if (c.protocol != "diffusion" && c.nodes > 0) {
            theory = format_number(analytics::d_overall(c.adversary_count, c.nodes));
        }
        out << std::left << std::setw(10) << c.protocol << std::right << std::setw(6) << format_number(c.p)
            << std::setw(6) << c.adversary_count << std::setw(6) << c.runs << std::setw(10)
            << format_number(c.overall) << std::setw(10) << theory << std::setw(10) << format_number(c.proxy_only)
            << std::setw(8) << format_number(c.mean_hops) << std::setw(10) << format_number(c.timeout_fraction);
        if (c.failed > 0) out << "  (" << c.failed << " failed)";
        out << '\n';
    }
}

std::vector<RunRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) throw ReportError("unexpected results.csv header");
    std::vector<RunRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 17) throw ReportError("results.csv line " + std::to_string(line_no) + ": expected 17 fields");
        try {
            RunRow r;
            r.protocol = f[0];
            r.p = std::stod(f[1]);
            r.adversary_count = static_cast<uint32_t>(std::stoul(f[2]));
            r.seed = std::stoull(f[3]);
            r.nodes = static_cast<uint32_t>(std::stoul(f[4]));
            r.out_degree = static_cast<uint32_t>(std::stoul(f[5]));
            r.overall = std::stod(f[6]);
            r.proxy_only = std::stod(f[7]);
            r.n_tx = std::stoull(f[8]);
            r.n_correct = std::stoull(f[9]);
            r.n_proxy_observed = std::stoull(f[10]);
            r.n_proxy_correct = std::stoull(f[11]);
            r.mean_hops = std::stod(f[12]);
            r.timeout_fraction = std::stod(f[13]);
            r.duplicate_fraction = std::stod(f[14]);
            r.completeness = std::stod(f[15]);
            r.status = f[16];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ReportError("results.csv line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

void emit_reports(const SweepResult& result, const std::filesystem::path& dir, const ExperimentConfig* config) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ReportError("cannot create " + dir.string() + ": " + ec.message());

    auto write = [&](const char* name, auto&& fn) {
        const auto path = dir / name;
        auto out = open_out(path);
        fn(out);
        check_written(out, path);
    };
    write("results.csv", [&](std::ostream& o) { write_results_csv(o, result.rows); });
    write("aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(o, result.aggregates); });
    write("theory.csv", [&](std::ostream& o) { write_theory_csv(o, result.aggregates); });
    write("summary.txt", [&](std::ostream& o) { write_summary(o, result.aggregates); });
    write("sweep.json", [&](std::ostream& o) {
        nlohmann::json j;
        if (config) j["config"] = config_json(*config);
        auto& rows = j["rows"] = nlohmann::json::array();
        for (const auto& r : result.rows) {
            rows.push_back({{"protocol", r.protocol},
                            {"p", r.p},
                            {"adversary_count", r.adversary_count},
                            {"seed", r.seed},
                            {"overall", r.overall},
                            {"proxy_only", r.proxy_only},
                            {"n_tx", r.n_tx},
                            {"n_proxy_observed", r.n_proxy_observed},
                            {"mean_hops", r.mean_hops},
                            {"timeout_fraction", r.timeout_fraction},
                            {"status", r.status}});
        }
        auto& cells = j["aggregates"] = nlohmann::json::array();
        for (const auto& c : result.aggregates) {
            cells.push_back({{"protocol", c.protocol},
                             {"p", c.p},
                             {"adversary_count", c.adversary_count},
                             {"runs", c.runs},
                             {"failed", c.failed},
                             {"overall", c.overall},
                             {"proxy_only", c.proxy_only},
                             {"proxy_only_var", c.proxy_only_var},
                             {"mean_hops", c.mean_hops}});
        }
        o << j.dump(2) << '\n';
    });
}

SweepResult regenerate_reports(const std::filesystem::path& dir) {
    const auto path = dir / "results.csv";
    std::ifstream in(path);
    if (!in) throw ReportError("cannot read " + path.string());
    SweepResult result;
    result.rows = read_results_csv(in);
    result.aggregates = aggregate(result.rows);

    auto write = [&](const char* name, auto&& fn) {
        const auto out_path = dir / name;
        auto out = open_out(out_path);
        fn(out);
        check_written(out, out_path);
    };
    write("aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(o, result.aggregates); });
    write("theory.csv", [&](std::ostream& o) { write_theory_csv(o, result.aggregates); });
    write("summary.txt", [&](std::ostream& o) { write_summary(o, result.aggregates); });
    return result;
}

}  // namespace relaysim
