#include <CLI11.hpp>
#include <iostream>

#include "relaysim/analytics.hpp"
#include "relaysim/experiment.hpp"

using namespace relaysim;

namespace {

struct SimulateArgs {
    std::string config;
    std::string protocol;
    std::optional<uint32_t> nodes;
    std::optional<uint32_t> adversary_count;
    std::optional<double> p;
    std::vector<uint64_t> seeds;
    std::optional<SimTime> duration_ms;
    std::optional<unsigned> jobs;
    std::string out;
};

// Narrows the protocol matrix to one label and applies --p to it.
void apply_overrides(ExperimentConfig& cfg, const SimulateArgs& a) {
    if (!a.protocol.empty()) {
        std::vector<ProtocolConfig> kept;
        for (const auto& p : cfg.protocols) {
            if (protocol_name(p) == a.protocol) kept.push_back(p);
        }
        if (kept.empty()) throw ConfigError("no protocol named '" + a.protocol + "' in the config");
        cfg.protocols = std::move(kept);
    }
    if (a.p) {
        for (auto& p : cfg.protocols) {
            if (auto* c = std::get_if<CloverConfig>(&p)) c->p = *a.p;
            if (auto* d = std::get_if<DandelionConfig>(&p)) d->q = *a.p;
        }
    }
    if (a.nodes) cfg.n_nodes = *a.nodes;
    if (a.adversary_count) cfg.adversary_counts = {*a.adversary_count};
    if (!a.seeds.empty()) cfg.seeds = a.seeds;
    if (a.duration_ms) cfg.duration_ms = *a.duration_ms;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (!a.out.empty()) cfg.output = a.out;
    validate(cfg);
}

int simulate(const SimulateArgs& args) {
    auto cfg = load_config(args.config);
    apply_overrides(cfg, args);
    const auto result = run_sweep(cfg);
    emit_reports(result, cfg.output, &cfg);
    write_summary(std::cout, result.aggregates);
    std::cout << "wrote " << result.rows.size() << " runs to " << cfg.output.string() << '\n';
    if (result.any_failed()) {
        for (const auto& r : result.rows) {
            if (!r.ok()) std::cerr << r.protocol << " S=" << r.adversary_count << " seed=" << r.seed << ": " << r.status << '\n';
        }
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relaysim: transaction relay privacy simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a parameter sweep from a config file");
    simulate_cmd->add_option("--config", sim.config, "INI config file")->required()->check(CLI::ExistingFile);
    simulate_cmd->add_option("--protocol", sim.protocol, "Keep only this protocol (diffusion, clover, dandelion)");
    simulate_cmd->add_option("--nodes", sim.nodes, "Number of nodes");
    simulate_cmd->add_option("--adversary-count", sim.adversary_count, "Single adversary count");
    simulate_cmd->add_option("--p", sim.p, "Clover p / Dandelion q");
    simulate_cmd->add_option("--seeds", sim.seeds, "Comma separated run seeds")->delimiter(',');
    simulate_cmd->add_option("--duration-ms", sim.duration_ms, "Workload duration in ms");
    simulate_cmd->add_option("--jobs", sim.jobs, "Worker threads, 0 for all cores");
    simulate_cmd->add_option("--out", sim.out, "Output directory");

    double p = 0.2, O = 8, a = 0, S = 0, R = 100, g = 1;
    auto* theory_cmd = app.add_subcommand("theory", "Print the analytical predictions");
    theory_cmd->add_option("--p", p, "Proxy probability")->required();
    theory_cmd->add_option("--O", O, "Outbound degree");
    theory_cmd->add_option("--a", a, "Adversarial outbound peers");
    theory_cmd->add_option("--S", S, "Adversarial nodes");
    theory_cmd->add_option("--R", R, "Total nodes");
    theory_cmd->add_option("--g", g, "Per-node transaction rate");

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "Rebuild reports from results.csv");
    report_cmd->add_option("--in", report_dir, "Directory holding results.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate_cmd) return simulate(sim);
        if (*theory_cmd) {
            const auto flows = analytics::flow_rates(g, p, O);
            std::cout << "adversarial_proxy_probability " << format_number(analytics::adversarial_proxy_probability(S, R)) << '\n'
                      << "d_overall " << format_number(analytics::d_overall(S, R)) << '\n'
                      << "d_proxy " << format_number(analytics::d_proxy(p, O, a)) << '\n'
                      << "mixing_set_size " << format_number(analytics::mixing_set_size(g, p, O, a)) << '\n'
                      << "sigma_O " << format_number(flows.sigma_O) << '\n'
                      << "rho_O " << format_number(flows.rho_O) << '\n'
                      << "sigma_I " << format_number(flows.sigma_I) << '\n'
                      << "rho_I " << format_number(flows.rho_I) << '\n'
                      << "hops_empirical " << format_number(analytics::expected_hops_empirical(p)) << '\n'
                      << "hops_geometric " << format_number(analytics::expected_hops_geometric(p)) << '\n';
            return 0;
        }
        if (*report_cmd) {
            const auto result = regenerate_reports(report_dir);
            write_summary(std::cout, result.aggregates);
            return result.any_failed() ? 2 : 0;
        }
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
