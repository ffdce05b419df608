#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "relaysim/experiment.hpp"

using namespace relaysim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.protocols = {DiffusionConfig{}, CloverConfig{0.3, 60000}};
    c.n_nodes = 40;
    c.adversary_counts = {0, 4};
    c.seeds = {1, 2};
    c.duration_ms = 120000;
    return c;
}

std::string results_csv(const SweepResult& r) {
    std::ostringstream os;
    write_results_csv(os, r.rows);
    write_aggregates_csv(os, r.aggregates);
    write_theory_csv(os, r.aggregates);
    return os.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("relaysim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config file parsing", "[experiment][config]") {
    std::istringstream in(R"(
[network]
nodes = 50
out_degree = 6
supernode = false

[workload]
duration_ms = 30000
per_node_rate = 2

[latency]
link_max_ms = 80
shared_inbound_delay = false

[sweep]
adversary_counts = 1, 2 ,5
seeds = 7,8
jobs = 2

[protocol.base]
type = diffusion

[protocol.c]
type = clover
p = 0.25
timeout_ms = 5000

[protocol.d]
type = dandelion
q = 0.2
)");
    const auto c = parse_config(in);
    CHECK(c.n_nodes == 50);
    CHECK(c.out_degree == 6);
    CHECK_FALSE(c.supernode);
    CHECK(c.duration_ms == 30000);
    CHECK(c.per_node_rate == 2.0);
    CHECK(c.latency.link_max_ms == 80);
    CHECK(c.latency.link_min_ms == 10);
    CHECK_FALSE(c.latency.shared_inbound_delay);
    CHECK(c.adversary_counts == std::vector<uint32_t>{1, 2, 5});
    CHECK(c.seeds == std::vector<uint64_t>{7, 8});
    CHECK(c.jobs == 2);
    REQUIRE(c.protocols.size() == 3);
    CHECK(std::get<CloverConfig>(c.protocols[1]) == CloverConfig{0.25, 5000});
    CHECK(std::get<DandelionConfig>(c.protocols[2]).q == 0.2);
}

TEST_CASE("bad configs are rejected", "[experiment][config]") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("[network]\nnodes = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse("[protocol.x]\ntype = gossip\n"), ConfigError);
    CHECK_THROWS_AS(parse("[protocol.x]\ntype = clover\np = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nnodes = ten\n[protocol.x]\ntype = diffusion\n"), ConfigError);
    CHECK_THROWS_AS(parse("[protocol.x]\ntype = clover\np = high\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nseeds = 1, x\n[protocol.x]\ntype = diffusion\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nnodes = 10\n[sweep]\nadversary_counts = 11\n[protocol.x]\ntype = diffusion\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nseeds =\n[protocol.x]\ntype = diffusion\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/relaysim.ini"), ConfigError);
}

TEST_CASE("shipped presets load", "[experiment][config]") {
    const fs::path root = RELAYSIM_SOURCE_DIR;
    const auto fig2 = load_config(root / "configs/paper_fig2.ini");
    CHECK(plan_sweep(fig2).size() == 72);
    CHECK(fig2.adversary_counts == std::vector<uint32_t>{1, 2, 5, 10, 20, 30});
    const auto fig3 = load_config(root / "configs/paper_fig3.ini");
    REQUIRE(fig3.protocols.size() == 2);
    CHECK(protocol_parameter(fig3.protocols[0]) == 0.1);
    CHECK(protocol_parameter(fig3.protocols[1]) == 0.1);
}

TEST_CASE("plan is cell major", "[experiment]") {
    const auto plan = plan_sweep(small_config());
    REQUIRE(plan.size() == 8);
    CHECK(plan[0].protocol == 0);
    CHECK(plan[0].adversary_count == 0);
    CHECK(plan[1].seed == 2);
    CHECK(plan[2].adversary_count == 4);
    CHECK(plan[7].protocol == 1);
    for (size_t i = 0; i < plan.size(); ++i) CHECK(plan[i].index == i);

    auto one = small_config();
    one.protocols.resize(1);
    one.adversary_counts = {3};
    one.seeds = {5};
    CHECK(run_sweep(one).rows.size() == 1);
}

TEST_CASE("sweep output does not depend on execution order or thread count", "[experiment][property]") {
    const auto cfg = small_config();
    const auto plan = plan_sweep(cfg);
    const std::string reference = results_csv(run_sweep(cfg));

    std::vector<std::pair<size_t, RunRow>> rows;
    auto order = plan;
    std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
    for (const auto& spec : order) rows.emplace_back(spec.index, run_one(cfg, spec));
    CHECK(results_csv(assemble(std::move(rows))) == reference);

    auto threaded = cfg;
    threaded.jobs = 3;
    CHECK(results_csv(run_sweep(threaded)) == reference);
    CHECK(results_csv(run_sweep(cfg)) == reference);
}

TEST_CASE("aggregates are the means of their rows", "[experiment][property]") {
    const auto result = run_sweep(small_config());
    REQUIRE(result.aggregates.size() == 4);
    for (const auto& cell : result.aggregates) {
        double overall = 0, hops = 0;
        std::vector<double> proxy;
        size_t n = 0;
        for (const auto& r : result.rows) {
            if (r.protocol != cell.protocol || r.adversary_count != cell.adversary_count) continue;
            overall += r.overall;
            hops += r.mean_hops;
            if (r.n_proxy_observed > 0) proxy.push_back(r.proxy_only);
            ++n;
        }
        CHECK(cell.runs == n);
        CHECK(cell.overall == Catch::Approx(overall / n).epsilon(1e-12));
        CHECK(cell.mean_hops == Catch::Approx(hops / n).epsilon(1e-12));
        double pm = 0;
        for (double v : proxy) pm += v;
        if (!proxy.empty()) CHECK(cell.proxy_only == Catch::Approx(pm / proxy.size()).epsilon(1e-12));
    }
    CHECK(result.find("clover", 0.3, 4) != nullptr);
    CHECK(result.find("clover", 0.2, 4) == nullptr);
    CHECK_FALSE(result.any_failed());
}

TEST_CASE("engine failures mark the run without aborting the sweep", "[experiment]") {
    auto cfg = small_config();
    cfg.n_nodes = 9;
    cfg.adversary_counts = {0};
    cfg.seeds = {1};
    cfg.protocols = {DiffusionConfig{}};
    const auto result = run_sweep(cfg);
    REQUIRE(result.rows.size() == 1);
    CHECK_FALSE(result.rows[0].ok());
    CHECK(result.rows[0].status.rfind("failed:", 0) == 0);
    CHECK(result.rows[0].status.find(',') == std::string::npos);
    CHECK(result.any_failed());
    CHECK(result.aggregates.at(0).failed == 1);
}

TEST_CASE("reports are written and can be rebuilt", "[experiment][report]") {
    const auto cfg = small_config();
    const auto result = run_sweep(cfg);
    const auto dir = scratch_dir("reports");
    emit_reports(result, dir, &cfg);
    for (const char* f : {"results.csv", "aggregates.csv", "theory.csv", "summary.txt", "sweep.json"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto before_agg = slurp(dir / "aggregates.csv");
    const auto before_theory = slurp(dir / "theory.csv");
    const auto before_summary = slurp(dir / "summary.txt");
    fs::remove(dir / "aggregates.csv");
    const auto rebuilt = regenerate_reports(dir);
    CHECK(rebuilt.rows.size() == result.rows.size());
    CHECK(slurp(dir / "aggregates.csv") == before_agg);
    CHECK(slurp(dir / "theory.csv") == before_theory);
    CHECK(slurp(dir / "summary.txt") == before_summary);

    std::istringstream in(slurp(dir / "results.csv"));
    const auto rows = read_results_csv(in);
    std::ostringstream again;
    write_results_csv(again, rows);
    CHECK(again.str() == slurp(dir / "results.csv"));
    fs::remove_all(dir);
}

TEST_CASE("empty sweep writes header-only CSVs", "[experiment][report]") {
    const auto dir = scratch_dir("empty");
    emit_reports(SweepResult{}, dir);
    auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
    CHECK(lines(slurp(dir / "results.csv")) == 1);
    CHECK(lines(slurp(dir / "aggregates.csv")) == 1);
    CHECK(lines(slurp(dir / "theory.csv")) == 1);
    CHECK(slurp(dir / "results.csv").rfind("protocol,p,adversary_count,seed,", 0) == 0);
    CHECK(slurp(dir / "theory.csv") == "protocol,p,adversary_count,metric,theory,simulated,abs_error\n");
    fs::remove_all(dir);
}

TEST_CASE("IO failures name the path", "[experiment][report]") {
    const auto dir = scratch_dir("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    try {
        emit_reports(SweepResult{}, dir / "file" / "sub");
        FAIL("expected ReportError");
    } catch (const ReportError& e) {
        CHECK(std::string(e.what()).find("file") != std::string::npos);
    }
    CHECK_THROWS_AS(regenerate_reports(dir / "missing"), ReportError);
    std::istringstream bad("not,a,header\n");
    CHECK_THROWS_AS(read_results_csv(bad), ReportError);
    fs::remove_all(dir);
}

TEST_CASE("theory rows join analytics with simulated means", "[experiment][report]") {
    CellAggregate c;
    c.protocol = "clover";
    c.p = 0.2;
    c.adversary_count = 5;
    c.nodes = 100;
    c.out_degree = 8;
    c.overall = 0.06;
    c.proxy_only = 0.15;
    c.mean_hops = 7;
    std::vector<CellAggregate> cells{c};
    std::ostringstream os;
    write_theory_csv(os, cells);
    const auto text = os.str();
    CHECK(text.find("clover,0.2,5,d_overall,0.05,0.06,0.01\n") != std::string::npos);
    CHECK(text.find("clover,0.2,5,hops_geometric,9,7,2\n") != std::string::npos);
    CHECK(text.find("clover,0.2,5,hops_empirical,5.33333,7,1.66667\n") != std::string::npos);
    CHECK(text.find("d_proxy,0.208333,") != std::string::npos);
}

TEST_CASE("number formatting and timeout helper", "[experiment]") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333");
    CHECK(format_number(123456789.0) == "1.23457e+08");
    CHECK(format_number(0) == "0");
    CHECK(recommended_timeout(0.2, LatencyModel{}) == 3600);
    CHECK(recommended_timeout(1.0, LatencyModel{}) == 400);
}
