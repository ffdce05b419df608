// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "relaysim/adversary.hpp"
#include "relaysim/analytics.hpp"
#include "relaysim/experiment.hpp"

using namespace relaysim;
namespace an = relaysim::analytics;

namespace {

const std::filesystem::path kRoot = RELAYSIM_SOURCE_DIR;
const std::vector<uint32_t> kLevels{1, 2, 5, 10, 20, 30};

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        detail << "  " << (cond ? "ok   " : "MISS ") << what << '\n';
        ok = ok && cond;
    }
};

std::string fmt(double v) { return format_number(v); }

// Fig. 2 sweep: Diffusion and Clover p in {0.2, 0.3, 0.4}, shared by criteria 3-5.
const SweepResult& fig2() {
    static const SweepResult result = run_sweep(load_config(kRoot / "configs/paper_fig2.ini"));
    return result;
}

bool criterion1(Check& c) {
    c.expect(an::adversarial_proxy_probability(1, 10000) == 0.0001, "P(1, 10000) = 0.0001");
    c.expect(an::adversarial_proxy_probability(1000, 10000) == 0.1, "P(1000, 10000) = 0.1");
    bool reduce = true, full = true, identity = true;
    double worst = 0.0;
    for (int pk = 1; pk <= 20; ++pk) {
        const double p = pk / 20.0;
        for (int O = 1; O <= 16; ++O) {
            reduce = reduce && an::d_proxy(p, O, 0) == p;
            full = full && an::d_proxy(p, O, O) == 1.0;
            for (int a = 0; a <= O; ++a) {
                for (double g : {1.0, 3.0, 100.0}) {
                    // Mixing set computed here, independently of the library.
                    const double m = g * (1.0 - p) / p * (O - a) / O;
                    worst = std::max(worst, std::abs(an::d_proxy(p, O, a) - g / (g + m)));
                }
            }
        }
    }
    identity = worst <= 1e-12;
    c.expect(reduce, "d_proxy(p, O, 0) = p over the grid");
    c.expect(full, "d_proxy(p, O, O) = 1 over the grid");
    c.expect(identity, "d_proxy = g/(g+|M|), max error " + fmt(worst));
    return c.ok;
}

bool criterion2(Check& c) {
    ExperimentConfig cfg = load_config(kRoot / "configs/paper_fig2.ini");
    cfg.protocols = {DiffusionConfig{}};
    cfg.adversary_counts = {1, 2, 3, 4, 5, 20, 25, 30};
    const auto r = run_sweep(cfg);
    for (const auto& cell : r.aggregates) {
        const bool low = cell.adversary_count <= 5;
        const double lo = low ? 0.45 : 0.55, hi = low ? 0.75 : 0.85;
        c.expect(cell.failed == 0 && cell.overall >= lo && cell.overall <= hi,
                 "Diffusion |S|=" + std::to_string(cell.adversary_count) + " overall " + fmt(cell.overall) +
                     " in [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    return c.ok;
}

bool criterion3(Check& c) {
    for (double p : {0.2, 0.3, 0.4}) {
        for (uint32_t s : kLevels) {
            const auto* cell = fig2().find("clover", p, s);
            const double target = an::d_overall(s, 100);
            const double tol = s <= 10 ? 0.05 : 0.08;
            c.expect(cell && cell->failed == 0 && std::abs(cell->overall - target) <= tol,
                     "Clover p=" + fmt(p) + " |S|=" + std::to_string(s) + " overall " + fmt(cell ? cell->overall : -1) +
                         " vs " + fmt(target) + " +/- " + fmt(tol));
        }
    }
    return c.ok;
}

bool criterion4(Check& c) {
    for (uint32_t s : kLevels) {
        const double a = fig2().find("clover", 0.2, s)->proxy_only;
        const double b = fig2().find("clover", 0.3, s)->proxy_only;
        const double d = fig2().find("clover", 0.4, s)->proxy_only;
        c.expect(a <= b && b <= d, "|S|=" + std::to_string(s) + " proxy precision by p: " + fmt(a) + " <= " + fmt(b) +
                                       " <= " + fmt(d));
    }
    for (uint32_t s : {1u, 2u, 5u}) {
        const double v = fig2().find("clover", 0.2, s)->proxy_only;
        c.expect(std::abs(v - 0.14) <= 0.07, "p=0.2 |S|=" + std::to_string(s) + " proxy precision " + fmt(v) +
                                                 " in 0.14 +/- 0.07");
    }
    const double v30 = fig2().find("clover", 0.2, 30)->proxy_only;
    c.expect(v30 <= 0.45, "p=0.2 |S|=30 proxy precision " + fmt(v30) + " <= 0.45");
    return c.ok;
}

bool criterion5(Check& c) {
    for (uint32_t s : kLevels) {
        const double diff = fig2().find("diffusion", 0.0, s)->overall;
        for (double p : {0.2, 0.3, 0.4}) {
            const double clo = fig2().find("clover", p, s)->overall;
            c.expect(clo < diff, "|S|=" + std::to_string(s) + " p=" + fmt(p) + " Clover " + fmt(clo) +
                                     " < Diffusion " + fmt(diff));
        }
    }
    return c.ok;
}

bool criterion6(Check& c) {
    // Mean hops and diffusion causes over three no-adversary runs.
    auto measure = [](double p) {
        HopStats total;
        double hop_sum = 0;
        for (uint64_t seed : {1, 2, 3}) {
            const auto g = generate_topology(100, 8, 117, seed);
            const auto t = run(g, CloverConfig{p, 60000}, LatencyModel{}, WorkloadSpec{600000, 3.0, seed}, seed,
                               {.record_all_messages = false});
            const auto h = measure_proxy_hops(t);
            hop_sum += h.mean * h.n_tx;
            total.n_tx += h.n_tx;
            for (auto [cause, n] : h.causes) total.causes[cause] += n;
        }
        total.mean = total.n_tx ? hop_sum / total.n_tx : 0.0;
        return total;
    };

    const auto h01 = measure(0.1);
    c.expect(h01.fraction(DiffusionCause::Timeout) < 0.05,
             "p=0.1 timeout-triggered fraction " + fmt(h01.fraction(DiffusionCause::Timeout)) + " < 0.05");
    c.detail << "  info p=0.1 mean hops " << fmt(h01.mean) << ", empirical model " << fmt(an::expected_hops_empirical(0.1))
             << ", geometric model " << fmt(an::expected_hops_geometric(0.1)) << ", over " << h01.n_tx << " txs\n";
    c.detail << "  info p=0.1 first-diffusion causes: probability " << fmt(h01.fraction(DiffusionCause::Probability))
             << ", timeout " << fmt(h01.fraction(DiffusionCause::Timeout)) << ", duplicate "
             << fmt(h01.fraction(DiffusionCause::Duplicate)) << ", empty candidates "
             << fmt(h01.fraction(DiffusionCause::EmptyCandidates)) << '\n';

    double prev = h01.mean;
    double prev_p = 0.1;
    for (double p : {0.2, 0.3, 0.4, 0.5, 1.0}) {
        const auto h = measure(p);
        c.expect(h.mean <= prev, "mean hops p=" + fmt(p) + " " + fmt(h.mean) + " <= p=" + fmt(prev_p) + " " + fmt(prev));
        if (p == 0.3 || p == 0.5) {
            const double geo = an::expected_hops_geometric(p);
            c.expect(h.n_tx >= 300 && std::abs(h.mean - geo) <= 0.15 * geo,
                     "p=" + fmt(p) + " mean hops " + fmt(h.mean) + " vs 1+2(1-p)/p = " + fmt(geo) + " +/- 15% over " +
                         std::to_string(h.n_tx) + " txs");
        }
        prev = h.mean;
        prev_p = p;
    }
    return c.ok;
}

bool criterion7(Check& c) {
    bool complete = true, silent = true, direction = true, phase = true, deterministic = true;
    for (uint64_t seed : {1, 2, 3}) {
        const auto g = attach_supernode(place_adversary(generate_topology(100, 8, 117, seed), 5, seed));
        const WorkloadSpec wl{600000, 3.0, seed};
        for (const ProtocolConfig& proto :
             {ProtocolConfig{DiffusionConfig{}}, ProtocolConfig{CloverConfig{}}, ProtocolConfig{DandelionConfig{}}}) {
            const auto t = run(g, proto, LatencyModel{}, wl, seed);
            for (uint32_t n : t.diffused_honest) complete = complete && n >= 0.99 * t.honest_nodes;

            std::ostringstream a, b;
            write_trace(a, t);
            write_trace(b, run(g, proto, LatencyModel{}, wl, seed));
            deterministic = deterministic && a.str() == b.str();

            if (!std::holds_alternative<CloverConfig>(proto)) continue;
            // Per tx: when each node first got it, first diffused, and whom it proxied to.
            const size_t n_tx = t.transactions.size();
            std::vector<std::map<uint32_t, SimTime>> got(n_tx), diffused(n_tx);
            std::vector<std::map<uint32_t, uint32_t>> got_from(n_tx);
            for (const auto& tx : t.transactions) got[tx.id.value][tx.origin.value] = tx.created_at;
            for (const auto& r : t.records) {
                const auto i = r.tx.value;
                if (r.kind == TraceKind::Diffuse) {
                    diffused[i].emplace(r.from.value, r.at);
                } else if (r.kind == TraceKind::Inv && r.from == t.transactions[i].origin) {
                    auto d = diffused[i].find(r.from.value);
                    silent = silent && d != diffused[i].end() && d->second <= r.at;
                } else if (r.kind == TraceKind::Ptx) {
                    const auto sender = r.from.value;
                    // Proxy messages leave at the moment the sender first got the tx.
                    auto d = diffused[i].find(sender);
                    if (d != diffused[i].end()) phase = phase && d->second >= got[i].at(sender);
                    if (sender != t.transactions[i].origin.value) {
                        const NodeId prev{got_from[i].at(sender)};
                        const bool out_in = classify_direction(g, r.from, prev) == Direction::Outbound;
                        direction = direction && (out_in ? g.has_outbound(r.from, r.to) : g.has_outbound(r.to, r.from));
                    } else {
                        direction = direction && g.has_outbound(r.from, r.to);
                    }
                    got[i].emplace(r.to.value, r.at);
                    got_from[i].emplace(r.to.value, sender);
                }
            }
        }
    }
    c.expect(complete, "every tx reaches >= 99% of honest nodes (Diffusion, Clover, Dandelion++)");
    c.expect(silent, "Clover creators send no INV before diffusing");
    c.expect(direction, "Clover proxy relays keep direction (out->out, in->in)");
    c.expect(phase, "no Clover proxy message after the sender diffused");
    c.expect(deterministic, "same seed gives byte-identical traces");

    double with = 0, without = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = place_adversary(generate_topology(100, 8, 117, seed), 5, seed);
        const WorkloadSpec wl{600000, 3.0, seed};
        const auto a = run(attach_supernode(g), CloverConfig{}, LatencyModel{}, wl, seed, {.record_all_messages = false});
        const auto b = run(g, CloverConfig{}, LatencyModel{}, wl, seed, {.record_all_messages = false});
        with += score(first_spy_estimate(a.observations), a.transactions).overall / 10;
        without += score(first_spy_estimate(b.observations), b.transactions).overall / 10;
    }
    c.expect(std::abs(with - without) < 0.02, "Clover |S|=5 overall with supernode " + fmt(with) + ", without " +
                                                  fmt(without) + ", |delta| < 0.02");
    return c.ok;
}

bool criterion8(Check& c) {
    const auto r = run_sweep(load_config(kRoot / "configs/paper_fig3.ini"));
    size_t proxy_wins = 0, var_wins = 0;
    for (uint32_t s : kLevels) {
        const auto* clo = r.find("clover", 0.1, s);
        const auto* dan = r.find("dandelion", 0.1, s);
        c.expect(std::abs(clo->overall - dan->overall) <= 0.05, "|S|=" + std::to_string(s) + " overall Clover " +
                                                                      fmt(clo->overall) + ", Dandelion++ " +
                                                                      fmt(dan->overall) + ", within 0.05");
        proxy_wins += dan->proxy_only >= clo->proxy_only;
        var_wins += dan->proxy_only_var > clo->proxy_only_var;
        c.detail << "  info |S|=" << s << " proxy precision Clover " << fmt(clo->proxy_only) << " (var "
                 << fmt(clo->proxy_only_var) << "), Dandelion++ " << fmt(dan->proxy_only) << " (var "
                 << fmt(dan->proxy_only_var) << ")\n";
    }
    const size_t cells = kLevels.size();
    c.expect(2 * proxy_wins > cells, "Dandelion++ proxy precision >= Clover in " + std::to_string(proxy_wins) + "/" +
                                         std::to_string(cells) + " cells");
    c.expect(2 * var_wins > cells, "Dandelion++ across-seed variance higher in " + std::to_string(var_wins) + "/" +
                                       std::to_string(cells) + " cells");
    return c.ok;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<bool(Check&)>> criteria[] = {
        {"1 analytical formulas", criterion1},
        {"2 Diffusion baseline precision", criterion2},
        {"3 Clover overall precision tracks |S|/|R|", criterion3},
        {"4 Clover proxy precision ordering", criterion4},
        {"5 Clover below Diffusion in every cell", criterion5},
        {"6 hop statistics", criterion6},
        {"7 protocol invariants", criterion7},
        {"8 Clover vs Dandelion++ at p=q=0.1", criterion8},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        bool ok = false;
        try {
            ok = fn(c);
        } catch (const std::exception& e) {
            c.detail << "  error " << e.what() << '\n';
        }
        std::cout << c.detail.str() << (ok ? "PASS" : "FAIL") << " criterion " << name << '\n' << std::flush;
        failed += ok ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
