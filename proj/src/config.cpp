#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

#include "relaysim/experiment.hpp"

namespace relaysim {

namespace pt = boost::property_tree;

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        std::istringstream is(item.substr(first));
        T value{};
        if (!(is >> value)) throw ConfigError("bad list entry '" + item + "' in " + key);
        out.push_back(value);
    }
    return out;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& path, T& target) {
    // get_optional<T> hides conversion failures, so convert the child explicitly.
    if (auto child = tree.get_child_optional(pt::ptree::path_type(path, '/'))) target = child->get_value<T>();
}

ProtocolConfig parse_protocol(const std::string& label, const pt::ptree& section) {
    const auto type = section.get<std::string>("type", "");
    if (type == "diffusion") return DiffusionConfig{};
    if (type == "clover") {
        CloverConfig c;
        read(section, "p", c.p);
        read(section, "timeout_ms", c.timeout_ms);
        return c;
    }
    if (type == "dandelion") {
        DandelionConfig d;
        read(section, "q", d.q);
        read(section, "epoch_ms", d.epoch_ms);
        read(section, "stem_timeout_ms", d.stem_timeout_ms);
        return d;
    }
    throw ConfigError("section [" + label + "]: unknown protocol type '" + type + "'");
}

}  // namespace

void validate(const ExperimentConfig& config) {
    if (config.seeds.empty()) throw ConfigError("at least one seed is required");
    if (config.duration_ms == 0) throw ConfigError("duration_ms must be positive");
    if (config.per_node_rate < 0.0) throw ConfigError("per_node_rate must be non-negative");
    for (uint32_t k : config.adversary_counts) {
        if (k > config.n_nodes) {
            throw ConfigError("adversary count " + std::to_string(k) + " exceeds " +
                              std::to_string(config.n_nodes) + " nodes");
        }
    }
    for (const auto& p : config.protocols) {
        try {
            validate(p);
        } catch (const SimError& e) {
            throw ConfigError(e.what());
        }
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    ExperimentConfig c;
    try {
        read(tree, "network/nodes", c.n_nodes);
        read(tree, "network/out_degree", c.out_degree);
        read(tree, "network/inbound_cap", c.inbound_cap);
        read(tree, "network/allow_reciprocal", c.allow_reciprocal);
        read(tree, "network/supernode", c.supernode);
        read(tree, "network/pin_topology", c.pin_topology);
        read(tree, "network/topology_seed", c.topology_seed);

        read(tree, "workload/duration_ms", c.duration_ms);
        read(tree, "workload/per_node_rate", c.per_node_rate);

        read(tree, "latency/link_min_ms", c.latency.link_min_ms);
        read(tree, "latency/link_max_ms", c.latency.link_max_ms);
        read(tree, "latency/diffusion_delay_mean_ms", c.latency.diffusion_delay_mean_ms);
        read(tree, "latency/shared_inbound_delay", c.latency.shared_inbound_delay);
        read(tree, "latency/inbound_delay_mean_ms", c.latency.inbound_delay_mean_ms);

        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type("sweep/adversary_counts", '/'))) {
            c.adversary_counts = parse_list<uint32_t>(*v, "adversary_counts");
        }
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type("sweep/seeds", '/'))) {
            c.seeds = parse_list<uint64_t>(*v, "seeds");
        }
        read(tree, "sweep/jobs", c.jobs);
        read(tree, "sweep/max_queue", c.max_queue);
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type("sweep/output", '/'))) c.output = *v;
    } catch (const pt::ptree_bad_data& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    for (const auto& [key, section] : tree) {
        if (key.rfind("protocol.", 0) != 0) continue;
        try {
            c.protocols.push_back(parse_protocol(key, section));
        } catch (const pt::ptree_bad_data& e) {
            throw ConfigError(origin + ": [" + key + "]: " + e.what());
        }
    }
    if (c.protocols.empty()) throw ConfigError(origin + ": no [protocol.<label>] section");
    try {
        validate(c);
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.string());
}

}  // namespace relaysim
