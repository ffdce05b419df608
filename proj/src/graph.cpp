#include "relaysim/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "relaysim/rng.hpp"

namespace relaysim {

namespace {

constexpr int kMaxTopologyAttempts = 64;

void check_node(const NetworkGraph& g, NodeId node) {
    if (node.value >= g.id_bound()) {
        throw SimError("node " + std::to_string(node.value) + " out of range");
    }
}

}  // namespace

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Honest: return "honest";
        case Role::AdversaryNode: return "adversary";
        case Role::Supernode: return "supernode";
    }
    return "?";
}

NetworkGraph::NetworkGraph(std::vector<std::vector<NodeId>> outbound, uint32_t inbound_cap)
    : inbound_cap_(inbound_cap), outbound_(std::move(outbound)), roles_(outbound_.size(), Role::Honest) {
    const auto n = node_count();
    for (uint32_t i = 0; i < n; ++i) {
        auto sorted = outbound_[i];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw GraphFormatError("duplicate outbound peer at node " + std::to_string(i));
        }
        for (NodeId peer : sorted) {
            if (peer.value >= n) throw GraphFormatError("outbound peer out of range at node " + std::to_string(i));
            if (peer.value == i) throw GraphFormatError("self loop at node " + std::to_string(i));
        }
    }
    rebuild_inbound();
}

void NetworkGraph::rebuild_inbound() {
    const auto n = node_count();
    relay_inbound_.assign(n, {});
    for (uint32_t i = 0; i < n; ++i) {
        for (NodeId peer : outbound_[i]) relay_inbound_[peer.value].push_back(NodeId{i});
    }
    inbound_ = relay_inbound_;
    if (supernode_) {
        for (NodeId linked : supernode_links_) inbound_[linked.value].push_back(*supernode_);
    }
}

size_t NetworkGraph::edge_count() const {
    size_t total = 0;
    for (const auto& list : outbound_) total += list.size();
    return total;
}

std::span<const NodeId> NetworkGraph::outbound_peers(NodeId node) const {
    check_node(*this, node);
    if (supernode_ && node == *supernode_) return supernode_links_;
    return outbound_[node.value];
}

std::span<const NodeId> NetworkGraph::inbound_peers(NodeId node) const {
    check_node(*this, node);
    if (supernode_ && node == *supernode_) return {};
    return inbound_[node.value];
}

std::span<const NodeId> NetworkGraph::relay_inbound_peers(NodeId node) const {
    check_node(*this, node);
    if (supernode_ && node == *supernode_) return {};
    return relay_inbound_[node.value];
}

bool NetworkGraph::has_outbound(NodeId from, NodeId to) const {
    if (from.value >= id_bound() || to.value >= id_bound()) return false;
    auto peers = outbound_peers(from);
    return std::find(peers.begin(), peers.end(), to) != peers.end();
}

bool NetworkGraph::connected(NodeId a, NodeId b) const {
    return has_outbound(a, b) || has_outbound(b, a);
}

Role NetworkGraph::role(NodeId node) const {
    check_node(*this, node);
    if (supernode_ && node == *supernode_) return Role::Supernode;
    return roles_[node.value];
}

uint32_t NetworkGraph::adversary_count() const {
    return static_cast<uint32_t>(std::count(roles_.begin(), roles_.end(), Role::AdversaryNode));
}

std::vector<NodeId> NetworkGraph::honest_nodes() const {
    std::vector<NodeId> out;
    for (uint32_t i = 0; i < node_count(); ++i) {
        if (roles_[i] == Role::Honest) out.push_back(NodeId{i});
    }
    return out;
}

NetworkGraph generate_topology(uint32_t n, uint32_t out_degree, uint32_t inbound_cap, uint64_t seed,
                               bool allow_reciprocal) {
    if (n <= out_degree) {
        throw InfeasibleTopology("need more than " + std::to_string(out_degree) + " nodes, got " +
                                 std::to_string(n));
    }
    if (!allow_reciprocal && static_cast<uint64_t>(out_degree) * 2 > n - 1) {
        throw InfeasibleTopology("one connection per pair needs at least " + std::to_string(2 * out_degree + 1) +
                                 " nodes, got " + std::to_string(n));
    }
    if (inbound_cap < out_degree) {
        throw InfeasibleTopology("inbound cap " + std::to_string(inbound_cap) + " below out degree " +
                                 std::to_string(out_degree));
    }

    for (int attempt = 0; attempt < kMaxTopologyAttempts; ++attempt) {
        Rng rng = make_rng(seed, Stream::Topology, static_cast<uint64_t>(attempt));
        std::vector<uint32_t> inbound(n, 0);
        std::vector<std::vector<NodeId>> outbound(n);
        // opened[a*n+b]: a already opened a connection to b.
        std::vector<bool> opened(static_cast<size_t>(n) * n, false);
        std::vector<NodeId> eligible;
        eligible.reserve(n);
        bool stuck = false;

        for (uint32_t node = 0; node < n && !stuck; ++node) {
            eligible.clear();
            for (uint32_t peer = 0; peer < n; ++peer) {
                if (peer == node || inbound[peer] >= inbound_cap) continue;
                if (!allow_reciprocal && opened[static_cast<size_t>(peer) * n + node]) continue;
                eligible.push_back(NodeId{peer});
            }
            if (eligible.size() < out_degree) {
                stuck = true;
                break;
            }
            // Partial Fisher-Yates: the first out_degree slots are a uniform sample.
            for (uint32_t k = 0; k < out_degree; ++k) {
                size_t j = k + uniform_index(rng, eligible.size() - k);
                std::swap(eligible[k], eligible[j]);
                ++inbound[eligible[k].value];
                opened[static_cast<size_t>(node) * n + eligible[k].value] = true;
            }
            outbound[node].assign(eligible.begin(), eligible.begin() + out_degree);
        }
        if (!stuck) return NetworkGraph(std::move(outbound), inbound_cap);
    }
    throw InfeasibleTopology("no topology satisfies the inbound cap after " +
                             std::to_string(kMaxTopologyAttempts) + " attempts");
}

NetworkGraph place_adversary(NetworkGraph graph, uint32_t count, uint64_t seed) {
    auto honest = graph.honest_nodes();
    if (count > honest.size()) {
        throw SimError("cannot place " + std::to_string(count) + " adversarial nodes among " +
                       std::to_string(honest.size()) + " honest nodes");
    }
    Rng rng = make_rng(seed, Stream::Adversary);
    for (uint32_t k = 0; k < count; ++k) {
        size_t j = k + uniform_index(rng, honest.size() - k);
        std::swap(honest[k], honest[j]);
        graph.roles_[honest[k].value] = Role::AdversaryNode;
    }
    return graph;
}

NetworkGraph attach_supernode(NetworkGraph graph) {
    if (graph.supernode_) throw SupernodeAlreadyPresent("graph already has a supernode");
    graph.supernode_ = NodeId{graph.node_count()};
    graph.supernode_links_ = graph.honest_nodes();
    graph.rebuild_inbound();
    return graph;
}

Direction classify_direction(const NetworkGraph& graph, NodeId receiver, NodeId sender) {
    if (graph.has_outbound(receiver, sender)) return Direction::Outbound;
    if (graph.has_outbound(sender, receiver)) return Direction::Inbound;
    throw NoSuchEdge("no connection between " + std::to_string(receiver.value) + " and " +
                     std::to_string(sender.value));
}

void write_graph(std::ostream& out, const NetworkGraph& graph) {
    out << "# relaysim graph v1\n";
    out << "inbound_cap " << graph.inbound_cap() << '\n';
    for (uint32_t i = 0; i < graph.id_bound(); ++i) {
        out << "role " << i << ' ' << to_string(graph.role(NodeId{i})) << '\n';
    }
    for (uint32_t i = 0; i < graph.id_bound(); ++i) {
        for (NodeId peer : graph.outbound_peers(NodeId{i})) out << "edge " << i << ' ' << peer.value << '\n';
    }
}

NetworkGraph read_graph(std::istream& in) {
    uint32_t cap = 117;
    std::vector<std::pair<uint32_t, Role>> roles;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        auto fail = [&](const std::string& why) {
            throw GraphFormatError("line " + std::to_string(line_no) + ": " + why);
        };
        if (word == "inbound_cap") {
            if (!(ls >> cap)) fail("bad inbound_cap");
        } else if (word == "role") {
            uint32_t id = 0;
            std::string name;
            if (!(ls >> id >> name)) fail("bad role line");
            if (name == "honest") {
                roles.emplace_back(id, Role::Honest);
            } else if (name == "adversary") {
                roles.emplace_back(id, Role::AdversaryNode);
            } else if (name == "supernode") {
                roles.emplace_back(id, Role::Supernode);
            } else {
                fail("unknown role '" + name + "'");
            }
        } else if (word == "edge") {
            uint32_t src = 0, dst = 0;
            if (!(ls >> src >> dst)) fail("bad edge line");
            edges.emplace_back(src, dst);
        } else {
            fail("unknown record '" + word + "'");
        }
    }

    std::optional<uint32_t> super;
    uint32_t n = 0;
    for (auto [id, role] : roles) {
        if (role == Role::Supernode) {
            if (super) throw GraphFormatError("more than one supernode");
            super = id;
        } else {
            n = std::max(n, id + 1);
        }
    }
    if (super && *super != n) throw GraphFormatError("supernode must take the id after the last reachable node");

    std::vector<std::vector<NodeId>> outbound(n);
    std::vector<NodeId> links;
    for (auto [src, dst] : edges) {
        if (super && src == *super) {
            links.push_back(NodeId{dst});
        } else if (src < n) {
            outbound[src].push_back(NodeId{dst});
        } else {
            throw GraphFormatError("edge source " + std::to_string(src) + " has no role");
        }
    }

    NetworkGraph graph(std::move(outbound), cap);
    for (auto [id, role] : roles) {
        if (role == Role::AdversaryNode) graph.roles_[id] = role;
    }
    if (super) {
        graph.supernode_ = NodeId{*super};
        graph.supernode_links_ = std::move(links);
        graph.rebuild_inbound();
    }
    return graph;
}

}  // namespace relaysim
