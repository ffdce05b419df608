// Reachable-node topology: outbound edge lists, roles, and the listening supernode overlay.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "relaysim/core.hpp"

namespace relaysim {

enum class Role : uint8_t { Honest, AdversaryNode, Supernode };

std::string_view to_string(Role role);

class InfeasibleTopology : public SimError {
public:
    using SimError::SimError;
};

class SupernodeAlreadyPresent : public SimError {
public:
    using SimError::SimError;
};

class GraphFormatError : public SimError {
public:
    using SimError::SimError;
};

// Immutable once built. Operations that change roles or attach the supernode
// return a modified copy.
//
// Node ids 0..node_count()-1 are reachable nodes. When attached, the supernode
// takes id node_count() and holds one inbound link into each linked node.
class NetworkGraph {
public:
    NetworkGraph() = default;
    // Throws GraphFormatError if an outbound list holds duplicates, self loops
    // or out-of-range ids.
    NetworkGraph(std::vector<std::vector<NodeId>> outbound, uint32_t inbound_cap = 117);

    uint32_t node_count() const { return static_cast<uint32_t>(outbound_.size()); }
    uint32_t inbound_cap() const { return inbound_cap_; }
    size_t edge_count() const;

    std::span<const NodeId> outbound_peers(NodeId node) const;
    // Includes the supernode when it is linked to `node`.
    std::span<const NodeId> inbound_peers(NodeId node) const;
    // Inbound peers from the reachable-node graph only (no supernode).
    std::span<const NodeId> relay_inbound_peers(NodeId node) const;

    bool has_outbound(NodeId from, NodeId to) const;
    bool connected(NodeId a, NodeId b) const;

    Role role(NodeId node) const;
    bool is_adversarial(NodeId node) const { return role(node) != Role::Honest; }
    uint32_t adversary_count() const;
    std::vector<NodeId> honest_nodes() const;

    bool has_supernode() const { return supernode_.has_value(); }
    std::optional<NodeId> supernode() const { return supernode_; }
    const std::vector<NodeId>& supernode_links() const { return supernode_links_; }
    // Total ids in use, supernode included.
    uint32_t id_bound() const { return node_count() + (has_supernode() ? 1 : 0); }

    bool operator==(const NetworkGraph&) const = default;

private:
    friend NetworkGraph place_adversary(NetworkGraph graph, uint32_t count, uint64_t seed);
    friend NetworkGraph attach_supernode(NetworkGraph graph);
    friend NetworkGraph read_graph(std::istream& in);

    void rebuild_inbound();

    uint32_t inbound_cap_ = 117;
    std::vector<std::vector<NodeId>> outbound_;
    std::vector<std::vector<NodeId>> relay_inbound_;
    std::vector<std::vector<NodeId>> inbound_;
    std::vector<Role> roles_;
    std::optional<NodeId> supernode_;
    std::vector<NodeId> supernode_links_;
};

// Each node picks `out_degree` distinct outbound peers uniformly at random,
// skipping targets whose inbound count already reached `inbound_cap`. Unless
// `allow_reciprocal` is set, a node never opens a connection to a peer that
// already holds one toward it, so every pair shares at most one connection.
NetworkGraph generate_topology(uint32_t n, uint32_t out_degree, uint32_t inbound_cap, uint64_t seed,
                               bool allow_reciprocal = false);

// Re-roles `count` distinct honest nodes, chosen uniformly, as adversarial. Edges are untouched.
NetworkGraph place_adversary(NetworkGraph graph, uint32_t count, uint64_t seed);

// Adds the supernode with one link into every honest node.
NetworkGraph attach_supernode(NetworkGraph graph);

// Direction of the connection `sender` used, seen from `receiver`.
Direction classify_direction(const NetworkGraph& graph, NodeId receiver, NodeId sender);

// Line format: `role <id> <honest|adversary|supernode>` then `edge <src> <dst>`.
// Supernode links are written as edges out of the supernode id.
void write_graph(std::ostream& out, const NetworkGraph& graph);
NetworkGraph read_graph(std::istream& in);

}  // namespace relaysim
