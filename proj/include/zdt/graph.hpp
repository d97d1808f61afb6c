#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "zdt/flow.hpp"

namespace zdt {

// Weighted directed IP interaction graph. One node per unique IP; edge weight
// counts the flows observed src->dst. Self-loops (src==dst) are kept.
// Node ids follow first-seen order over the flow corpus, which keeps every
// downstream computation independent of the IP name strings themselves.
class NetworkGraph {
public:
    struct Edge {
        int to = 0;
        std::int64_t weight = 0;
    };

    int add_or_get_node(const std::string& name);
    void add_flow_edge(int src, int dst);

    // Sorts adjacency by neighbor id and builds the undirected projection.
    // Must be called once after all edges are added.
    void finalize();

    int node_count() const { return static_cast<int>(names_.size()); }
    std::size_t edge_count() const { return edge_count_; }
    const std::string& node_name(int id) const { return names_[id]; }
    const std::vector<std::string>& node_names() const { return names_; }
    int find_node(const std::string& name) const; // -1 when absent

    const std::vector<Edge>& out_edges(int v) const { return out_[v]; }
    const std::vector<Edge>& in_edges(int v) const { return in_[v]; }

    // Distinct neighbors on the undirected projection, self excluded, sorted.
    const std::vector<int>& undirected_neighbors(int v) const { return und_neighbors_[v]; }
    // Combined weight w(u,v)+w(v,u) aligned with undirected_neighbors(v).
    const std::vector<std::int64_t>& undirected_weights(int v) const { return und_weights_[v]; }

    bool has_undirected_edge(int u, int v) const;

    std::int64_t out_weight(int v) const { return out_weight_[v]; }
    std::int64_t in_weight(int v) const { return in_weight_[v]; }
    int out_degree(int v) const { return static_cast<int>(out_[v].size()); }
    int in_degree(int v) const { return static_cast<int>(in_[v].size()); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
    std::vector<std::unordered_map<int, std::int64_t>> pending_; // src -> (dst -> weight)
    std::vector<std::vector<Edge>> out_;
    std::vector<std::vector<Edge>> in_;
    std::vector<std::vector<int>> und_neighbors_;
    std::vector<std::vector<std::int64_t>> und_weights_;
    std::vector<std::int64_t> out_weight_;
    std::vector<std::int64_t> in_weight_;
    std::size_t edge_count_ = 0;
    bool finalized_ = false;
};

NetworkGraph build_graph(const FlowDataset& ds);

} // namespace zdt
