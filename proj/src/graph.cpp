#include "zdt/graph.hpp"

#include <algorithm>
#include <cassert>

namespace zdt {

int NetworkGraph::add_or_get_node(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    ids_.emplace(name, id);
    names_.push_back(name);
    pending_.emplace_back();
    return id;
}

void NetworkGraph::add_flow_edge(int src, int dst) {
    assert(!finalized_);
    ++pending_[src][dst];
}

int NetworkGraph::find_node(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
}

void NetworkGraph::finalize() {
    assert(!finalized_);
    const int n = node_count();
    out_.assign(n, {});
    in_.assign(n, {});
    out_weight_.assign(n, 0);
    in_weight_.assign(n, 0);
    edge_count_ = 0;

    for (int u = 0; u < n; ++u) {
        auto& outs = out_[u];
        outs.reserve(pending_[u].size());
        for (const auto& [v, w] : pending_[u]) outs.push_back({v, w});
        std::sort(outs.begin(), outs.end(),
                  [](const Edge& a, const Edge& b) { return a.to < b.to; });
        edge_count_ += outs.size();
        for (const auto& e : outs) {
            out_weight_[u] += e.weight;
            in_weight_[e.to] += e.weight;
            in_[e.to].push_back({u, e.weight});
        }
    }
    for (int v = 0; v < n; ++v) {
        std::sort(in_[v].begin(), in_[v].end(),
                  [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }

    // Undirected projection, self-loops dropped.
    und_neighbors_.assign(n, {});
    und_weights_.assign(n, {});
    for (int v = 0; v < n; ++v) {
        std::vector<std::pair<int, std::int64_t>> merged;
        merged.reserve(out_[v].size() + in_[v].size());
        for (const auto& e : out_[v])
            if (e.to != v) merged.emplace_back(e.to, e.weight);
        for (const auto& e : in_[v])
            if (e.to != v) merged.emplace_back(e.to, e.weight);
        std::sort(merged.begin(), merged.end());
        auto& nbrs = und_neighbors_[v];
        auto& wts = und_weights_[v];
        for (const auto& [u, w] : merged) {
            if (!nbrs.empty() && nbrs.back() == u) {
                wts.back() += w;
            } else {
                nbrs.push_back(u);
                wts.push_back(w);
            }
        }
    }

    pending_.clear();
    pending_.shrink_to_fit();
    finalized_ = true;
}

bool NetworkGraph::has_undirected_edge(int u, int v) const {
    const auto& nbrs = und_neighbors_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

NetworkGraph build_graph(const FlowDataset& ds) {
    NetworkGraph g;
    for (const auto& r : ds.records) {
        int s = g.add_or_get_node(r.src_ip);
        int d = g.add_or_get_node(r.dst_ip);
        g.add_flow_edge(s, d);
    }
    g.finalize();
    return g;
}

} // namespace zdt
