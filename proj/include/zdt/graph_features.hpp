#pragma once

#include <cstdint>
#include <vector>

#include "zdt/graph.hpp"

namespace zdt {

struct PageRankResult {
    std::vector<double> values; // indexed by node id, sums to 1
    bool converged = true;
    int iterations = 0;
};

struct HitsResult {
    std::vector<double> hub;       // L2 norm 1 when the graph has edges
    std::vector<double> authority; // L2 norm 1 when the graph has edges
    bool converged = true;
    int iterations = 0;
};

// Fraction of other nodes adjacent to v on the undirected projection:
// |neighbors(v)| / (n-1); 0 for a single-node graph.
std::vector<double> degree_centrality(const NetworkGraph& g);

// Weighted PageRank: transition mass out of u is distributed proportional to
// edge weights; dangling nodes redistribute uniformly. Stops when the L1
// change drops below tol.
PageRankResult pagerank(const NetworkGraph& g, double damping = 0.85,
                        double tol = 1e-9, int max_iter = 200);

// Local clustering coefficient on the undirected, unweighted projection.
std::vector<double> clustering_coefficient(const NetworkGraph& g);

// Unnormalized shortest-path betweenness on the directed, unweighted graph
// (Brandes accumulation); path endpoints are excluded.
std::vector<double> betweenness_centrality(const NetworkGraph& g);

// Classic HITS power iteration on the unweighted adjacency, L2-normalizing
// hubs and authorities each sweep. All-zero maps when the graph has no edges.
HitsResult hits(const NetworkGraph& g, double tol = 1e-9, int max_iter = 200);

// Asynchronous label propagation on the undirected projection, edge weights
// as vote weights. Visit order is reshuffled per sweep from the seeded rng;
// ties break toward the smallest label id. Returned labels are renumbered
// densely in node-id order.
std::vector<int> label_propagation(const NetworkGraph& g, std::uint64_t seed,
                                   int max_iter = 100);

struct NodeFeatureRow {
    double degree_centrality = 0.0;
    double pagerank = 0.0;
    double clustering_coefficient = 0.0;
    double betweenness = 0.0;
    std::int64_t in_degree = 0;
    std::int64_t out_degree = 0;
    std::int64_t in_weight = 0;
    std::int64_t out_weight = 0;
    double hub = 0.0;
    double authority = 0.0;
    int community = 0;
};

// Per-node graph features, indexed by graph node id. Convergence flags from
// the iterative algorithms are carried alongside the table.
struct NodeFeatureTable {
    std::vector<std::string> node_names;
    std::vector<NodeFeatureRow> rows;
    bool pagerank_converged = true;
    bool hits_converged = true;

    int find(const std::string& name) const;
    bool empty() const { return rows.empty(); }
};

struct GraphFeatureConfig {
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-9;
    int pagerank_max_iter = 200;
    double hits_tol = 1e-9;
    int hits_max_iter = 200;
    std::uint64_t label_propagation_seed = 1;
    int label_propagation_max_iter = 100;
};

NodeFeatureTable compute_node_features(const NetworkGraph& g,
                                       const GraphFeatureConfig& cfg = {});

// NodeFeatureTable CSV round trip (one row per node, keyed by node id).
extern const char* const kNodeFeatureCsvHeader;
void save_node_features(const NodeFeatureTable& t, const std::string& path);
NodeFeatureTable load_node_features(const std::string& path);

} // namespace zdt
