#include "zdt/graph_features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "zdt/errors.hpp"

namespace zdt {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::vector<double> degree_centrality(const NetworkGraph& g) {
    const int n = g.node_count();
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    for (int v = 0; v < n; ++v) {
        out[v] = static_cast<double>(g.undirected_neighbors(v).size()) / (n - 1);
    }
    return out;
}

PageRankResult pagerank(const NetworkGraph& g, double damping, double tol, int max_iter) {
    const int n = g.node_count();
    PageRankResult res;
    if (n == 0) return res;

    std::vector<double> rank(n, 1.0 / n);
    std::vector<double> next(n, 0.0);
    const double base = (1.0 - damping) / n;

    res.converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (int v = 0; v < n; ++v) {
            if (g.out_weight(v) == 0) dangling += rank[v];
        }
        std::fill(next.begin(), next.end(), base + damping * dangling / n);
        for (int u = 0; u < n; ++u) {
            const auto w_out = g.out_weight(u);
            if (w_out == 0) continue;
            const double share = damping * rank[u] / static_cast<double>(w_out);
            for (const auto& e : g.out_edges(u)) {
                next[e.to] += share * static_cast<double>(e.weight);
            }
        }
        double change = 0.0;
        for (int v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
        rank.swap(next);
        res.iterations = iter + 1;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    res.values = std::move(rank);
    return res;
}

std::vector<double> clustering_coefficient(const NetworkGraph& g) {
    const int n = g.node_count();
    std::vector<double> out(n, 0.0);
    for (int v = 0; v < n; ++v) {
        const auto& nbrs = g.undirected_neighbors(v);
        const std::size_t k = nbrs.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (g.has_undirected_edge(nbrs[i], nbrs[j])) ++links;
            }
        }
        out[v] = 2.0 * static_cast<double>(links) /
                 (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return out;
}

std::vector<double> betweenness_centrality(const NetworkGraph& g) {
    const int n = g.node_count();
    std::vector<double> bc(n, 0.0);
    if (n == 0) return bc;

    std::vector<int> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<int>> pred(n);
    std::vector<int> order; // BFS visit order
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (const auto& e : g.out_edges(v)) {
                const int w = e.to;
                if (w == v) continue; // self edge never lies on a shortest path
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int v : pred[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) bc[w] += delta[w];
        }
    }
    return bc;
}

HitsResult hits(const NetworkGraph& g, double tol, int max_iter) {
    const int n = g.node_count();
    HitsResult res;
    res.hub.assign(n, 0.0);
    res.authority.assign(n, 0.0);
    if (n == 0 || g.edge_count() == 0) return res;

    std::vector<double> hub(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> auth(n, 0.0);
    std::vector<double> new_hub(n), new_auth(n);

    auto l2_normalize = [](std::vector<double>& v) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& x : v) x /= norm;
        }
        return norm;
    };

    res.converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(new_auth.begin(), new_auth.end(), 0.0);
        for (int u = 0; u < n; ++u) {
            for (const auto& e : g.out_edges(u)) new_auth[e.to] += hub[u];
        }
        l2_normalize(new_auth);
        std::fill(new_hub.begin(), new_hub.end(), 0.0);
        for (int u = 0; u < n; ++u) {
            for (const auto& e : g.out_edges(u)) new_hub[u] += new_auth[e.to];
        }
        l2_normalize(new_hub);

        double change = 0.0;
        for (int v = 0; v < n; ++v) {
            change = std::max(change, std::abs(new_hub[v] - hub[v]));
            change = std::max(change, std::abs(new_auth[v] - auth[v]));
        }
        hub.swap(new_hub);
        auth.swap(new_auth);
        res.iterations = iter + 1;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    res.hub = std::move(hub);
    res.authority = std::move(auth);
    return res;
}

std::vector<int> label_propagation(const NetworkGraph& g, std::uint64_t seed, int max_iter) {
    const int n = g.node_count();
    std::vector<int> labels(n);
    std::iota(labels.begin(), labels.end(), 0);
    if (n == 0) return labels;

    std::mt19937_64 rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::unordered_map<int, std::int64_t> votes;

    for (int sweep = 0; sweep < max_iter; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        bool changed = false;
        for (int v : order) {
            const auto& nbrs = g.undirected_neighbors(v);
            if (nbrs.empty()) continue;
            const auto& wts = g.undirected_weights(v);
            votes.clear();
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                votes[labels[nbrs[i]]] += wts[i];
            }
            std::int64_t best_w = -1;
            int best_label = labels[v];
            for (const auto& [label, w] : votes) {
                if (w > best_w || (w == best_w && label < best_label)) {
                    best_w = w;
                    best_label = label;
                }
            }
            if (best_label != labels[v]) {
                labels[v] = best_label;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Renumber densely in node-id order so output ids are relabel-invariant.
    std::unordered_map<int, int> dense;
    for (int v = 0; v < n; ++v) {
        auto [it, inserted] = dense.emplace(labels[v], static_cast<int>(dense.size()));
        labels[v] = it->second;
    }
    return labels;
}

int NodeFeatureTable::find(const std::string& name) const {
    for (std::size_t i = 0; i < node_names.size(); ++i) {
        if (node_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

NodeFeatureTable compute_node_features(const NetworkGraph& g, const GraphFeatureConfig& cfg) {
    NodeFeatureTable t;
    const int n = g.node_count();
    t.node_names = g.node_names();
    t.rows.resize(n);
    if (n == 0) return t;

    auto dc = degree_centrality(g);
    auto pr = pagerank(g, cfg.pagerank_damping, cfg.pagerank_tol, cfg.pagerank_max_iter);
    auto cc = clustering_coefficient(g);
    auto bc = betweenness_centrality(g);
    auto ha = hits(g, cfg.hits_tol, cfg.hits_max_iter);
    auto comm = label_propagation(g, cfg.label_propagation_seed, cfg.label_propagation_max_iter);
    t.pagerank_converged = pr.converged;
    t.hits_converged = ha.converged;

    for (int v = 0; v < n; ++v) {
        auto& row = t.rows[v];
        row.degree_centrality = dc[v];
        row.pagerank = pr.values[v];
        row.clustering_coefficient = cc[v];
        row.betweenness = bc[v];
        row.in_degree = g.in_degree(v);
        row.out_degree = g.out_degree(v);
        row.in_weight = g.in_weight(v);
        row.out_weight = g.out_weight(v);
        row.hub = ha.hub[v];
        row.authority = ha.authority[v];
        row.community = comm[v];
    }
    return t;
}

const char* const kNodeFeatureCsvHeader =
    "node,degree_centrality,pagerank,clustering_coefficient,betweenness,"
    "in_degree,out_degree,in_weight,out_weight,hub,authority,community";

void save_node_features(const NodeFeatureTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << kNodeFeatureCsvHeader << '\n';
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        out << t.node_names[i] << ',' << fmt_double(r.degree_centrality) << ','
            << fmt_double(r.pagerank) << ',' << fmt_double(r.clustering_coefficient) << ','
            << fmt_double(r.betweenness) << ',' << r.in_degree << ',' << r.out_degree << ','
            << r.in_weight << ',' << r.out_weight << ',' << fmt_double(r.hub) << ','
            << fmt_double(r.authority) << ',' << r.community << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

NodeFeatureTable load_node_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open node feature file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("missing header in " + path);
    // tolerate trailing \r
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kNodeFeatureCsvHeader) {
        throw SchemaError("bad node feature header in " + path);
    }
    NodeFeatureTable t;
    while (std::getline(in, line)) {
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.emplace_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 12) {
            throw SchemaError("bad node feature row in " + path + ": " + line);
        }
        auto num = [&](const std::string& f) {
            double v{};
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || p != f.data() + f.size()) {
                throw SchemaError("bad numeric field '" + f + "' in " + path);
            }
            return v;
        };
        NodeFeatureRow r;
        r.degree_centrality = num(fields[1]);
        r.pagerank = num(fields[2]);
        r.clustering_coefficient = num(fields[3]);
        r.betweenness = num(fields[4]);
        r.in_degree = static_cast<std::int64_t>(num(fields[5]));
        r.out_degree = static_cast<std::int64_t>(num(fields[6]));
        r.in_weight = static_cast<std::int64_t>(num(fields[7]));
        r.out_weight = static_cast<std::int64_t>(num(fields[8]));
        r.hub = num(fields[9]);
        r.authority = num(fields[10]);
        r.community = static_cast<int>(num(fields[11]));
        t.node_names.push_back(fields[0]);
        t.rows.push_back(r);
    }
    return t;
}

} // namespace zdt
