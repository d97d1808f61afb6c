#include "zdt/features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "zdt/errors.hpp"

namespace zdt {

namespace {

const char* const kFlowFeatureNames[kFlowFeatureCount] = {
    "duration_log1p", "src_port_scaled", "dst_port_scaled",
    "protocol",       "bytes_log1p",     "time_of_day",
};

const char* const kNodeFeatureNames[kNodeFeatureCount] = {
    "degree_centrality", "pagerank",  "clustering_coefficient",
    "betweenness",       "in_degree", "out_degree",
    "in_weight",         "out_weight", "hub",
    "authority",
};

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void fill_node_features(const NodeFeatureRow& row, double* out) {
    out[0] = row.degree_centrality;
    out[1] = row.pagerank;
    out[2] = row.clustering_coefficient;
    out[3] = row.betweenness;
    out[4] = static_cast<double>(row.in_degree);
    out[5] = static_cast<double>(row.out_degree);
    out[6] = static_cast<double>(row.in_weight);
    out[7] = static_cast<double>(row.out_weight);
    out[8] = row.hub;
    out[9] = row.authority;
}

} // namespace

FeatureSchema FeatureSchema::flow_only() {
    FeatureSchema s;
    s.mode = FeatureMode::kFlowOnly;
    for (auto name : kFlowFeatureNames) s.names.emplace_back(name);
    return s;
}

FeatureSchema FeatureSchema::flow_and_graph() {
    FeatureSchema s;
    s.mode = FeatureMode::kFlowAndGraph;
    for (auto name : kFlowFeatureNames) s.names.emplace_back(name);
    for (auto prefix : {"src_", "dst_"}) {
        for (auto name : kNodeFeatureNames) s.names.emplace_back(std::string(prefix) + name);
    }
    s.names.emplace_back("cross_community");
    return s;
}

FeatureSchema FeatureSchema::for_mode(FeatureMode mode) {
    return mode == FeatureMode::kFlowOnly ? flow_only() : flow_and_graph();
}

FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "flow_only") return FeatureMode::kFlowOnly;
    if (s == "flow_and_graph") return FeatureMode::kFlowAndGraph;
    throw ConfigError("unknown feature mode: " + s);
}

std::string feature_mode_to_string(FeatureMode mode) {
    return mode == FeatureMode::kFlowOnly ? "flow_only" : "flow_and_graph";
}

void FeatureMatrix::append_row(std::span<const double> row) {
    if (rows == 0 && cols == 0) cols = row.size();
    if (row.size() != cols) {
        throw DimensionMismatchError("appended row width " + std::to_string(row.size()) +
                                     " != matrix width " + std::to_string(cols));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& indices) const {
    FeatureMatrix out;
    out.cols = cols;
    out.column_names = column_names;
    out.values.reserve(indices.size() * cols);
    for (auto i : indices) {
        out.values.insert(out.values.end(), values.begin() + i * cols,
                          values.begin() + (i + 1) * cols);
    }
    out.rows = indices.size();
    return out;
}

FeatureMatrix concat_rows(const std::vector<const FeatureMatrix*>& parts) {
    FeatureMatrix out;
    for (const auto* p : parts) {
        if (p->rows == 0) continue;
        if (out.cols == 0) {
            out.cols = p->cols;
            out.column_names = p->column_names;
        } else if (p->cols != out.cols) {
            throw DimensionMismatchError("cannot concatenate matrices of different widths");
        }
        out.values.insert(out.values.end(), p->values.begin(), p->values.end());
        out.rows += p->rows;
    }
    return out;
}

std::array<double, kFlowFeatureCount> flow_features(const FlowRecord& r) {
    double tod = std::fmod(r.timestamp, 86400.0);
    if (tod < 0.0) tod += 86400.0;
    return {
        std::log1p(r.duration),
        static_cast<double>(r.src_port) / 65535.0,
        static_cast<double>(r.dst_port) / 65535.0,
        static_cast<double>(r.protocol),
        std::log1p(static_cast<double>(r.total_bytes)),
        tod / 86400.0,
    };
}

FeatureMatrix featurize(const FlowDataset& ds, const NodeFeatureTable& nft, FeatureMode mode) {
    const FeatureSchema schema = FeatureSchema::for_mode(mode);
    FeatureMatrix m;
    m.cols = schema.dimension();
    m.column_names = schema.names;
    m.values.reserve(ds.size() * m.cols);

    std::unordered_map<std::string, int> index;
    if (mode == FeatureMode::kFlowAndGraph) {
        index.reserve(nft.node_names.size());
        for (std::size_t i = 0; i < nft.node_names.size(); ++i) {
            index.emplace(nft.node_names[i], static_cast<int>(i));
        }
    }

    std::vector<double> row(m.cols, 0.0);
    for (const auto& r : ds.records) {
        auto ff = flow_features(r);
        std::copy(ff.begin(), ff.end(), row.begin());
        if (mode == FeatureMode::kFlowAndGraph) {
            auto src_it = index.find(r.src_ip);
            auto dst_it = index.find(r.dst_ip);
            if (src_it == index.end() || dst_it == index.end()) {
                throw UnknownNodeError("flow endpoint missing from node feature table: " +
                                       (src_it == index.end() ? r.src_ip : r.dst_ip));
            }
            const auto& src = nft.rows[src_it->second];
            const auto& dst = nft.rows[dst_it->second];
            fill_node_features(src, row.data() + kFlowFeatureCount);
            fill_node_features(dst, row.data() + kFlowFeatureCount + kNodeFeatureCount);
            row[m.cols - 1] = src.community != dst.community ? 1.0 : 0.0;
        }
        m.values.insert(m.values.end(), row.begin(), row.end());
        ++m.rows;
    }
    return m;
}

void save_feature_csv(const FeatureMatrix& m, const std::vector<AttackLabel>& labels,
                      const std::string& path) {
    if (!labels.empty() && labels.size() != m.rows) {
        throw LengthMismatchError("label count does not match feature row count");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    for (std::size_t c = 0; c < m.cols; ++c) {
        out << m.column_names[c] << ',';
    }
    out << "label\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            out << fmt_double(m.at(r, c)) << ',';
        }
        out << (labels.empty() ? "unlabeled" : labels[r].to_string()) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

LabeledFeatureFile load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("missing header in " + path);
    while (!line.empty() && line.back() == '\r') line.pop_back();

    LabeledFeatureFile out;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cols.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (cols.empty() || cols.back() != "label") {
        throw SchemaError("feature csv must end with a label column: " + path);
    }
    cols.pop_back();
    out.matrix.cols = cols.size();
    out.matrix.column_names = cols;

    std::vector<double> row(cols.size());
    while (std::getline(in, line)) {
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t field = 0;
        start = 0;
        std::string label_text;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                std::string_view f(line.data() + start, i - start);
                if (field < cols.size()) {
                    double v{};
                    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
                    if (ec != std::errc{} || p != f.data() + f.size()) {
                        throw SchemaError("bad numeric field '" + std::string(f) + "' in " + path);
                    }
                    row[field] = v;
                } else if (field == cols.size()) {
                    label_text = std::string(f);
                } else {
                    throw SchemaError("too many fields in feature row: " + line);
                }
                ++field;
                start = i + 1;
            }
        }
        if (field != cols.size() + 1) {
            throw SchemaError("wrong field count in feature row: " + line);
        }
        out.matrix.append_row(row);
        out.labels.push_back(AttackLabel::parse(label_text));
    }
    return out;
}

} // namespace zdt
