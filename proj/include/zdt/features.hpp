#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zdt/flow.hpp"
#include "zdt/graph_features.hpp"

namespace zdt {

enum class FeatureMode { kFlowOnly, kFlowAndGraph };

constexpr std::size_t kFlowFeatureCount = 6;
constexpr std::size_t kNodeFeatureCount = 10; // NodeFeatureRow numerics, community excluded
constexpr std::size_t kFullFeatureCount = kFlowFeatureCount + 2 * kNodeFeatureCount + 1;

// Names each feature position; the single source of truth for vector layout.
struct FeatureSchema {
    FeatureMode mode = FeatureMode::kFlowAndGraph;
    std::vector<std::string> names;

    static FeatureSchema flow_only();
    static FeatureSchema flow_and_graph();
    static FeatureSchema for_mode(FeatureMode mode);

    std::size_t dimension() const { return names.size(); }
};

FeatureMode feature_mode_from_string(const std::string& s);
std::string feature_mode_to_string(FeatureMode mode);

// Row-major dense matrix with named columns.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> column_names;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols, cols};
    }
    void append_row(std::span<const double> row);
    FeatureMatrix select_rows(const std::vector<std::size_t>& indices) const;
};

// Concatenates row blocks; all inputs must share the column layout.
FeatureMatrix concat_rows(const std::vector<const FeatureMatrix*>& parts);

// The 6 flow-level features: log1p(duration), src_port/65535, dst_port/65535,
// protocol code, log1p(total_bytes), time-of-day fraction. IP strings never
// enter the vector.
std::array<double, kFlowFeatureCount> flow_features(const FlowRecord& r);

// One feature vector per flow, in dataset order. Graph mode appends the 10
// numeric node features for src then dst, plus the cross-community flag.
// Throws UnknownNodeError when an IP is missing from the table.
FeatureMatrix featurize(const FlowDataset& ds, const NodeFeatureTable& nft, FeatureMode mode);

// Labeled feature file: schema header columns plus a trailing `label` column.
struct LabeledFeatureFile {
    FeatureMatrix matrix;
    std::vector<AttackLabel> labels;
};

void save_feature_csv(const FeatureMatrix& m, const std::vector<AttackLabel>& labels,
                      const std::string& path);
LabeledFeatureFile load_feature_csv(const std::string& path);

} // namespace zdt
