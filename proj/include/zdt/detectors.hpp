#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zdt/features.hpp"
#include "zdt/neural.hpp"

namespace zdt {

// AE trained on benign traffic only, plus its calibrated loss threshold.
struct AnomalyDetector {
    AEModel model;
    double threshold = 0.0;
};

// AE trained on known-attack traffic only.
struct NoveltyDetector {
    AEModel model;
    double threshold = 0.0;
    std::vector<std::string> known_classes;
};

enum class VerdictKind { kBenign, kKnownAttack, kNovelThreat };

std::string verdict_kind_to_string(VerdictKind k);

struct Verdict {
    VerdictKind kind = VerdictKind::kBenign;
    double ad_loss = 0.0;
    std::optional<double> nd_loss; // present iff ad_loss > the AD threshold
    bool unknown_node = false;     // streaming fallback: graph features zeroed
};

// Empirical quantile (linear interpolation between order statistics) of
// benign validation losses. Needs at least min_count values.
double calibrate_threshold_unsupervised(std::vector<double> benign_val_losses,
                                        double quantile = 0.995, std::size_t min_count = 20);

struct CalibrationResult {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t candidate_count = 0;
    bool feasible = true; // false: recall floor unattainable, recall-max fallback used
};

// Scans midpoints between consecutive sorted unique losses; among candidates
// with recall >= recall_floor picks max precision (ties: higher recall, then
// lower threshold). A row is predicted positive when its loss exceeds the
// threshold. When no candidate reaches the floor, falls back to the
// recall-maximizing threshold (admits everything) and flags the result.
CalibrationResult calibrate_threshold_supervised(const std::vector<double>& losses,
                                                 const std::vector<int>& labels,
                                                 double recall_floor = 0.5);

// Dual-AE gate: normalize with AD params and score; at or below the AD
// threshold the flow is benign, otherwise the raw vector is re-normalized
// with ND params and the ND threshold separates known attacks from novel
// threats.
std::vector<Verdict> detect(const AnomalyDetector& ad, const NoveltyDetector& nd,
                            const FeatureMatrix& raw_features);

struct StreamEntry {
    std::size_t index = 0;
    bool ok = true;
    Verdict verdict;
    std::string error; // set when ok == false
};

struct ThroughputStats {
    std::size_t flows = 0;
    double seconds = 0.0;
    double flows_per_second() const { return seconds > 0.0 ? flows / seconds : 0.0; }
};

// Constant-memory streaming detector over flow records. Featurizes against a
// prebuilt NodeFeatureTable; flows touching IPs absent from the table get
// zeroed graph features and an unknown_node flag. Records are scored in
// batches but emitted in input order.
class StreamDetector {
public:
    StreamDetector(AnomalyDetector ad, NoveltyDetector nd, NodeFeatureTable nodes,
                   FeatureMode mode, std::size_t batch_size = 256);

    // Buffers one record; returns completed entries when a batch fills.
    std::vector<StreamEntry> push(const FlowRecord& record);
    // Scores whatever is buffered.
    std::vector<StreamEntry> flush();

    const ThroughputStats& stats() const { return stats_; }

private:
    std::vector<StreamEntry> score_buffer();

    AnomalyDetector ad_;
    NoveltyDetector nd_;
    NodeFeatureTable nodes_;
    std::unordered_map<std::string, int> node_index_;
    FeatureMode mode_;
    std::size_t batch_size_;
    std::size_t next_index_ = 0;

    FeatureMatrix buffer_;
    std::vector<StreamEntry> pending_; // error entries + flags aligned with buffer rows
    ThroughputStats stats_;
};

} // namespace zdt
