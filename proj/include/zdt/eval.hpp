#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zdt/detectors.hpp"
#include "zdt/features.hpp"
#include "zdt/flow.hpp"
#include "zdt/neural.hpp"

namespace zdt {

struct BinaryOutcome {
    double score = 0.0; // higher = more positive
    int label = 0;      // 0 or 1
};

// AUC via the Mann-Whitney rank statistic, ties counted half. Equals the
// trapezoidal area under the ROC staircase.
double roc_auc(const std::vector<BinaryOutcome>& outcomes);

// Monotone staircase from (0,0) to (1,1), one point per distinct threshold.
std::vector<std::pair<double, double>> roc_curve(const std::vector<BinaryOutcome>& outcomes);

double trapezoid_area(const std::vector<std::pair<double, double>>& curve);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool degenerate = false; // a zero denominator was mapped to 0.0
};

PrecisionRecall precision_recall(const std::vector<int>& predictions,
                                 const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Experiment protocols
// ---------------------------------------------------------------------------

// One network's corpus after graph construction and featurization; row order
// matches the flow dataset.
struct FeaturizedNetwork {
    std::string network_id;
    FeatureMatrix features;
    std::vector<AttackLabel> labels;
};

FeaturizedNetwork featurize_network(const FlowDataset& ds, FeatureMode mode,
                                    const GraphFeatureConfig& gcfg = {});

struct ExperimentConfig {
    std::uint64_t seed = 42;
    FeatureMode feature_mode = FeatureMode::kFlowAndGraph;
    TrainConfig ad_train;
    TrainConfig nd_train;
    double train_fraction = 0.7;
    double holdout_prevalence = 0.015; // novel share of the evaluation pool
    double ad_quantile = 0.995;        // unsupervised AD threshold quantile
    double recall_floor = 0.5;
    std::vector<std::string> holdout_classes; // empty: every class in the corpus
    std::vector<std::string> baseline_known_classes; // single-AE baseline (b); empty: first 3
};

struct MetricsRow {
    std::string key; // attack class, "k=1", ...
    double auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::map<std::string, double> extra;
};

struct HistogramSeries {
    std::string series;
    std::vector<double> bin_edges; // size counts.size() + 1
    std::vector<std::size_t> counts;
};

HistogramSeries make_loss_histogram(const std::vector<double>& losses, const std::string& series,
                                    std::size_t bins, double lo, double hi);

struct ExperimentReport {
    std::string experiment;
    std::vector<MetricsRow> rows;
    std::optional<MetricsRow> average; // unweighted over rows
    nlohmann::ordered_json config_echo;
    std::vector<HistogramSeries> histograms;
};

// Single-AE baselines: (a) trained on benign, scored benign-vs-malicious;
// (b) trained on benign plus three known attack classes, scored on the
// holdout class vs everything else.
ExperimentReport run_single_ae_baseline(const std::vector<FeaturizedNetwork>& networks,
                                        const std::string& holdout_class,
                                        const ExperimentConfig& cfg);

// Trains the anomaly detector on benign data from 1..k networks (each
// network min-max normalized independently) and evaluates on every network's
// benign holdout plus the first network's malicious flows.
ExperimentReport run_ad_generalization(const std::vector<FeaturizedNetwork>& networks,
                                       FeatureMode mode, const ExperimentConfig& cfg);

// Leave-one-attack-out novelty run: the novelty detector never sees the
// holdout class; the mixed test set keeps the holdout below the configured
// prevalence. Returns one report row.
MetricsRow run_novelty_loo(const std::vector<FeaturizedNetwork>& networks,
                           const std::vector<std::string>& known_classes,
                           const std::string& holdout_class, const ExperimentConfig& cfg);

// Full dual-AE pipeline for one holdout class, with a disjoint calibration
// subset for both thresholds. Novel-vs-rest metrics count AD-rejected novel
// events as false negatives.
MetricsRow run_end_to_end(const std::vector<FeaturizedNetwork>& networks,
                          const std::string& holdout_class, const ExperimentConfig& cfg);

// Single AE trained on benign + known classes, evaluated on the same pools
// as run_end_to_end; scores are plain reconstruction losses.
MetricsRow run_single_on_e2e_pools(const std::vector<FeaturizedNetwork>& networks,
                                   const std::string& holdout_class,
                                   const ExperimentConfig& cfg);

// Three-row comparison (single / dual / dual+graph), each averaged evenly
// over the holdout classes.
ExperimentReport run_overall_comparison(const std::vector<FeaturizedNetwork>& flow_only,
                                        const std::vector<FeaturizedNetwork>& flow_and_graph,
                                        const ExperimentConfig& cfg);

// All attack classes present across the corpora, in first-seen order.
std::vector<std::string> attack_classes_present(const std::vector<FeaturizedNetwork>& networks);

MetricsRow average_rows(const std::vector<MetricsRow>& rows, const std::string& key);

void write_report_json(const ExperimentReport& report, const std::string& path);
void write_report_csv(const ExperimentReport& report, const std::string& path);
void write_histograms_csv(const std::vector<HistogramSeries>& histograms,
                          const std::string& path);

} // namespace zdt
