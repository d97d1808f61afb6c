#include "zdt/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "zdt/graph.hpp"
#include "zdt/rng.hpp"

namespace zdt {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::size_t> seeded_shuffle(std::vector<std::size_t> idx, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_fraction(const std::vector<std::size_t>& shuffled, double fraction) {
    const auto cut = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(shuffled.size())));
    return {std::vector<std::size_t>(shuffled.begin(), shuffled.begin() + cut),
            std::vector<std::size_t>(shuffled.begin() + cut, shuffled.end())};
}

TrainConfig with_seed(TrainConfig tc, std::uint64_t seed) {
    tc.seed = seed;
    return tc;
}

// Fit on the training selection, normalize, train, and bind the params.
AEModel train_on_rows(const FeatureMatrix& all, const std::vector<std::size_t>& rows,
                      const TrainConfig& tc) {
    const FeatureMatrix train = all.select_rows(rows);
    const NormalizationParams norm = fit_normalizer(train);
    TrainResult result = train_autoencoder(normalize(train, norm), build_architecture(
                                               static_cast<int>(train.cols)), tc);
    result.model.normalization = norm;
    result.model.feature_names = all.column_names;
    return std::move(result.model);
}

std::vector<double> losses_on_rows(const AEModel& model, const FeatureMatrix& all,
                                   const std::vector<std::size_t>& rows) {
    return score_raw(model, all.select_rows(rows));
}

} // namespace

double roc_auc(const std::vector<BinaryOutcome>& outcomes) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& o : outcomes) (o.label != 0 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw SingleClassError("roc_auc needs both labels present");
    }
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].score < outcomes[b].score;
    });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    const std::size_t n = outcomes.size();
    while (i < n) {
        std::size_t j = i;
        while (j < n && outcomes[order[j]].score == outcomes[order[i]].score) ++j;
        // ranks i+1..j averaged over the tie block
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (outcomes[order[k]].label != 0) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const double n_pos_d = static_cast<double>(n_pos);
    const double n_neg_d = static_cast<double>(n_neg);
    return (rank_sum_pos - n_pos_d * (n_pos_d + 1.0) / 2.0) / (n_pos_d * n_neg_d);
}

std::vector<std::pair<double, double>> roc_curve(const std::vector<BinaryOutcome>& outcomes) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& o : outcomes) (o.label != 0 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw SingleClassError("roc_curve needs both labels present");
    }
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].score > outcomes[b].score;
    });

    std::vector<std::pair<double, double>> curve;
    curve.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0, i = 0;
    const std::size_t n = outcomes.size();
    while (i < n) {
        std::size_t j = i;
        while (j < n && outcomes[order[j]].score == outcomes[order[i]].score) ++j;
        for (std::size_t k = i; k < j; ++k) {
            (outcomes[order[k]].label != 0 ? tp : fp) += 1;
        }
        curve.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                           static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j;
    }
    return curve;
}

double trapezoid_area(const std::vector<std::pair<double, double>>& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].first - curve[i - 1].first) *
                (curve[i].second + curve[i - 1].second) / 2.0;
    }
    return area;
}

PrecisionRecall precision_recall(const std::vector<int>& predictions,
                                 const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw LengthMismatchError("predictions and labels differ in length");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred = predictions[i] != 0;
        const bool truth = labels[i] != 0;
        if (pred && truth) ++tp;
        else if (pred && !truth) ++fp;
        else if (!pred && truth) ++fn;
    }
    PrecisionRecall pr;
    if (tp + fp == 0) {
        pr.precision = 0.0;
        pr.degenerate = true;
    } else {
        pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        pr.recall = 0.0;
        pr.degenerate = true;
    } else {
        pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    return pr;
}

FeaturizedNetwork featurize_network(const FlowDataset& ds, FeatureMode mode,
                                    const GraphFeatureConfig& gcfg) {
    FeaturizedNetwork out;
    out.network_id = ds.network_id;
    NetworkGraph g = build_graph(ds);
    const NodeFeatureTable nft =
        mode == FeatureMode::kFlowAndGraph ? compute_node_features(g, gcfg) : NodeFeatureTable{};
    out.features = featurize(ds, nft, mode);
    out.labels.reserve(ds.size());
    for (const auto& r : ds.records) out.labels.push_back(r.label);
    return out;
}

std::vector<std::string> attack_classes_present(const std::vector<FeaturizedNetwork>& networks) {
    std::vector<std::string> classes;
    for (const auto& net : networks) {
        for (const auto& label : net.labels) {
            if (label.is_attack() &&
                std::find(classes.begin(), classes.end(), label.attack_class) == classes.end()) {
                classes.push_back(label.attack_class);
            }
        }
    }
    return classes;
}

MetricsRow average_rows(const std::vector<MetricsRow>& rows, const std::string& key) {
    MetricsRow avg;
    avg.key = key;
    if (rows.empty()) return avg;
    for (const auto& r : rows) {
        avg.auc += r.auc;
        avg.precision += r.precision;
        avg.recall += r.recall;
    }
    const double n = static_cast<double>(rows.size());
    avg.auc /= n;
    avg.precision /= n;
    avg.recall /= n;
    return avg;
}

HistogramSeries make_loss_histogram(const std::vector<double>& losses, const std::string& series,
                                    std::size_t bins, double lo, double hi) {
    HistogramSeries h;
    h.series = series;
    if (bins == 0) bins = 1;
    if (!(hi > lo)) hi = lo + 1.0;
    h.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    for (double v : losses) {
        double t = (v - lo) / (hi - lo);
        auto b = static_cast<long long>(std::floor(t * static_cast<double>(bins)));
        b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

// ---------------------------------------------------------------------------
// Shared pool construction
// ---------------------------------------------------------------------------

namespace {

struct Concatenated {
    FeatureMatrix features;
    std::vector<AttackLabel> labels;
};

Concatenated concat_networks(const std::vector<FeaturizedNetwork>& networks) {
    Concatenated out;
    std::vector<const FeatureMatrix*> parts;
    for (const auto& n : networks) parts.push_back(&n.features);
    out.features = concat_rows(parts);
    for (const auto& n : networks) {
        out.labels.insert(out.labels.end(), n.labels.begin(), n.labels.end());
    }
    return out;
}

std::vector<std::size_t> indices_where(const std::vector<AttackLabel>& labels,
                                       const std::function<bool(const AttackLabel&)>& pred) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (pred(labels[i])) idx.push_back(i);
    }
    return idx;
}

// Benign split and anomaly detector shared by every holdout run of the
// end-to-end protocol ("the same strongest AD").
struct E2EShared {
    std::vector<std::size_t> benign_train, benign_cal, benign_final;
    AEModel ad_model;
    double ad_threshold = 0.0;
};

// Per-holdout pools over the concatenated corpus.
struct E2EPools {
    std::vector<std::string> known_classes;
    std::vector<std::size_t> known_train, known_cal, known_final;
    std::vector<std::size_t> novel_cal, novel_final;
};

E2EShared prepare_e2e_shared(const Concatenated& all, const ExperimentConfig& cfg) {
    E2EShared shared;
    auto benign = indices_where(all.labels, [](const AttackLabel& l) { return l.is_benign(); });
    auto shuffled = seeded_shuffle(benign, derive_seed(cfg.seed, "e2e.benign.split"));
    auto [train, rest] = split_fraction(shuffled, cfg.train_fraction);
    auto [cal, fin] = split_fraction(rest, 0.5);
    shared.benign_train = std::move(train);
    shared.benign_cal = std::move(cal);
    shared.benign_final = std::move(fin);

    shared.ad_model = train_on_rows(all.features, shared.benign_train,
                                    with_seed(cfg.ad_train, derive_seed(cfg.seed, "e2e.ad.train")));
    shared.ad_threshold = calibrate_threshold_unsupervised(
        losses_on_rows(shared.ad_model, all.features, shared.benign_cal), cfg.ad_quantile);
    return shared;
}

std::size_t prevalence_cap(double prevalence, std::size_t negatives) {
    if (!(prevalence > 0.0) || prevalence >= 1.0) return 0;
    return static_cast<std::size_t>(
        std::floor(prevalence / (1.0 - prevalence) * static_cast<double>(negatives)));
}

E2EPools build_e2e_pools(const Concatenated& all, const E2EShared& shared,
                         const std::string& holdout, const ExperimentConfig& cfg,
                         const std::vector<std::string>& classes) {
    E2EPools pools;
    for (const auto& c : classes) {
        if (c != holdout) pools.known_classes.push_back(c);
    }

    auto known = indices_where(all.labels, [&](const AttackLabel& l) {
        return l.is_attack() && l.attack_class != holdout;
    });
    auto novel = indices_where(all.labels, [&](const AttackLabel& l) {
        return l.is_attack() && l.attack_class == holdout;
    });
    auto known_shuffled = seeded_shuffle(known, derive_seed(cfg.seed, "e2e.known." + holdout));
    auto [ktrain, krest] = split_fraction(known_shuffled, cfg.train_fraction);
    auto [kcal, kfinal] = split_fraction(krest, 0.5);
    pools.known_train = std::move(ktrain);
    pools.known_cal = std::move(kcal);
    pools.known_final = std::move(kfinal);

    auto novel_shuffled = seeded_shuffle(novel, derive_seed(cfg.seed, "e2e.novel." + holdout));
    const std::size_t neg_final = shared.benign_final.size() + pools.known_final.size();
    const std::size_t neg_cal = shared.benign_cal.size() + pools.known_cal.size();
    std::size_t n_final = std::min(novel_shuffled.size(),
                                   prevalence_cap(cfg.holdout_prevalence, neg_final));
    if (n_final == 0 && !novel_shuffled.empty()) n_final = 1;
    std::size_t n_cal = std::min(novel_shuffled.size() - n_final,
                                 prevalence_cap(cfg.holdout_prevalence, neg_cal));
    if (n_cal == 0 && novel_shuffled.size() > n_final) n_cal = 1;
    pools.novel_final.assign(novel_shuffled.begin(), novel_shuffled.begin() + n_final);
    pools.novel_cal.assign(novel_shuffled.begin() + n_final,
                           novel_shuffled.begin() + n_final + n_cal);
    return pools;
}

MetricsRow run_end_to_end_impl(const Concatenated& all, const E2EShared& shared,
                               const std::string& holdout, const ExperimentConfig& cfg,
                               const std::vector<std::string>& classes) {
    const E2EPools pools = build_e2e_pools(all, shared, holdout, cfg, classes);
    if (pools.known_train.empty() || pools.novel_final.empty()) {
        throw InsufficientDataError("end-to-end run needs known-attack and holdout rows");
    }

    AEModel nd_model =
        train_on_rows(all.features, pools.known_train,
                      with_seed(cfg.nd_train, derive_seed(cfg.seed, "e2e.nd.train." + holdout)));
    nd_model.class_tags = pools.known_classes;

    // ND threshold: supervised on the calibration rows that pass the AD gate.
    std::vector<std::size_t> cal_pool;
    cal_pool.insert(cal_pool.end(), shared.benign_cal.begin(), shared.benign_cal.end());
    cal_pool.insert(cal_pool.end(), pools.known_cal.begin(), pools.known_cal.end());
    cal_pool.insert(cal_pool.end(), pools.novel_cal.begin(), pools.novel_cal.end());

    const std::vector<double> cal_ad_losses = losses_on_rows(shared.ad_model, all.features, cal_pool);
    std::vector<std::size_t> gated;
    for (std::size_t i = 0; i < cal_pool.size(); ++i) {
        if (cal_ad_losses[i] > shared.ad_threshold) gated.push_back(cal_pool[i]);
    }
    double nd_threshold = 0.0;
    double cal_precision = 0.0, cal_recall = 0.0;
    bool cal_feasible = false;
    bool has_gated_pos = false, has_gated_neg = false;
    for (std::size_t i : gated) {
        (all.labels[i].is_attack() && all.labels[i].attack_class == holdout ? has_gated_pos
                                                                            : has_gated_neg) = true;
    }
    if (has_gated_pos && has_gated_neg) {
        const std::vector<double> gated_losses = losses_on_rows(nd_model, all.features, gated);
        std::vector<int> gated_labels;
        gated_labels.reserve(gated.size());
        for (std::size_t i : gated) {
            gated_labels.push_back(
                all.labels[i].is_attack() && all.labels[i].attack_class == holdout ? 1 : 0);
        }
        const CalibrationResult cal =
            calibrate_threshold_supervised(gated_losses, gated_labels, cfg.recall_floor);
        nd_threshold = cal.threshold;
        cal_precision = cal.precision;
        cal_recall = cal.recall;
        cal_feasible = cal.feasible;
    } else {
        // Degenerate gate: fall back to a quantile over the known-attack
        // calibration losses.
        nd_threshold = calibrate_threshold_unsupervised(
            losses_on_rows(nd_model, all.features, pools.known_cal), cfg.ad_quantile, 1);
    }

    // Final evaluation.
    std::vector<std::size_t> final_pool;
    final_pool.insert(final_pool.end(), shared.benign_final.begin(), shared.benign_final.end());
    final_pool.insert(final_pool.end(), pools.known_final.begin(), pools.known_final.end());
    final_pool.insert(final_pool.end(), pools.novel_final.begin(), pools.novel_final.end());

    AnomalyDetector ad{shared.ad_model, shared.ad_threshold};
    NoveltyDetector nd{nd_model, nd_threshold, pools.known_classes};
    const std::vector<Verdict> verdicts = detect(ad, nd, all.features.select_rows(final_pool));

    std::vector<BinaryOutcome> outcomes(final_pool.size());
    std::vector<int> predictions(final_pool.size());
    std::vector<int> labels(final_pool.size());
    for (std::size_t i = 0; i < final_pool.size(); ++i) {
        const auto& v = verdicts[i];
        // Two-stage ranking score: gated rows rank by ND loss; AD-rejected
        // rows rank below zero by their margin to the AD threshold.
        outcomes[i].score = v.nd_loss ? *v.nd_loss : v.ad_loss - shared.ad_threshold;
        const auto& l = all.labels[final_pool[i]];
        outcomes[i].label = l.is_attack() && l.attack_class == holdout ? 1 : 0;
        labels[i] = outcomes[i].label;
        predictions[i] = v.kind == VerdictKind::kNovelThreat ? 1 : 0;
    }
    const PrecisionRecall pr = precision_recall(predictions, labels);

    MetricsRow row;
    row.key = holdout;
    row.auc = roc_auc(outcomes);
    row.precision = pr.precision;
    row.recall = pr.recall;
    row.extra["ad_threshold"] = shared.ad_threshold;
    row.extra["nd_threshold"] = nd_threshold;
    row.extra["calibration_feasible"] = cal_feasible ? 1.0 : 0.0;
    row.extra["calibration_precision"] = cal_precision;
    row.extra["calibration_recall"] = cal_recall;
    row.extra["novel_final"] = static_cast<double>(pools.novel_final.size());
    row.extra["final_pool"] = static_cast<double>(final_pool.size());
    return row;
}

} // namespace

ExperimentReport run_ad_generalization(const std::vector<FeaturizedNetwork>& networks,
                                       FeatureMode mode, const ExperimentConfig& cfg) {
    if (networks.size() < 2) {
        throw InsufficientDataError("ad_generalization needs at least 2 networks");
    }
    ExperimentReport report;
    report.experiment = "ad_generalization";
    report.config_echo["feature_mode"] = feature_mode_to_string(mode);
    report.config_echo["seed"] = cfg.seed;

    struct NetworkSplit {
        FeatureMatrix train_norm;
        FeatureMatrix test_norm;
    };
    std::vector<NetworkSplit> splits;
    FeatureMatrix malicious_norm;

    for (std::size_t i = 0; i < networks.size(); ++i) {
        const auto& net = networks[i];
        auto benign = indices_where(net.labels, [](const AttackLabel& l) { return l.is_benign(); });
        auto shuffled = seeded_shuffle(
            benign, derive_seed(cfg.seed, "adgen.split." + net.network_id));
        auto [train_idx, test_idx] = split_fraction(shuffled, cfg.train_fraction);
        const FeatureMatrix train = net.features.select_rows(train_idx);
        // Each network is normalized independently with its own benign
        // training parameters.
        const NormalizationParams norm = fit_normalizer(train);
        NetworkSplit split;
        split.train_norm = normalize(train, norm);
        split.test_norm = normalize(net.features.select_rows(test_idx), norm);
        if (i == 0) {
            auto malicious =
                indices_where(net.labels, [](const AttackLabel& l) { return l.is_attack(); });
            if (malicious.empty()) {
                throw InsufficientDataError("first network must provide a malicious holdout");
            }
            malicious_norm = normalize(net.features.select_rows(malicious), norm);
        }
        splits.push_back(std::move(split));
    }

    const std::size_t max_k = std::min<std::size_t>(3, networks.size());
    for (std::size_t k = 1; k <= max_k; ++k) {
        std::vector<const FeatureMatrix*> parts;
        for (std::size_t i = 0; i < k; ++i) parts.push_back(&splits[i].train_norm);
        const FeatureMatrix train = concat_rows(parts);

        TrainConfig tc = with_seed(cfg.ad_train,
                                   derive_seed(cfg.seed, "adgen.train.k" + std::to_string(k)));
        TrainResult tr = train_autoencoder(train, build_architecture(static_cast<int>(train.cols)), tc);

        std::vector<BinaryOutcome> outcomes;
        for (const auto& split : splits) {
            for (double loss : reconstruction_losses(tr.model, split.test_norm)) {
                outcomes.push_back({loss, 0});
            }
        }
        for (double loss : reconstruction_losses(tr.model, malicious_norm)) {
            outcomes.push_back({loss, 1});
        }
        MetricsRow row;
        row.key = "k=" + std::to_string(k);
        row.auc = roc_auc(outcomes);
        row.extra["train_rows"] = static_cast<double>(train.rows);
        report.rows.push_back(std::move(row));
    }
    return report;
}

MetricsRow run_novelty_loo(const std::vector<FeaturizedNetwork>& networks,
                           const std::vector<std::string>& known_classes,
                           const std::string& holdout_class, const ExperimentConfig& cfg) {
    if (std::find(known_classes.begin(), known_classes.end(), holdout_class) !=
        known_classes.end()) {
        throw ConfigError("holdout class must not appear among known classes");
    }
    const Concatenated all = concat_networks(networks);

    auto known = indices_where(all.labels, [&](const AttackLabel& l) {
        return l.is_attack() && std::find(known_classes.begin(), known_classes.end(),
                                          l.attack_class) != known_classes.end();
    });
    auto novel = indices_where(all.labels, [&](const AttackLabel& l) {
        return l.is_attack() && l.attack_class == holdout_class;
    });
    if (known.empty() || novel.empty()) {
        throw InsufficientDataError("novelty run needs known and holdout rows");
    }

    auto shuffled = seeded_shuffle(known, derive_seed(cfg.seed, "loo.split." + holdout_class));
    auto [train_idx, test_idx] = split_fraction(shuffled, cfg.train_fraction);

    // Label audit: the training matrix must hold zero holdout-class rows.
    std::size_t holdout_in_training = 0;
    for (std::size_t i : train_idx) {
        if (all.labels[i].attack_class == holdout_class) ++holdout_in_training;
    }
    if (holdout_in_training != 0) {
        throw LabelContaminationError("holdout rows leaked into novelty training");
    }

    AEModel nd = train_on_rows(all.features, train_idx,
                               with_seed(cfg.nd_train,
                                         derive_seed(cfg.seed, "loo.train." + holdout_class)));
    nd.class_tags = known_classes;

    auto novel_shuffled = seeded_shuffle(novel, derive_seed(cfg.seed, "loo.novel." + holdout_class));
    std::size_t n_novel = std::min(novel_shuffled.size(),
                                   prevalence_cap(cfg.holdout_prevalence, test_idx.size()));
    if (n_novel == 0) n_novel = 1;

    std::vector<std::size_t> eval_pool = test_idx;
    eval_pool.insert(eval_pool.end(), novel_shuffled.begin(), novel_shuffled.begin() + n_novel);

    const std::vector<double> losses = losses_on_rows(nd, all.features, eval_pool);
    std::vector<int> labels(eval_pool.size());
    std::vector<BinaryOutcome> outcomes(eval_pool.size());
    for (std::size_t i = 0; i < eval_pool.size(); ++i) {
        labels[i] = all.labels[eval_pool[i]].attack_class == holdout_class ? 1 : 0;
        outcomes[i] = {losses[i], labels[i]};
    }

    const CalibrationResult cal = calibrate_threshold_supervised(losses, labels, cfg.recall_floor);
    std::vector<int> predictions(eval_pool.size());
    for (std::size_t i = 0; i < eval_pool.size(); ++i) {
        predictions[i] = losses[i] > cal.threshold ? 1 : 0;
    }
    const PrecisionRecall pr = precision_recall(predictions, labels);

    MetricsRow row;
    row.key = holdout_class;
    row.auc = roc_auc(outcomes);
    row.precision = pr.precision;
    row.recall = pr.recall;
    row.extra["nd_threshold"] = cal.threshold;
    row.extra["calibration_feasible"] = cal.feasible ? 1.0 : 0.0;
    row.extra["holdout_rows_in_training"] = static_cast<double>(holdout_in_training);
    row.extra["novel_rows"] = static_cast<double>(n_novel);
    row.extra["known_test_rows"] = static_cast<double>(test_idx.size());
    return row;
}

MetricsRow run_end_to_end(const std::vector<FeaturizedNetwork>& networks,
                          const std::string& holdout_class, const ExperimentConfig& cfg) {
    const Concatenated all = concat_networks(networks);
    const E2EShared shared = prepare_e2e_shared(all, cfg);
    return run_end_to_end_impl(all, shared, holdout_class, cfg,
                               attack_classes_present(networks));
}

MetricsRow run_single_on_e2e_pools(const std::vector<FeaturizedNetwork>& networks,
                                   const std::string& holdout_class,
                                   const ExperimentConfig& cfg) {
    const Concatenated all = concat_networks(networks);
    // Pools must match run_end_to_end row for row, so reuse its seed tags.
    E2EShared shared;
    auto benign = indices_where(all.labels, [](const AttackLabel& l) { return l.is_benign(); });
    auto shuffled = seeded_shuffle(benign, derive_seed(cfg.seed, "e2e.benign.split"));
    auto [train, rest] = split_fraction(shuffled, cfg.train_fraction);
    auto [cal, fin] = split_fraction(rest, 0.5);
    shared.benign_train = std::move(train);
    shared.benign_cal = std::move(cal);
    shared.benign_final = std::move(fin);

    const E2EPools pools =
        build_e2e_pools(all, shared, holdout_class, cfg, attack_classes_present(networks));
    if (pools.known_train.empty() || pools.novel_final.empty()) {
        throw InsufficientDataError("single-AE run needs known-attack and holdout rows");
    }

    std::vector<std::size_t> train_rows = shared.benign_train;
    train_rows.insert(train_rows.end(), pools.known_train.begin(), pools.known_train.end());
    const AEModel single =
        train_on_rows(all.features, train_rows,
                      with_seed(cfg.ad_train, derive_seed(cfg.seed, "e2e.single." + holdout_class)));

    std::vector<std::size_t> cal_pool;
    cal_pool.insert(cal_pool.end(), shared.benign_cal.begin(), shared.benign_cal.end());
    cal_pool.insert(cal_pool.end(), pools.known_cal.begin(), pools.known_cal.end());
    cal_pool.insert(cal_pool.end(), pools.novel_cal.begin(), pools.novel_cal.end());
    std::vector<std::size_t> final_pool;
    final_pool.insert(final_pool.end(), shared.benign_final.begin(), shared.benign_final.end());
    final_pool.insert(final_pool.end(), pools.known_final.begin(), pools.known_final.end());
    final_pool.insert(final_pool.end(), pools.novel_final.begin(), pools.novel_final.end());

    auto label_of = [&](std::size_t i) {
        return all.labels[i].is_attack() && all.labels[i].attack_class == holdout_class ? 1 : 0;
    };

    double threshold = 0.0;
    {
        const std::vector<double> cal_losses = losses_on_rows(single, all.features, cal_pool);
        std::vector<int> cal_labels(cal_pool.size());
        for (std::size_t i = 0; i < cal_pool.size(); ++i) cal_labels[i] = label_of(cal_pool[i]);
        if (!pools.novel_cal.empty()) {
            threshold = calibrate_threshold_supervised(cal_losses, cal_labels, cfg.recall_floor)
                            .threshold;
        } else {
            threshold = calibrate_threshold_unsupervised(cal_losses, cfg.ad_quantile, 1);
        }
    }

    const std::vector<double> losses = losses_on_rows(single, all.features, final_pool);
    std::vector<BinaryOutcome> outcomes(final_pool.size());
    std::vector<int> labels(final_pool.size());
    std::vector<int> predictions(final_pool.size());
    for (std::size_t i = 0; i < final_pool.size(); ++i) {
        labels[i] = label_of(final_pool[i]);
        outcomes[i] = {losses[i], labels[i]};
        predictions[i] = losses[i] > threshold ? 1 : 0;
    }
    const PrecisionRecall pr = precision_recall(predictions, labels);

    MetricsRow row;
    row.key = holdout_class;
    row.auc = roc_auc(outcomes);
    row.precision = pr.precision;
    row.recall = pr.recall;
    row.extra["threshold"] = threshold;
    return row;
}

ExperimentReport run_single_ae_baseline(const std::vector<FeaturizedNetwork>& networks,
                                        const std::string& holdout_class,
                                        const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "baseline_single";
    report.config_echo["seed"] = cfg.seed;
    report.config_echo["holdout_class"] = holdout_class;

    const Concatenated all = concat_networks(networks);
    auto benign = indices_where(all.labels, [](const AttackLabel& l) { return l.is_benign(); });
    auto malicious = indices_where(all.labels, [](const AttackLabel& l) { return l.is_attack(); });
    if (benign.empty() || malicious.empty()) {
        throw InsufficientDataError("baseline needs benign and malicious rows");
    }

    auto benign_shuffled = seeded_shuffle(benign, derive_seed(cfg.seed, "base.benign.split"));
    auto [benign_train, benign_test] = split_fraction(benign_shuffled, cfg.train_fraction);

    // (a) benign-trained AE scored benign-vs-malicious.
    {
        const AEModel model =
            train_on_rows(all.features, benign_train,
                          with_seed(cfg.ad_train, derive_seed(cfg.seed, "base.a.train")));
        const auto benign_losses = losses_on_rows(model, all.features, benign_test);
        const auto mal_losses = losses_on_rows(model, all.features, malicious);
        std::vector<BinaryOutcome> outcomes;
        for (double v : benign_losses) outcomes.push_back({v, 0});
        for (double v : mal_losses) outcomes.push_back({v, 1});
        MetricsRow row;
        row.key = "benign_vs_malicious";
        row.auc = roc_auc(outcomes);
        report.rows.push_back(std::move(row));

        double hi = 0.0;
        for (const auto& o : outcomes) hi = std::max(hi, o.score);
        report.histograms.push_back(
            make_loss_histogram(benign_losses, "baseline_a/benign_test", 60, 0.0, hi));
        report.histograms.push_back(
            make_loss_histogram(mal_losses, "baseline_a/malicious", 60, 0.0, hi));
    }

    // (b) AE trained on benign + three known classes; novel class vs rest.
    {
        std::vector<std::string> known = cfg.baseline_known_classes;
        if (known.empty()) {
            for (const auto& c : attack_classes_present(networks)) {
                if (c != holdout_class && known.size() < 3) known.push_back(c);
            }
        }
        if (known.size() < 3) {
            throw InsufficientDataError("baseline (b) needs three known attack classes");
        }
        auto known_idx = indices_where(all.labels, [&](const AttackLabel& l) {
            return l.is_attack() &&
                   std::find(known.begin(), known.end(), l.attack_class) != known.end();
        });
        auto novel_idx = indices_where(all.labels, [&](const AttackLabel& l) {
            return l.is_attack() && l.attack_class == holdout_class;
        });
        if (known_idx.empty() || novel_idx.empty()) {
            throw InsufficientDataError("baseline (b) needs known and holdout rows");
        }
        auto known_shuffled = seeded_shuffle(known_idx, derive_seed(cfg.seed, "base.b.split"));
        auto [known_train, known_test] = split_fraction(known_shuffled, cfg.train_fraction);

        std::vector<std::size_t> train_rows = benign_train;
        train_rows.insert(train_rows.end(), known_train.begin(), known_train.end());
        const AEModel model =
            train_on_rows(all.features, train_rows,
                          with_seed(cfg.ad_train, derive_seed(cfg.seed, "base.b.train")));

        std::vector<std::size_t> rest_rows = benign_test;
        rest_rows.insert(rest_rows.end(), known_test.begin(), known_test.end());
        const auto rest_losses = losses_on_rows(model, all.features, rest_rows);
        const auto novel_losses = losses_on_rows(model, all.features, novel_idx);
        std::vector<BinaryOutcome> outcomes;
        for (double v : rest_losses) outcomes.push_back({v, 0});
        for (double v : novel_losses) outcomes.push_back({v, 1});
        MetricsRow row;
        row.key = "novel_vs_rest";
        row.auc = roc_auc(outcomes);
        row.extra["known_classes"] = static_cast<double>(known.size());
        report.rows.push_back(std::move(row));

        double hi = 0.0;
        for (const auto& o : outcomes) hi = std::max(hi, o.score);
        report.histograms.push_back(
            make_loss_histogram(rest_losses, "baseline_b/test", 60, 0.0, hi));
        report.histograms.push_back(
            make_loss_histogram(novel_losses, "baseline_b/novel", 60, 0.0, hi));
    }
    return report;
}

ExperimentReport run_overall_comparison(const std::vector<FeaturizedNetwork>& flow_only,
                                        const std::vector<FeaturizedNetwork>& flow_and_graph,
                                        const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.experiment = "overall_comparison";
    report.config_echo["seed"] = cfg.seed;

    std::vector<std::string> holdouts = cfg.holdout_classes;
    if (holdouts.empty()) holdouts = attack_classes_present(flow_and_graph);
    if (holdouts.empty()) throw InsufficientDataError("no attack classes in corpus");

    const Concatenated all_flow = concat_networks(flow_only);
    const Concatenated all_graph = concat_networks(flow_and_graph);
    const auto classes_flow = attack_classes_present(flow_only);
    const auto classes_graph = attack_classes_present(flow_and_graph);
    const E2EShared shared_flow = prepare_e2e_shared(all_flow, cfg);
    const E2EShared shared_graph = prepare_e2e_shared(all_graph, cfg);

    std::vector<MetricsRow> single_rows, dual_rows, dual_graph_rows;
    for (const auto& h : holdouts) {
        single_rows.push_back(run_single_on_e2e_pools(flow_only, h, cfg));
        dual_rows.push_back(run_end_to_end_impl(all_flow, shared_flow, h, cfg, classes_flow));
        dual_graph_rows.push_back(
            run_end_to_end_impl(all_graph, shared_graph, h, cfg, classes_graph));
    }

    MetricsRow single = average_rows(single_rows, "single");
    MetricsRow dual = average_rows(dual_rows, "dual");
    MetricsRow dual_graph = average_rows(dual_graph_rows, "dual_with_graph");
    report.rows = {std::move(single), std::move(dual), std::move(dual_graph)};
    report.config_echo["holdout_classes"] = holdouts;
    return report;
}

void write_report_json(const ExperimentReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["experiment"] = report.experiment;
    j["config"] = report.config_echo;
    auto row_json = [](const MetricsRow& r) {
        nlohmann::ordered_json o;
        o["key"] = r.key;
        o["auc"] = r.auc;
        o["precision"] = r.precision;
        o["recall"] = r.recall;
        for (const auto& [k, v] : r.extra) o[k] = v;
        return o;
    };
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) j["rows"].push_back(row_json(r));
    if (report.average) j["average"] = row_json(*report.average);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("report write failed: " + path);
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << "attack,auc,precision,recall\n";
    auto write_row = [&](const MetricsRow& r) {
        out << r.key << ',' << fmt_double(r.auc) << ',' << fmt_double(r.precision) << ','
            << fmt_double(r.recall) << '\n';
    };
    for (const auto& r : report.rows) write_row(r);
    if (report.average) write_row(*report.average);
    if (!out) throw IoError("report write failed: " + path);
}

void write_histograms_csv(const std::vector<HistogramSeries>& histograms,
                          const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open histogram file for writing: " + path);
    out << "series,bin_lo,bin_hi,count\n";
    for (const auto& h : histograms) {
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            out << h.series << ',' << fmt_double(h.bin_edges[b]) << ','
                << fmt_double(h.bin_edges[b + 1]) << ',' << h.counts[b] << '\n';
        }
    }
    if (!out) throw IoError("histogram write failed: " + path);
}

} // namespace zdt
