#include "zdt/detectors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace zdt {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace

std::string verdict_kind_to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::kBenign: return "benign";
    case VerdictKind::kKnownAttack: return "known_attack";
    case VerdictKind::kNovelThreat: return "novel_threat";
    }
    return "benign";
}

double calibrate_threshold_unsupervised(std::vector<double> losses, double quantile,
                                        std::size_t min_count) {
    if (!(quantile > 0.0 && quantile < 1.0)) {
        throw ConfigError("quantile must be in (0,1)");
    }
    if (losses.empty() || losses.size() < min_count) {
        throw InsufficientDataError("need at least " + std::to_string(min_count) +
                                    " loss values for quantile calibration, have " +
                                    std::to_string(losses.size()));
    }
    std::sort(losses.begin(), losses.end());
    const double h = quantile * static_cast<double>(losses.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= losses.size() || frac == 0.0) return losses[lo];
    return losses[lo] + frac * (losses[lo + 1] - losses[lo]);
}

CalibrationResult calibrate_threshold_supervised(const std::vector<double>& losses,
                                                 const std::vector<int>& labels,
                                                 double recall_floor) {
    if (losses.size() != labels.size()) {
        throw LengthMismatchError("losses and labels differ in length");
    }
    const std::size_t n = losses.size();
    std::size_t total_pos = 0;
    for (int l : labels) total_pos += l != 0 ? 1 : 0;
    if (total_pos == 0 || total_pos == n) {
        throw SingleClassError("supervised calibration needs both classes present");
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });

    // suffix_pos[i] = positives among sorted[i..n)
    std::vector<std::size_t> suffix_pos(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        suffix_pos[i] = suffix_pos[i + 1] + (labels[order[i]] != 0 ? 1 : 0);
    }

    struct Candidate {
        double tau;
        double precision;
        double recall;
    };
    auto evaluate = [&](double tau) {
        // first sorted index with loss > tau
        std::size_t i = 0;
        while (i < n && losses[order[i]] <= tau) ++i;
        const std::size_t predicted = n - i;
        const std::size_t tp = suffix_pos[i];
        const double precision =
            predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
        const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
        return Candidate{tau, precision, recall};
    };

    std::vector<double> midpoints;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = losses[order[i]];
        const double b = losses[order[i + 1]];
        if (a < b) midpoints.push_back(a + (b - a) / 2.0);
    }

    CalibrationResult result;
    result.candidate_count = midpoints.size();

    bool found = false;
    Candidate best{0.0, -1.0, -1.0};
    for (double tau : midpoints) {
        const Candidate c = evaluate(tau);
        if (c.recall < recall_floor) continue;
        if (!found || c.precision > best.precision ||
            (c.precision == best.precision && c.recall > best.recall)) {
            best = c;
            found = true;
        }
    }
    if (found) {
        result.threshold = best.tau;
        result.precision = best.precision;
        result.recall = best.recall;
        result.feasible = true;
        return result;
    }

    // Recall-max fallback; a threshold below the smallest loss admits everything.
    std::vector<double> fallback = midpoints;
    fallback.insert(fallback.begin(), losses[order[0]] - 1.0);
    best = Candidate{0.0, -1.0, -1.0};
    for (double tau : fallback) {
        const Candidate c = evaluate(tau);
        if (best.recall < 0.0 || c.recall > best.recall ||
            (c.recall == best.recall && c.precision > best.precision)) {
            best = c;
        }
    }
    result.threshold = best.tau;
    result.precision = best.precision;
    result.recall = best.recall;
    result.feasible = false;
    return result;
}

std::vector<Verdict> detect(const AnomalyDetector& ad, const NoveltyDetector& nd,
                            const FeatureMatrix& raw_features) {
    const std::vector<double> ad_losses = score_raw(ad.model, raw_features);

    std::vector<Verdict> verdicts(raw_features.rows);
    std::vector<std::size_t> gated;
    for (std::size_t r = 0; r < raw_features.rows; ++r) {
        verdicts[r].ad_loss = ad_losses[r];
        if (ad_losses[r] <= ad.threshold) {
            verdicts[r].kind = VerdictKind::kBenign;
        } else {
            gated.push_back(r);
        }
    }
    if (!gated.empty()) {
        const FeatureMatrix gated_raw = raw_features.select_rows(gated);
        const std::vector<double> nd_losses = score_raw(nd.model, gated_raw);
        for (std::size_t k = 0; k < gated.size(); ++k) {
            auto& v = verdicts[gated[k]];
            v.nd_loss = nd_losses[k];
            v.kind = nd_losses[k] <= nd.threshold ? VerdictKind::kKnownAttack
                                                  : VerdictKind::kNovelThreat;
        }
    }
    return verdicts;
}

StreamDetector::StreamDetector(AnomalyDetector ad, NoveltyDetector nd, NodeFeatureTable nodes,
                               FeatureMode mode, std::size_t batch_size)
    : ad_(std::move(ad)), nd_(std::move(nd)), nodes_(std::move(nodes)), mode_(mode),
      batch_size_(batch_size == 0 ? 1 : batch_size) {
    const FeatureSchema schema = FeatureSchema::for_mode(mode_);
    buffer_.cols = schema.dimension();
    buffer_.column_names = schema.names;
    node_index_.reserve(nodes_.node_names.size());
    for (std::size_t i = 0; i < nodes_.node_names.size(); ++i) {
        node_index_.emplace(nodes_.node_names[i], static_cast<int>(i));
    }
}

std::vector<StreamEntry> StreamDetector::push(const FlowRecord& record) {
    Timer timer;
    StreamEntry entry;
    entry.index = next_index_++;

    try {
        validate_flow_record(record);
        std::vector<double> row(buffer_.cols, 0.0);
        const auto ff = flow_features(record);
        std::copy(ff.begin(), ff.end(), row.begin());
        if (mode_ == FeatureMode::kFlowAndGraph) {
            const auto src_it = node_index_.find(record.src_ip);
            const auto dst_it = node_index_.find(record.dst_ip);
            // Unknown endpoints keep zeroed graph features and get flagged.
            entry.verdict.unknown_node =
                src_it == node_index_.end() || dst_it == node_index_.end();
            auto fill = [&](int node_id, std::size_t offset) {
                const auto& nf = nodes_.rows[node_id];
                row[offset + 0] = nf.degree_centrality;
                row[offset + 1] = nf.pagerank;
                row[offset + 2] = nf.clustering_coefficient;
                row[offset + 3] = nf.betweenness;
                row[offset + 4] = static_cast<double>(nf.in_degree);
                row[offset + 5] = static_cast<double>(nf.out_degree);
                row[offset + 6] = static_cast<double>(nf.in_weight);
                row[offset + 7] = static_cast<double>(nf.out_weight);
                row[offset + 8] = nf.hub;
                row[offset + 9] = nf.authority;
            };
            if (src_it != node_index_.end()) fill(src_it->second, kFlowFeatureCount);
            if (dst_it != node_index_.end()) {
                fill(dst_it->second, kFlowFeatureCount + kNodeFeatureCount);
            }
            if (!entry.verdict.unknown_node) {
                row[buffer_.cols - 1] = nodes_.rows[src_it->second].community !=
                                                nodes_.rows[dst_it->second].community
                                            ? 1.0
                                            : 0.0;
            }
        }
        buffer_.append_row(row);
        pending_.push_back(entry);
    } catch (const Error& e) {
        entry.ok = false;
        entry.error = e.what();
        pending_.push_back(entry);
    }

    stats_.seconds += timer.elapsed();
    if (buffer_.rows >= batch_size_) return score_buffer();
    return {};
}

std::vector<StreamEntry> StreamDetector::flush() { return score_buffer(); }

std::vector<StreamEntry> StreamDetector::score_buffer() {
    Timer timer;
    std::vector<StreamEntry> out;
    if (pending_.empty()) return out;

    std::vector<Verdict> verdicts;
    if (buffer_.rows > 0) verdicts = detect(ad_, nd_, buffer_);

    std::size_t row = 0;
    for (auto& entry : pending_) {
        if (entry.ok) {
            const bool unknown = entry.verdict.unknown_node;
            entry.verdict = verdicts[row++];
            entry.verdict.unknown_node = unknown;
        }
        out.push_back(std::move(entry));
    }
    stats_.flows += buffer_.rows;
    pending_.clear();
    buffer_.rows = 0;
    buffer_.values.clear();
    stats_.seconds += timer.elapsed();
    return out;
}

} // namespace zdt
