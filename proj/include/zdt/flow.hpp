#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "zdt/errors.hpp"

namespace zdt {

enum class LabelKind { kBenign, kAttack, kUnlabeled };

// Flow label: benign, a named attack class, or unlabeled (inference data).
// Attack class strings are lowercase; unknown classes are carried verbatim
// so new taxonomies need no code change.
struct AttackLabel {
    LabelKind kind = LabelKind::kBenign;
    std::string attack_class; // non-empty iff kind == kAttack

    static AttackLabel benign() { return {LabelKind::kBenign, {}}; }
    static AttackLabel unlabeled() { return {LabelKind::kUnlabeled, {}}; }
    static AttackLabel attack(std::string cls);

    // "benign" / "unlabeled" / anything else -> attack class, lowercased.
    static AttackLabel parse(std::string_view text);
    std::string to_string() const;

    bool is_benign() const { return kind == LabelKind::kBenign; }
    bool is_attack() const { return kind == LabelKind::kAttack; }
    bool is_unlabeled() const { return kind == LabelKind::kUnlabeled; }

    bool operator==(const AttackLabel&) const = default;
};

// Attack classes used by the bundled synthetic templates. Parsing does not
// restrict labels to this list.
const std::vector<std::string>& attack_taxonomy();

struct FlowRecord {
    double timestamp = 0.0; // seconds since epoch
    std::string src_ip;
    std::string dst_ip;
    int src_port = 0;
    int dst_port = 0;
    int protocol = 0; // e.g. 6=TCP, 17=UDP
    double duration = 0.0;
    std::int64_t total_bytes = 0;
    std::int64_t packet_count = 0;
    AttackLabel label;

    bool operator==(const FlowRecord&) const = default;
};

// Throws RangeError / MalformedRowError when an invariant is violated.
void validate_flow_record(const FlowRecord& r);

struct FlowDataset {
    std::vector<FlowRecord> records;
    std::string network_id;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

enum class FlowFormat { kCsv, kJsonl };

// Exact CSV header; JSONL objects use the same field names.
extern const char* const kFlowCsvHeader;

FlowRecord parse_flow_record(std::string_view line, FlowFormat format);

struct LoadResult {
    FlowDataset dataset;
    std::size_t rejected_rows = 0;
    std::vector<std::string> row_errors; // capped; rejected_rows is the full count
};

// Non-strict mode skips bad rows and reports them; strict mode throws on the
// first bad row.
LoadResult load_dataset(const std::string& path, FlowFormat format,
                        const std::string& network_id, bool strict = false);

void save_dataset(const FlowDataset& ds, const std::string& path, FlowFormat format);

std::string flow_record_to_csv(const FlowRecord& r);
std::string flow_record_to_jsonl(const FlowRecord& r);

struct SplitResult {
    FlowDataset train;
    FlowDataset test;
};

// Seeded random partition; |train| = round(train_fraction * N). Record order
// within each side follows the input dataset.
SplitResult split_dataset(const FlowDataset& ds, double train_fraction,
                          std::uint64_t seed);

FlowDataset filter_by_label(const FlowDataset& ds,
                            const std::function<bool(const AttackLabel&)>& pred);

} // namespace zdt
