#include "zdt/flow.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace zdt {

namespace {

constexpr std::size_t kMaxReportedRowErrors = 20;

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, std::string_view name, std::string_view row) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw MalformedRowError("unparseable " + std::string(name) + " '" +
                                std::string(field) + "' in row: " + std::string(row));
    }
    return value;
}

void check_range(bool ok, std::string_view what, std::string_view row) {
    if (!ok) {
        throw RangeError(std::string(what) + " out of range in row: " + std::string(row));
    }
}

std::string double_to_string(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

FlowRecord parse_csv_record(std::string_view line) {
    auto fields = split_csv(line);
    if (fields.size() != 10) {
        throw MalformedRowError("expected 10 columns, got " + std::to_string(fields.size()) +
                                " in row: " + std::string(line));
    }
    FlowRecord r;
    r.timestamp = parse_number<double>(fields[0], "timestamp", line);
    r.src_ip = std::string(fields[1]);
    r.dst_ip = std::string(fields[2]);
    r.src_port = parse_number<int>(fields[3], "src_port", line);
    r.dst_port = parse_number<int>(fields[4], "dst_port", line);
    r.protocol = parse_number<int>(fields[5], "protocol", line);
    r.duration = parse_number<double>(fields[6], "duration", line);
    r.total_bytes = parse_number<std::int64_t>(fields[7], "total_bytes", line);
    r.packet_count = parse_number<std::int64_t>(fields[8], "packet_count", line);
    if (fields[9].empty()) {
        throw MalformedRowError("empty label in row: " + std::string(line));
    }
    r.label = AttackLabel::parse(fields[9]);
    validate_flow_record(r);
    return r;
}

FlowRecord parse_jsonl_record(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRowError("invalid json row: " + std::string(line));
    }
    if (!j.is_object()) {
        throw MalformedRowError("json row is not an object: " + std::string(line));
    }
    FlowRecord r;
    try {
        r.timestamp = j.at("timestamp").get<double>();
        r.src_ip = j.at("src_ip").get<std::string>();
        r.dst_ip = j.at("dst_ip").get<std::string>();
        r.src_port = j.at("src_port").get<int>();
        r.dst_port = j.at("dst_port").get<int>();
        r.protocol = j.at("protocol").get<int>();
        r.duration = j.at("duration").get<double>();
        r.total_bytes = j.at("total_bytes").get<std::int64_t>();
        r.packet_count = j.at("packet_count").get<std::int64_t>();
        std::string label = j.at("label").get<std::string>();
        if (label.empty()) {
            throw MalformedRowError("empty label in row: " + std::string(line));
        }
        r.label = AttackLabel::parse(label);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRowError(std::string("missing or mistyped field (") + e.what() +
                                ") in row: " + std::string(line));
    }
    validate_flow_record(r);
    return r;
}

} // namespace

const char* const kFlowCsvHeader =
    "timestamp,src_ip,dst_ip,src_port,dst_port,protocol,duration,total_bytes,packet_count,label";

AttackLabel AttackLabel::attack(std::string cls) {
    AttackLabel l;
    l.kind = LabelKind::kAttack;
    l.attack_class = lowercase(cls);
    return l;
}

AttackLabel AttackLabel::parse(std::string_view text) {
    std::string lc = lowercase(trim(text));
    if (lc == "benign") return benign();
    if (lc == "unlabeled") return unlabeled();
    return attack(lc);
}

std::string AttackLabel::to_string() const {
    switch (kind) {
    case LabelKind::kBenign: return "benign";
    case LabelKind::kUnlabeled: return "unlabeled";
    case LabelKind::kAttack: return attack_class;
    }
    return "benign";
}

const std::vector<std::string>& attack_taxonomy() {
    static const std::vector<std::string> classes = {
        "scanning",   "interrogation", "botnet",     "command_control", "exfiltration",
        "ransomware", "rat",           "infostealer", "worm",            "downloader"};
    return classes;
}

void validate_flow_record(const FlowRecord& r) {
    std::string row = flow_record_to_csv(r);
    if (r.src_ip.empty() || r.dst_ip.empty()) {
        throw MalformedRowError("empty src_ip or dst_ip in row: " + row);
    }
    check_range(std::isfinite(r.timestamp), "timestamp", row);
    check_range(r.src_port >= 0 && r.src_port <= 65535, "src_port", row);
    check_range(r.dst_port >= 0 && r.dst_port <= 65535, "dst_port", row);
    check_range(r.protocol >= 0 && r.protocol <= 255, "protocol", row);
    check_range(std::isfinite(r.duration) && r.duration >= 0.0, "duration", row);
    check_range(r.total_bytes >= 0, "total_bytes", row);
    check_range(r.packet_count >= 0, "packet_count", row);
    if (r.label.is_attack() && r.label.attack_class.empty()) {
        throw MalformedRowError("attack label with empty class in row: " + row);
    }
}

FlowRecord parse_flow_record(std::string_view line, FlowFormat format) {
    return format == FlowFormat::kCsv ? parse_csv_record(line) : parse_jsonl_record(line);
}

LoadResult load_dataset(const std::string& path, FlowFormat format,
                        const std::string& network_id, bool strict) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset file: " + path);
    }
    LoadResult result;
    result.dataset.network_id = network_id;

    std::string line;
    if (format == FlowFormat::kCsv) {
        if (!std::getline(in, line)) {
            throw SchemaError("missing header row in " + path);
        }
        auto cols = split_csv(line);
        auto expected = split_csv(kFlowCsvHeader);
        if (cols != expected) {
            std::string missing;
            for (auto e : expected) {
                if (std::find(cols.begin(), cols.end(), e) == cols.end()) {
                    missing += missing.empty() ? std::string(e) : "," + std::string(e);
                }
            }
            throw SchemaError("bad csv header in " + path +
                              (missing.empty() ? " (columns out of order or unexpected)"
                                               : " (missing column(s): " + missing + ")"));
        }
    }

    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        try {
            result.dataset.records.push_back(parse_flow_record(sv, format));
        } catch (const Error& e) {
            if (strict) throw;
            ++result.rejected_rows;
            if (result.row_errors.size() < kMaxReportedRowErrors) {
                result.row_errors.emplace_back(e.what());
            }
        }
    }
    return result;
}

std::string flow_record_to_csv(const FlowRecord& r) {
    std::string out;
    out += double_to_string(r.timestamp);
    out += ',';
    out += r.src_ip;
    out += ',';
    out += r.dst_ip;
    out += ',';
    out += std::to_string(r.src_port);
    out += ',';
    out += std::to_string(r.dst_port);
    out += ',';
    out += std::to_string(r.protocol);
    out += ',';
    out += double_to_string(r.duration);
    out += ',';
    out += std::to_string(r.total_bytes);
    out += ',';
    out += std::to_string(r.packet_count);
    out += ',';
    out += r.label.to_string();
    return out;
}

std::string flow_record_to_jsonl(const FlowRecord& r) {
    nlohmann::ordered_json j;
    j["timestamp"] = r.timestamp;
    j["src_ip"] = r.src_ip;
    j["dst_ip"] = r.dst_ip;
    j["src_port"] = r.src_port;
    j["dst_port"] = r.dst_port;
    j["protocol"] = r.protocol;
    j["duration"] = r.duration;
    j["total_bytes"] = r.total_bytes;
    j["packet_count"] = r.packet_count;
    j["label"] = r.label.to_string();
    return j.dump();
}

void save_dataset(const FlowDataset& ds, const std::string& path, FlowFormat format) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path);
    }
    if (format == FlowFormat::kCsv) {
        out << kFlowCsvHeader << '\n';
        for (const auto& r : ds.records) out << flow_record_to_csv(r) << '\n';
    } else {
        for (const auto& r : ds.records) out << flow_record_to_jsonl(r) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

SplitResult split_dataset(const FlowDataset& ds, double train_fraction, std::uint64_t seed) {
    if (ds.empty()) {
        throw EmptyDatasetError("cannot split an empty dataset");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0,1)");
    }
    const std::size_t n = ds.size();
    const auto train_size = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < train_size && i < n; ++i) in_train[order[i]] = true;

    SplitResult out;
    out.train.network_id = ds.network_id;
    out.test.network_id = ds.network_id;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? out.train : out.test).records.push_back(ds.records[i]);
    }
    return out;
}

FlowDataset filter_by_label(const FlowDataset& ds,
                            const std::function<bool(const AttackLabel&)>& pred) {
    FlowDataset out;
    out.network_id = ds.network_id;
    for (const auto& r : ds.records) {
        if (pred(r.label)) out.records.push_back(r);
    }
    return out;
}

} // namespace zdt
