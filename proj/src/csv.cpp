#include "flexq/csv.hpp"

#include <cstdio>

namespace flexq {

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw Error("cannot open output file: " + path);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::comment_kv(const std::string& key, const std::string& value) {
    out_ << "# " << key << " = " << value << "\n";
}

void CsvWriter::metadata(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) comment_kv(k, v);
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
    if (!out_) throw Error("write failed: " + path_);
}

std::map<std::string, std::string> describe_model(const ModelParams& m) {
    std::map<std::string, std::string> kv;
    kv["lambda"] = fmt(m.lambda);
    kv["mu_low"] = fmt(m.mu_low);
    kv["mu_high"] = fmt(m.mu_high);
    kv["service_cost"] = fmt(m.service_cost);
    kv["reward"] = fmt(m.reward);
    kv["beta"] = fmt(m.beta);
    kv["holding"] = m.holding.describe();
    kv["reward_timing"] = m.timing == RewardTiming::AtAdmission ? "admission" : "departure";
    return kv;
}

void write_value_function_csv(const std::string& path, const ValueFunction& v,
                              const std::map<std::string, std::string>& metadata) {
    CsvWriter w(path);
    w.metadata(metadata);
    w.header({"x", "i", "value"});
    for (int x = 0; x <= v.x_max(); ++x)
        w.row({std::to_string(x), "0", fmt(v.v0[static_cast<size_t>(x)], 17)});
    for (int x = 0; x <= v.x_max(); ++x)
        w.row({std::to_string(x), "1", fmt(v.v1[static_cast<size_t>(x)], 17)});
}

} // namespace flexq
