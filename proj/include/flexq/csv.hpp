#ifndef FLEXQ_CSV_HPP
#define FLEXQ_CSV_HPP

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "flexq/errors.hpp"
#include "flexq/solver.hpp"

namespace flexq {

/// Deterministic double formatting for byte-stable CSV output.
std::string fmt(double v, int precision = 12);

/// CSV writer: `#`-prefixed metadata lines first (the fully resolved
/// parameter set), then a header row, then data rows.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& line);
    void comment_kv(const std::string& key, const std::string& value);
    void metadata(const std::map<std::string, std::string>& kv);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::string path_;
};

/// Resolved model parameters as sorted key/value text, for CSV headers.
std::map<std::string, std::string> describe_model(const ModelParams& m);

/// Serializes a value function as `x,i,value` rows.
void write_value_function_csv(const std::string& path, const ValueFunction& v,
                              const std::map<std::string, std::string>& metadata);

} // namespace flexq

#endif
