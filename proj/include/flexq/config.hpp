#ifndef FLEXQ_CONFIG_HPP
#define FLEXQ_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexq/model.hpp"

namespace flexq {

/// Plain-text configuration: one `key = value` per line, `#` comments,
/// dotted keys for nesting (holding.variant = power).  Parse errors carry
/// line numbers; typed getters name the offending key.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    /// Applies a single `key=value` override (from --set); later wins.
    void set_override(const std::string& key_eq_value);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;
    uint64_t get_u64_or(const std::string& key, uint64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    /// All keys in sorted order, for reproducibility headers.
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::string origin_;
};

/// Builds and validates ModelParams from the model keys:
/// lambda, mu_low, mu_high, service_cost, reward, beta, reward_timing,
/// holding.variant (+ holding.K / holding.m / holding.rho / holding.values).
ModelParams model_from_config(const Config& cfg);

} // namespace flexq

#endif
