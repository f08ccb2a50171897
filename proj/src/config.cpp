#include "flexq/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace flexq {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
    return true;
}

} // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": expected `key = value`, got: " << stripped;
            throw ConfigError(os.str());
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!valid_key(key)) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": bad key `" << key << "`";
            throw ConfigError(os.str());
        }
        if (value.empty()) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": empty value for key `" << key << "`";
            throw ConfigError(os.str());
        }
        cfg.values_[key] = value;
        cfg.lines_[key] = lineno;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_string(buf.str(), path);
}

void Config::set_override(const std::string& key_eq_value) {
    const size_t eq = key_eq_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value, got: " + key_eq_value);
    const std::string key = trim(key_eq_value.substr(0, eq));
    const std::string value = trim(key_eq_value.substr(eq + 1));
    if (!valid_key(key) || value.empty())
        throw ConfigError("override must be key=value, got: " + key_eq_value);
    set(key, value);
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
    lines_[key] = 0;
}

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not a number: " + s);
    }
}

int Config::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not an integer: " + s);
    }
}

uint64_t Config::get_u64(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key `" + key + "`: not an unsigned integer: " + s);
    }
}

bool Config::get_bool(const std::string& key) const {
    std::string s = get_string(key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("key `" + key + "`: not a boolean: " + s);
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const std::string s = get_string(key);
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("key `" + key + "`: bad list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("key `" + key + "`: empty list");
    return out;
}

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
int Config::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}
uint64_t Config::get_u64_or(const std::string& key, uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}
bool Config::get_bool_or(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

ModelParams model_from_config(const Config& cfg) {
    ModelParams m;
    m.lambda = cfg.get_double("lambda");
    m.mu_low = cfg.get_double("mu_low");
    m.mu_high = cfg.get_double("mu_high");
    m.service_cost = cfg.get_double("service_cost");
    m.reward = cfg.get_double("reward");
    m.beta = cfg.get_double("beta");

    const std::string timing = cfg.get_string_or("reward_timing", "admission");
    if (timing == "admission") m.timing = RewardTiming::AtAdmission;
    else if (timing == "departure") m.timing = RewardTiming::AtDeparture;
    else throw ConfigError("key `reward_timing`: expected admission or departure, got " + timing);

    const std::string variant = cfg.get_string("holding.variant");
    if (variant == "power") {
        m.holding = HoldingCost::power(cfg.get_double_or("holding.K", 1.0),
                                       cfg.get_double_or("holding.m", 1.0));
    } else if (variant == "exponential") {
        m.holding = HoldingCost::exponential(cfg.get_double("holding.K"),
                                             cfg.get_double("holding.rho"));
    } else if (variant == "tabular") {
        m.holding = HoldingCost::tabular(cfg.get_double_list("holding.values"));
    } else {
        throw ConfigError("key `holding.variant`: expected power, exponential or tabular, got " +
                          variant);
    }

    try {
        m.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
    return m;
}

} // namespace flexq
