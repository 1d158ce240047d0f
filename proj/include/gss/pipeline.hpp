#pragma once

#include <map>
#include <string>
#include <vector>

namespace gss {

// Line-oriented key=value configuration. Later set() calls override earlier
// values, so CLI flags are applied after the file.
struct RunConfig {
    std::map<std::string, std::string> kv;

    static RunConfig from_file(const std::string& path);
    void set_pair(const std::string& pair);  // "key=value"
    void set(const std::string& key, const std::string& value) { kv[key] = value; }

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    size_t get_size(const std::string& key, size_t fallback) const;
    double get_f64(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<size_t> get_size_list(const std::string& key,
                                      const std::vector<size_t>& fallback) const;
    std::vector<std::string> get_str_list(const std::string& key,
                                          const std::vector<std::string>& fallback) const;

    std::string echo() const;  // sorted key=value lines for report headers
};

// Subcommand bodies. Each throws gss::Error on failure; outputs land in the
// config's `out` directory (or stdout for pure reports).
void cmd_train(const RunConfig& cfg);
void cmd_embed(const RunConfig& cfg);
void cmd_extract(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_gen_data(const RunConfig& cfg);
void cmd_gen_mask(const RunConfig& cfg);
void cmd_js(const RunConfig& cfg);
void cmd_capacity(const RunConfig& cfg);
void cmd_steganalyze(const RunConfig& cfg);

}  // namespace gss
