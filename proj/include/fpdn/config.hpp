#pragma once

#include <map>
#include <string>
#include <vector>

#include "fpdn/model.hpp"
#include "fpdn/train.hpp"

namespace fpdn {

// Everything a run needs, resolved from defaults, then an optional config
// file, then command-line flags (later sources win).
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    uint64_t seed = 0;
    std::string out_dir = "out";
    std::string data_dir;        // empty selects synthetic data
    int synthetic_count = 128;
    int synth_height = 103, synth_width = 96;
};

using KeyValues = std::map<std::string, std::string>;

// "key = value" lines under optional [section] headers; '#' starts a
// comment. Keys are returned as "section.key".
KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

// Applies recognized keys onto cfg; unknown keys or unparsable values raise
// ConfigError naming the key.
void apply_config(const KeyValues& kv, RunConfig& cfg);

// Echo of the fully resolved configuration, readable back by
// parse_config_text.
std::string resolved_config_text(const RunConfig& cfg);
void write_resolved_config(const std::string& path, const RunConfig& cfg);

int64_t parse_i64(const std::string& key, const std::string& value);
double parse_f64(const std::string& key, const std::string& value);
bool parse_flag(const std::string& key, const std::string& value);
std::vector<int> parse_int_list(const std::string& key, const std::string& value);

}  // namespace fpdn
