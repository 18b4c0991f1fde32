#include "fpdn/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fpdn/errors.hpp"

namespace fpdn {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[section.empty() ? key : section + "." + key] = value;
    }
    return kv;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

int64_t parse_i64(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    long long n = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    return n;
}

double parse_f64(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    return x;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(key + ": empty element in list '" + value + "'");
        out.push_back(static_cast<int>(parse_i64(key, item)));
    }
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated integer list");
    return out;
}

void apply_config(const KeyValues& kv, RunConfig& cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "model.kind") cfg.model.kind = model_kind_from_name(value);
        else if (key == "model.height") cfg.model.in_h = static_cast<int>(parse_i64(key, value));
        else if (key == "model.width") cfg.model.in_w = static_cast<int>(parse_i64(key, value));
        else if (key == "model.encoder_filters") cfg.model.enc_filters = parse_int_list(key, value);
        else if (key == "model.wavelet_filters") cfg.model.wav_filters = parse_int_list(key, value);
        else if (key == "model.wavelet_levels") cfg.model.wavelet_levels = static_cast<int>(parse_i64(key, value));
        else if (key == "model.wavelet") cfg.model.wavelet = value;
        else if (key == "model.wavelet_file") cfg.model.wavelet_file = value;
        else if (key == "model.dense_hidden") cfg.model.dense_hidden = parse_int_list(key, value);
        else if (key == "model.init_seed") cfg.model.init_seed = static_cast<uint64_t>(parse_i64(key, value));
        else if (key == "train.batch_size") cfg.train.batch_size = static_cast<int>(parse_i64(key, value));
        else if (key == "train.learning_rate") cfg.train.learning_rate = parse_f64(key, value);
        else if (key == "train.epochs") cfg.train.max_epochs = static_cast<int>(parse_i64(key, value));
        else if (key == "train.lambda") cfg.train.lambda = parse_f64(key, value);
        else if (key == "train.loss_eps") cfg.train.loss_eps = parse_f64(key, value);
        else if (key == "train.optimizer") cfg.train.optimizer = value;
        else if (key == "train.sigma_min") cfg.train.sigma_min = parse_f64(key, value);
        else if (key == "train.sigma_max") cfg.train.sigma_max = parse_f64(key, value);
        else if (key == "train.clip_noise") cfg.train.clip_noise = parse_flag(key, value);
        else if (key == "run.seed") cfg.seed = static_cast<uint64_t>(parse_i64(key, value));
        else if (key == "run.out") cfg.out_dir = value;
        else if (key == "data.dir") cfg.data_dir = value;
        else if (key == "data.synthetic") cfg.synthetic_count = static_cast<int>(parse_i64(key, value));
        else if (key == "data.height") cfg.synth_height = static_cast<int>(parse_i64(key, value));
        else if (key == "data.width") cfg.synth_width = static_cast<int>(parse_i64(key, value));
        else throw ConfigError("unknown config key: " + key);
    }
}

std::string resolved_config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n";
    out << "kind = " << model_kind_name(cfg.model.kind) << "\n";
    out << "height = " << cfg.model.in_h << "\n";
    out << "width = " << cfg.model.in_w << "\n";
    out << "encoder_filters = " << join_ints(cfg.model.enc_filters) << "\n";
    out << "wavelet_filters = " << join_ints(cfg.model.wav_filters) << "\n";
    out << "wavelet_levels = " << cfg.model.wavelet_levels << "\n";
    out << "wavelet = " << cfg.model.wavelet << "\n";
    if (!cfg.model.wavelet_file.empty()) out << "wavelet_file = " << cfg.model.wavelet_file << "\n";
    out << "dense_hidden = " << join_ints(cfg.model.dense_hidden) << "\n";
    out << "init_seed = " << cfg.model.init_seed << "\n";
    out << "\n[train]\n";
    out << "batch_size = " << cfg.train.batch_size << "\n";
    out << "learning_rate = " << cfg.train.learning_rate << "\n";
    out << "epochs = " << cfg.train.max_epochs << "\n";
    out << "lambda = " << cfg.train.lambda << "\n";
    out << "loss_eps = " << cfg.train.loss_eps << "\n";
    out << "optimizer = " << cfg.train.optimizer << "\n";
    out << "sigma_min = " << cfg.train.sigma_min << "\n";
    out << "sigma_max = " << cfg.train.sigma_max << "\n";
    out << "clip_noise = " << (cfg.train.clip_noise ? "true" : "false") << "\n";
    out << "\n[run]\n";
    out << "seed = " << cfg.seed << "\n";
    out << "out = " << cfg.out_dir << "\n";
    out << "\n[data]\n";
    if (!cfg.data_dir.empty()) out << "dir = " << cfg.data_dir << "\n";
    out << "synthetic = " << cfg.synthetic_count << "\n";
    out << "height = " << cfg.synth_height << "\n";
    out << "width = " << cfg.synth_width << "\n";
    return out.str();
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write config echo: " + path);
    out << resolved_config_text(cfg);
    if (!out) throw IoError("failed writing config echo: " + path);
}

}  // namespace fpdn
