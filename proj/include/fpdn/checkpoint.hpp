#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fpdn/model.hpp"

namespace fpdn {

// Binary checkpoint: "RWAE" magic, u32 format version, the model config as a
// length-prefixed text block, the training history, then every parameter
// tensor in declaration order as a shape header plus 32-bit little-endian
// floats. Writes go to a temp file renamed into place, so a crash never
// leaves a partial checkpoint behind.

struct HistoryRow {
    int epoch = 0;
    double train_loss = 0, val_loss = 0, val_psnr = 0;
};

inline std::string model_config_to_text(const ModelConfig& cfg) {
    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    std::ostringstream os;
    os << "kind " << model_kind_name(cfg.kind) << "\n";
    os << "in_h " << cfg.in_h << "\n";
    os << "in_w " << cfg.in_w << "\n";
    os << "enc_filters " << join(cfg.enc_filters) << "\n";
    os << "wav_filters " << join(cfg.wav_filters) << "\n";
    os << "wavelet_levels " << cfg.wavelet_levels << "\n";
    os << "wavelet " << cfg.wavelet << "\n";
    if (!cfg.wavelet_file.empty()) os << "wavelet_file " << cfg.wavelet_file << "\n";
    os << "dense_hidden " << join(cfg.dense_hidden) << "\n";
    os << "init_seed " << cfg.init_seed << "\n";
    return os.str();
}

inline ModelConfig model_config_from_text(const std::string& text) {
    auto split_ints = [](const std::string& s) {
        std::vector<int> v;
        std::istringstream is(s);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty()) v.push_back(std::stoi(tok));
        return v;
    };
    ModelConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        const std::string key = line.substr(0, sp);
        const std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
        if (key == "kind") cfg.kind = model_kind_from_name(val);
        else if (key == "in_h") cfg.in_h = std::stoi(val);
        else if (key == "in_w") cfg.in_w = std::stoi(val);
        else if (key == "enc_filters") cfg.enc_filters = split_ints(val);
        else if (key == "wav_filters") cfg.wav_filters = split_ints(val);
        else if (key == "wavelet_levels") cfg.wavelet_levels = std::stoi(val);
        else if (key == "wavelet") cfg.wavelet = val;
        else if (key == "wavelet_file") cfg.wavelet_file = val;
        else if (key == "dense_hidden") cfg.dense_hidden = split_ints(val);
        else if (key == "init_seed") cfg.init_seed = std::stoull(val);
        else throw IncompatibleError("checkpoint config has unknown field '" + key + "'");
    }
    return cfg;
}

namespace ckpt_detail {

constexpr uint32_t kVersion = 1;

inline void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<char*>(b), 4);
}

inline uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated checkpoint: " + path);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<char*>(b), 8);
}

inline double get_f64(std::istream& is, const std::string& path) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated checkpoint: " + path);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

inline void put_f32(std::ostream& os, float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(os, u);
}

inline float get_f32(std::istream& is, const std::string& path) {
    const uint32_t u = get_u32(is, path);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

}  // namespace ckpt_detail

template <class T>
void save_checkpoint(const std::string& path, const Model<T>& model,
                     const std::vector<HistoryRow>& history = {}) {
    namespace d = ckpt_detail;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw IoError("cannot write checkpoint: " + path);
        os.write("RWAE", 4);
        d::put_u32(os, d::kVersion);
        const std::string cfg_text = model_config_to_text(model.cfg);
        d::put_u32(os, static_cast<uint32_t>(cfg_text.size()));
        os.write(cfg_text.data(), static_cast<std::streamsize>(cfg_text.size()));
        d::put_u32(os, static_cast<uint32_t>(history.size()));
        for (const auto& row : history) {
            d::put_u32(os, static_cast<uint32_t>(row.epoch));
            d::put_f64(os, row.train_loss);
            d::put_f64(os, row.val_loss);
            d::put_f64(os, row.val_psnr);
        }
        const auto params = model.params();
        d::put_u32(os, static_cast<uint32_t>(params.size()));
        for (const auto& p : params) {
            d::put_u32(os, static_cast<uint32_t>(p->shape.size()));
            for (int dim : p->shape) d::put_u32(os, static_cast<uint32_t>(dim));
            for (T v : p->data) d::put_f32(os, static_cast<float>(v));
        }
        if (!os) throw IoError("failed writing checkpoint: " + path);
    }
    std::filesystem::rename(tmp, path);
}

template <class T>
Model<T> load_checkpoint(const std::string& path, std::vector<HistoryRow>* history = nullptr) {
    namespace d = ckpt_detail;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "RWAE", 4) != 0)
        throw IncompatibleError(path + " is not a checkpoint file");
    const uint32_t version = d::get_u32(is, path);
    if (version != d::kVersion)
        throw IncompatibleError(path + ": unsupported checkpoint version " +
                                std::to_string(version));
    const uint32_t cfg_len = d::get_u32(is, path);
    std::string cfg_text(cfg_len, '\0');
    if (!is.read(cfg_text.data(), cfg_len)) throw IoError("truncated checkpoint: " + path);

    const uint32_t n_hist = d::get_u32(is, path);
    std::vector<HistoryRow> hist(n_hist);
    for (auto& row : hist) {
        row.epoch = static_cast<int>(d::get_u32(is, path));
        row.train_loss = d::get_f64(is, path);
        row.val_loss = d::get_f64(is, path);
        row.val_psnr = d::get_f64(is, path);
    }
    if (history) *history = std::move(hist);

    Model<T> model(model_config_from_text(cfg_text));
    const auto params = model.params();
    const uint32_t n_tensors = d::get_u32(is, path);
    if (n_tensors != params.size())
        throw IncompatibleError(path + ": expected " + std::to_string(params.size()) +
                                " tensors, file has " + std::to_string(n_tensors));
    for (const auto& p : params) {
        const uint32_t ndims = d::get_u32(is, path);
        std::vector<int> shape(ndims);
        for (auto& dim : shape) dim = static_cast<int>(d::get_u32(is, path));
        if (shape != p->shape)
            throw IncompatibleError(path + ": tensor shape mismatch against config");
        for (auto& v : p->data) v = static_cast<T>(d::get_f32(is, path));
    }
    return model;
}

}  // namespace fpdn
