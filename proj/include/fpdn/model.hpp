#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpdn/layers.hpp"
#include "fpdn/wavelet.hpp"

namespace fpdn {

enum class ModelKind { dense_nn, autoencoder, wcae, res_wcae };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::dense_nn: return "dense_nn";
        case ModelKind::autoencoder: return "autoencoder";
        case ModelKind::wcae: return "wcae";
        case ModelKind::res_wcae: return "res_wcae";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "dense_nn") return ModelKind::dense_nn;
    if (s == "autoencoder") return ModelKind::autoencoder;
    if (s == "wcae") return ModelKind::wcae;
    if (s == "res_wcae") return ModelKind::res_wcae;
    throw ConfigError("unknown model '" + s +
                      "' (expected dense_nn, autoencoder, wcae or res_wcae)");
}

struct ModelConfig {
    ModelKind kind = ModelKind::res_wcae;
    int in_h = 103, in_w = 96;
    std::vector<int> enc_filters = {32, 64, 128, 256};  // stride-2 stages
    std::vector<int> wav_filters = {16, 32, 64};        // stride-1 stages on the pyramid
    int wavelet_levels = 3;
    std::string wavelet = "sym4";
    std::string wavelet_file;                            // overrides `wavelet` when set
    std::vector<int> dense_hidden = {1024, 256, 1024};   // dense_nn only
    uint64_t init_seed = 1;
};

// The four architectures share one implementation: a strided conv encoder,
// an optional wavelet-pyramid encoder conditioning the bottleneck, and a
// transpose-conv decoder with optional encoder skip connections.
//
//   dense_nn:     fully connected autoencoder on the flattened image
//   autoencoder:  conv encoder/decoder only
//   wcae:         + wavelet conditioning at the bottleneck
//   res_wcae:     + skip connections from encoder stages into the decoder
template <class T>
struct Model {
    ModelConfig cfg;
    FilterBank fb;

    std::vector<ConvLayer<T>> enc;
    std::vector<ConvLayer<T>> wav_enc;
    std::vector<TransposeConvLayer<T>> dec;
    std::optional<ConvLayer<T>> out_conv;
    std::vector<DenseLayer<T>> fc;

    explicit Model(ModelConfig c) : cfg(std::move(c)) {
        Rng rng(cfg.init_seed);
        const bool has_wavelet = cfg.kind == ModelKind::wcae || cfg.kind == ModelKind::res_wcae;
        const bool has_skips = cfg.kind == ModelKind::res_wcae;

        if (cfg.kind == ModelKind::dense_nn) {
            const int flat = cfg.in_h * cfg.in_w;
            int prev = flat;
            for (int hdim : cfg.dense_hidden) {
                fc.emplace_back(prev, hdim, rng);
                prev = hdim;
            }
            fc.emplace_back(prev, flat, rng);
            return;
        }

        if (cfg.enc_filters.size() < 2)
            throw ConfigError("model needs at least 2 encoder stages");
        if (has_wavelet) {
            if (cfg.wavelet_levels < 1) throw ConfigError("wavelet_levels must be >= 1");
            fb = cfg.wavelet_file.empty() ? builtin_filter_bank(cfg.wavelet)
                                          : load_filter_bank(cfg.wavelet_file);
            // dry run of the level-size chain so a bad input size fails at
            // construction, not mid-epoch
            int h = cfg.in_h, w = cfg.in_w;
            for (int l = 1; l <= cfg.wavelet_levels; ++l) {
                if (h < fb.length() || w < fb.length())
                    throw DimensionError(
                        "input " + std::to_string(cfg.in_h) + "x" + std::to_string(cfg.in_w) +
                        " too small for wavelet level " + std::to_string(l) + " (needs >= " +
                        std::to_string(fb.length()) + " per side)");
                h = (h + 1) / 2;
                w = (w + 1) / 2;
            }
        }

        int ch = 1;
        for (int f : cfg.enc_filters) {
            enc.emplace_back(ch, f, 2, rng);
            ch = f;
        }
        if (has_wavelet) {
            int wch = 3 * cfg.wavelet_levels + 1;
            for (int f : cfg.wav_filters) {
                wav_enc.emplace_back(wch, f, 1, rng);
                wch = f;
            }
        }

        const int n = static_cast<int>(cfg.enc_filters.size());
        int in_ch = cfg.enc_filters[n - 1] + (has_wavelet && !cfg.wav_filters.empty()
                                                  ? cfg.wav_filters.back()
                                                  : has_wavelet ? 3 * cfg.wavelet_levels + 1 : 0);
        for (int j = 0; j < n - 1; ++j) {
            const int out_ch = cfg.enc_filters[n - 2 - j];
            dec.emplace_back(in_ch, out_ch, 2, rng);
            in_ch = out_ch + (has_skips ? out_ch : 0);
        }
        out_conv.emplace(in_ch, 1, 1, rng);
    }

    // Diagnostic switches for probing what each pathway contributes.
    struct Ablation {
        bool zero_wavelet_details = false;  // keep only the approximation band
        bool zero_skips = false;            // feed zeros where skips concatenate
    };

    // x is a 1 x H x W tensor on the [0, 1] scale.
    Var<T> forward(Tape<T>& tape, const Var<T>& x, const Ablation& ab = {}) const {
        if (x->shape.size() != 3 || x->shape[0] != 1 || x->shape[1] != cfg.in_h ||
            x->shape[2] != cfg.in_w)
            throw ContractError("model input must be 1x" + std::to_string(cfg.in_h) + "x" +
                                std::to_string(cfg.in_w) + ", got " + x->shape_str());

        if (cfg.kind == ModelKind::dense_nn) {
            auto h = ops::reshape(tape, x, {x->shape[1] * x->shape[2]});
            for (size_t i = 0; i < fc.size(); ++i) {
                h = fc[i](tape, h);
                h = i + 1 < fc.size() ? ops::relu(tape, h) : ops::sigmoid(tape, h);
            }
            return ops::reshape(tape, h, x->shape);
        }

        const bool has_wavelet = cfg.kind == ModelKind::wcae || cfg.kind == ModelKind::res_wcae;
        const bool has_skips = cfg.kind == ModelKind::res_wcae;

        std::vector<Var<T>> ys;
        auto h = x;
        for (const auto& layer : enc) {
            h = ops::relu(tape, layer(tape, h));
            ys.push_back(h);
        }

        auto cond = ys.back();
        if (has_wavelet) {
            auto wx = pack_input(x, ab.zero_wavelet_details);
            auto wh = wx;
            for (const auto& layer : wav_enc) wh = ops::relu(tape, layer(tape, wh));
            wh = ops::bilinear_resize(tape, wh, cond->shape[1], cond->shape[2]);
            cond = ops::concat_channels(tape, cond, wh);
        }

        const int n = static_cast<int>(enc.size());
        auto d = cond;
        for (int j = 0; j < n - 1; ++j) {
            const auto& skip = ys[n - 2 - j];
            d = ops::relu(tape, dec[j](tape, d, skip->shape[1], skip->shape[2]));
            if (has_skips)
                d = ops::concat_channels(tape, d,
                                         ab.zero_skips ? make_var<T>(skip->shape) : skip);
        }
        d = ops::bilinear_resize(tape, d, x->shape[1], x->shape[2]);
        return ops::sigmoid(tape, (*out_conv)(tape, d));
    }

    std::vector<Var<T>> params() const {
        std::vector<Var<T>> ps;
        auto take = [&](const auto& layer) {
            for (auto& p : layer.params()) ps.push_back(p);
        };
        for (const auto& l : enc) take(l);
        for (const auto& l : wav_enc) take(l);
        for (const auto& l : dec) take(l);
        if (out_conv) take(*out_conv);
        for (const auto& l : fc) take(l);
        return ps;
    }

    int64_t param_count() const {
        int64_t n = 0;
        for (const auto& p : params()) n += p->size();
        return n;
    }

private:
    // The pyramid is a fixed function of the input pixels, so its channels
    // enter the graph as constants.
    Var<T> pack_input(const Var<T>& x, bool zero_details = false) const {
        Mat<T> img(x->shape[1], x->shape[2]);
        img.v = x->data;
        const auto pyr = decompose(img, cfg.wavelet_levels, fb);
        const auto ch = pack_pyramid(pyr);
        auto out = make_var<T>({static_cast<int>(ch.size()), ch[0].h, ch[0].w});
        size_t off = 0;
        for (size_t i = 0; i < ch.size(); ++i) {
            if (!(zero_details && i > 0))  // plane 0 is the approximation
                std::copy(ch[i].v.begin(), ch[i].v.end(), out->data.begin() + off);
            off += ch[i].v.size();
        }
        return out;
    }
};

}  // namespace fpdn
