#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "fpdn/checkpoint.hpp"
#include "fpdn/loss.hpp"
#include "fpdn/metrics.hpp"
#include "fpdn/model.hpp"
#include "fpdn/noise.hpp"

namespace fpdn {

struct TrainConfig {
    int batch_size = 32;
    double learning_rate = 0.001;
    int max_epochs = 200;
    double lambda = 1e-3;       // KLD weight in the loss
    double loss_eps = 1e-8;
    std::string optimizer = "adam";  // or "sgd"
    double sigma_min = 100.0;        // per-sample sigma drawn uniformly from
    double sigma_max = 200.0;        // [sigma_min, sigma_max] each epoch
    bool clip_noise = false;
    uint64_t seed = 0;
    std::string checkpoint_path;     // best model written here on improvement
};

struct TrainResult {
    std::vector<HistoryRow> history;
    int best_epoch = -1;
    double best_val_loss = std::numeric_limits<double>::infinity();
    bool diverged = false;
};

struct EvalRow {
    std::string model;
    double sigma = 0, psnr = 0, ssim = 0, mse = 0, delta_psnr = 0;
};

// Adam with bias correction; "sgd" is plain gradient descent. Updates are
// elementwise, so lr = 0 is exactly a no-op for both.
template <class T>
class Optimizer {
public:
    Optimizer(std::string kind, double lr) : kind_(std::move(kind)), lr_(lr) {
        if (kind_ != "adam" && kind_ != "sgd")
            throw ConfigError("unknown optimizer '" + kind_ + "' (expected adam or sgd)");
    }

    void step(const std::vector<Var<T>>& params) {
        if (kind_ == "sgd") {
            for (auto& p : params)
                for (size_t j = 0; j < p->data.size(); ++j)
                    p->data[j] -= static_cast<T>(lr_ * static_cast<double>(p->grad[j]));
            return;
        }
        if (m_.empty()) {
            for (auto& p : params) {
                m_.emplace_back(p->data.size(), T(0));
                v_.emplace_back(p->data.size(), T(0));
            }
        }
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, t_);
        const double c2 = 1.0 - std::pow(kBeta2, t_);
        for (size_t i = 0; i < params.size(); ++i) {
            auto& p = *params[i];
            for (size_t j = 0; j < p.data.size(); ++j) {
                const double g = static_cast<double>(p.grad[j]);
                const double m = kBeta1 * static_cast<double>(m_[i][j]) + (1.0 - kBeta1) * g;
                const double v = kBeta2 * static_cast<double>(v_[i][j]) + (1.0 - kBeta2) * g * g;
                m_[i][j] = static_cast<T>(m);
                v_[i][j] = static_cast<T>(v);
                p.data[j] -=
                    static_cast<T>(lr_ * (m / c1) / (std::sqrt(v / c2) + kEps));
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    std::string kind_;
    double lr_;
    int64_t t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

namespace train_detail {

template <class T>
Var<T> image_var(const Image& img) {
    auto x = make_var<T>({1, img.h, img.w});
    for (size_t i = 0; i < img.v.size(); ++i) x->data[i] = static_cast<T>(img.v[i]);
    return x;
}

template <class T>
Image var_image(const Var<T>& x) {
    Image img(x->shape[1], x->shape[2]);
    for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = static_cast<float>(x->data[i]);
    return img;
}

// One deterministic stream per (purpose, epoch/sigma slot, image index).
inline NoiseSpec draw_noise(uint64_t seed, uint64_t stream, uint64_t index, double sigma_min,
                            double sigma_max, bool clip) {
    Rng pick(mix_seed(mix_seed(seed, stream), index));
    NoiseSpec spec;
    spec.sigma = sigma_min == sigma_max ? sigma_min : pick.uniform(sigma_min, sigma_max);
    spec.seed = pick.next();
    spec.clip = clip;
    return spec;
}

constexpr uint64_t kTrainStream = 0x54520000;  // + epoch
constexpr uint64_t kValStream = 0x56414c00;
constexpr uint64_t kEvalStream = 0x45560000;   // + sigma slot

}  // namespace train_detail

// Runs the optimization loop; on return the model carries the parameters of
// the best validation epoch. When checkpoint_path is set the best model is
// also written there at every improvement, so a later divergence still
// leaves the last good checkpoint on disk.
template <class T>
TrainResult train(Model<T>& model, const std::vector<Image>& train_set,
                  const std::vector<Image>& val_set, const TrainConfig& cfg) {
    namespace td = train_detail;
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (!(cfg.learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
    if (train_set.empty() || val_set.empty())
        throw ConfigError("train and validation sets must be non-empty");

    auto params = model.params();
    Optimizer<T> opt(cfg.optimizer, cfg.learning_rate);

    // the validation degradation is fixed once so epochs are comparable
    std::vector<Image> val_noisy;
    val_noisy.reserve(val_set.size());
    for (size_t i = 0; i < val_set.size(); ++i)
        val_noisy.push_back(add_awgn(
            val_set[i], td::draw_noise(cfg.seed, td::kValStream, i, cfg.sigma_min,
                                       cfg.sigma_max, cfg.clip_noise)));

    auto validate = [&]() {
        Tape<T> tape;
        tape.set_recording(false);
        double loss_sum = 0, psnr_sum = 0;
        for (size_t i = 0; i < val_set.size(); ++i) {
            auto out = model.forward(tape, td::image_var<T>(val_noisy[i]));
            auto lt = reconstruction_loss(tape, out, td::image_var<T>(val_set[i]),
                                          static_cast<T>(cfg.lambda),
                                          static_cast<T>(cfg.loss_eps));
            loss_sum += static_cast<double>(lt.total->data[0]);
            psnr_sum += psnr(td::var_image(out), val_set[i]);
        }
        return std::pair<double, double>{loss_sum / val_set.size(),
                                         psnr_sum / val_set.size()};
    };

    TrainResult res;
    std::vector<std::vector<T>> best_params;
    std::vector<int> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, 0xE70000 + static_cast<uint64_t>(epoch)));
        for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
            std::swap(order[i],
                      order[static_cast<int>(shuffle_rng.below(static_cast<uint64_t>(i) + 1))]);

        double epoch_loss = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            const T inv_batch = T(1) / static_cast<T>(end - start);
            for (auto& p : params) p->zero_grad();
            for (size_t k = start; k < end; ++k) {
                const int idx = order[k];
                const Image& clean = train_set[idx];
                const Image noisy = add_awgn(
                    clean, td::draw_noise(cfg.seed,
                                          td::kTrainStream + static_cast<uint64_t>(epoch),
                                          static_cast<uint64_t>(idx), cfg.sigma_min,
                                          cfg.sigma_max, cfg.clip_noise));
                Tape<T> tape;
                auto out = model.forward(tape, td::image_var<T>(noisy));
                auto lt = reconstruction_loss(tape, out, td::image_var<T>(clean),
                                              static_cast<T>(cfg.lambda),
                                              static_cast<T>(cfg.loss_eps));
                epoch_loss += static_cast<double>(lt.total->data[0]);
                tape.backward(ops::mul_const(tape, lt.total, inv_batch));
            }
            opt.step(params);
        }
        epoch_loss /= static_cast<double>(train_set.size());

        const auto [val_loss, val_psnr] = validate();
        res.history.push_back({epoch + 1, epoch_loss, val_loss, val_psnr});

        if (!std::isfinite(epoch_loss) || !std::isfinite(val_loss)) {
            res.diverged = true;
            break;
        }
        if (val_loss < res.best_val_loss) {
            res.best_val_loss = val_loss;
            res.best_epoch = epoch + 1;
            best_params.clear();
            for (auto& p : params) best_params.push_back(p->data);
            if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, model, res.history);
        }
    }

    if (!best_params.empty())
        for (size_t i = 0; i < params.size(); ++i) params[i]->data = best_params[i];
    return res;
}

// Denoise one image with a trained model (no gradient bookkeeping).
template <class T>
Image denoise_image(const Model<T>& model, const Image& noisy) {
    Tape<T> tape;
    tape.set_recording(false);
    return train_detail::var_image(model.forward(tape, train_detail::image_var<T>(noisy)));
}

// Per sigma: metrics of the noisy images and of the model's reconstructions
// against clean, averaged over the test set, with fixed per-image noise
// seeds. delta_psnr is each row's PSNR gain over the noisy baseline.
template <class T>
std::vector<EvalRow> evaluate(const Model<T>& model, const std::vector<Image>& test_set,
                              const std::vector<double>& sigmas, uint64_t seed,
                              bool clip_noise = false) {
    namespace td = train_detail;
    if (test_set.empty()) throw ConfigError("evaluate: empty test set");
    if (sigmas.empty()) throw ConfigError("evaluate: empty sigma list");

    std::vector<EvalRow> rows;
    for (size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        double n_psnr = 0, n_ssim = 0, n_mse = 0;
        double m_psnr = 0, m_ssim = 0, m_mse = 0;
        for (size_t i = 0; i < test_set.size(); ++i) {
            const Image& clean = test_set[i];
            auto spec = td::draw_noise(seed, td::kEvalStream + si, i, sigma, sigma, clip_noise);
            const Image noisy = add_awgn(clean, spec);
            n_psnr += psnr(noisy, clean);
            n_ssim += ssim(noisy, clean).value;
            n_mse += mse(noisy, clean);
            const Image den = denoise_image(model, noisy);
            m_psnr += psnr(den, clean);
            m_ssim += ssim(den, clean).value;
            m_mse += mse(den, clean);
        }
        const double n = static_cast<double>(test_set.size());
        EvalRow noisy_row{"noisy", sigma, n_psnr / n, n_ssim / n, n_mse / n, 0.0};
        EvalRow model_row{model_kind_name(model.cfg.kind), sigma, m_psnr / n, m_ssim / n,
                          m_mse / n, m_psnr / n - n_psnr / n};
        rows.push_back(noisy_row);
        rows.push_back(model_row);
    }
    return rows;
}

}  // namespace fpdn
