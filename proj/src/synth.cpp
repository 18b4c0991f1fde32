#include "fpdn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "fpdn/image_io.hpp"
#include "fpdn/rng.hpp"

namespace fpdn {

namespace {

constexpr int kKernel = 11;
constexpr int kHalf = kKernel / 2;
constexpr int kBins = 16;

// Oriented Gabor, zero-mean and L2-normalized so iterated filtering neither
// drifts nor explodes.
std::vector<double> gabor_kernel(double theta, double freq) {
    std::vector<double> k(kKernel * kKernel);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double sg = 3.0;
    double sum = 0.0;
    for (int dy = -kHalf; dy <= kHalf; ++dy)
        for (int dx = -kHalf; dx <= kHalf; ++dx) {
            const double u = dx * ct + dy * st;
            const double env = std::exp(-(dx * dx + dy * dy) / (2.0 * sg * sg));
            const double v = env * std::cos(freq * u);
            k[(dy + kHalf) * kKernel + (dx + kHalf)] = v;
            sum += v;
        }
    const double mean = sum / k.size();
    double norm = 0.0;
    for (auto& v : k) {
        v -= mean;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : k) v /= norm;
    return k;
}

void normalize_std(std::vector<double>& img) {
    double mean = 0.0;
    for (double v : img) mean += v;
    mean /= img.size();
    double var = 0.0;
    for (double v : img) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / img.size());
    if (sd < 1e-12) return;
    for (auto& v : img) v = (v - mean) / sd;
}

}  // namespace

Image synth_fingerprint(int h, int w, uint64_t seed) {
    Rng rng(seed);

    // smooth orientation field via a coarse doubled-angle vector grid
    const int gh = h / 24 + 3, gw = w / 24 + 3;
    Mat<float> gc(gh, gw), gs(gh, gw);
    for (int i = 0; i < gh * gw; ++i) {
        const double a = rng.uniform(0.0, 6.283185307179586);
        gc.v[i] = static_cast<float>(std::cos(a));
        gs.v[i] = static_cast<float>(std::sin(a));
    }
    const auto fc = bilinear_resize(gc, h, w);
    const auto fs = bilinear_resize(gs, h, w);
    std::vector<int> bin(static_cast<size_t>(h) * w);
    for (size_t i = 0; i < bin.size(); ++i) {
        double th = 0.5 * std::atan2(static_cast<double>(fs.v[i]), static_cast<double>(fc.v[i]));
        if (th < 0) th += 3.141592653589793;
        int b = static_cast<int>(th / 3.141592653589793 * kBins);
        bin[i] = std::min(b, kBins - 1);
    }

    const double period = rng.uniform(4.2, 5.8);
    const double freq = 2.0 * 3.141592653589793 / period;
    std::vector<std::vector<double>> kernels(kBins);
    for (int b = 0; b < kBins; ++b)
        kernels[b] = gabor_kernel((b + 0.5) * 3.141592653589793 / kBins, freq);

    std::vector<double> img(static_cast<size_t>(h) * w), tmp(img.size());
    for (auto& v : img) v = rng.uniform(-1.0, 1.0);

    for (int pass = 0; pass < 5; ++pass) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const auto& k = kernels[bin[static_cast<size_t>(y) * w + x]];
                double acc = 0.0;
                for (int dy = -kHalf; dy <= kHalf; ++dy) {
                    const int sy = std::clamp(y + dy, 0, h - 1);
                    for (int dx = -kHalf; dx <= kHalf; ++dx) {
                        const int sx = std::clamp(x + dx, 0, w - 1);
                        acc += k[(dy + kHalf) * kKernel + (dx + kHalf)] *
                               img[static_cast<size_t>(sy) * w + sx];
                    }
                }
                tmp[static_cast<size_t>(y) * w + x] = acc;
            }
        img.swap(tmp);
        normalize_std(img);
    }

    Image out(h, w);
    for (size_t i = 0; i < img.size(); ++i)
        out.v[i] = static_cast<float>(0.5 + 0.4 * std::tanh(1.6 * img[i]));
    return out;
}

void synth_dataset(const std::string& out_dir, int count, int h, int w, uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    char name[32];
    for (int i = 0; i < count; ++i) {
        std::snprintf(name, sizeof(name), "fp_%04d.pgm", i);
        const auto img = synth_fingerprint(h, w, mix_seed(seed, static_cast<uint64_t>(i)));
        write_pgm((std::filesystem::path(out_dir) / name).string(), img);
    }
}

}  // namespace fpdn
