#include "fpdn/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "fpdn/errors.hpp"

namespace fpdn {

namespace {

std::vector<double> gaussian_window(int n, double sigma) {
    std::vector<double> w(n);
    const double c = (n - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
}

// Valid-mode separable filtering: rows then columns.
void filter_valid(const std::vector<double>& src, int h, int w, const std::vector<double>& win,
                  std::vector<double>& dst) {
    const int n = static_cast<int>(win.size());
    const int ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(static_cast<size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += win[j] * src[static_cast<size_t>(y) * w + x + j];
            tmp[static_cast<size_t>(y) * ow + x] = acc;
        }
    dst.assign(static_cast<size_t>(oh) * ow, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += win[i] * tmp[static_cast<size_t>(y + i) * ow + x];
            dst[static_cast<size_t>(y) * ow + x] = acc;
        }
}

void check_dims(const char* who, const Image& a, const Image& b) {
    if (!same_dims(a, b))
        throw DimensionError(std::string(who) + ": image dims " + std::to_string(a.h) + "x" +
                             std::to_string(a.w) + " vs " + std::to_string(b.h) + "x" +
                             std::to_string(b.w));
}

}  // namespace

double mse(const Image& a, const Image& b) {
    check_dims("mse", a, b);
    double acc = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = static_cast<double>(a.v[i]) - static_cast<double>(b.v[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.v.size());
}

double psnr_from_mse(double mse_value) {
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(mse_value);
}

double psnr(const Image& a, const Image& b) { return psnr_from_mse(mse(a, b)); }

SsimResult ssim(const Image& a, const Image& b) {
    check_dims("ssim", a, b);
    constexpr double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
    SsimResult res;
    int n = std::min({11, a.h, a.w});
    if (n % 2 == 0) --n;
    res.truncated_window = n < 11;
    const auto win = gaussian_window(n, 1.5);

    const size_t sz = a.v.size();
    std::vector<double> xa(sz), xb(sz), xaa(sz), xbb(sz), xab(sz);
    for (size_t i = 0; i < sz; ++i) {
        const double va = a.v[i], vb = b.v[i];
        xa[i] = va;
        xb[i] = vb;
        xaa[i] = va * va;
        xbb[i] = vb * vb;
        xab[i] = va * vb;
    }
    std::vector<double> mua, mub, saa, sbb, sab;
    filter_valid(xa, a.h, a.w, win, mua);
    filter_valid(xb, a.h, a.w, win, mub);
    filter_valid(xaa, a.h, a.w, win, saa);
    filter_valid(xbb, a.h, a.w, win, sbb);
    filter_valid(xab, a.h, a.w, win, sab);

    double acc = 0.0;
    for (size_t i = 0; i < mua.size(); ++i) {
        const double ma = mua[i], mb = mub[i];
        const double va = saa[i] - ma * ma;
        const double vb = sbb[i] - mb * mb;
        const double cov = sab[i] - ma * mb;
        acc += ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) /
               ((ma * ma + mb * mb + C1) * (va + vb + C2));
    }
    res.value = acc / static_cast<double>(mua.size());
    return res;
}

}  // namespace fpdn
