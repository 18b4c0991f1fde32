#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fpdn/errors.hpp"
#include "fpdn/mat.hpp"

namespace fpdn {

struct FilterBank {
    std::string name;
    std::vector<double> dec_lo, dec_hi, rec_lo, rec_hi;

    int length() const { return static_cast<int>(dec_lo.size()); }
};

// Built-in banks: "sym4" (the default) and "haar". Throws ConfigError on an
// unknown name.
const FilterBank& builtin_filter_bank(const std::string& name);

// Text format: four lines (dec_lo, dec_hi, rec_lo, rec_hi), each a
// whitespace-separated list of coefficients. All four must have the same even
// length.
FilterBank load_filter_bank(const std::string& path);

// Single-level 2D subbands. Detail order convention throughout the project:
// d[0] = columns high / rows low, d[1] = columns low / rows high,
// d[2] = both high.
template <class T>
struct Subbands {
    Mat<T> ll;
    std::array<Mat<T>, 3> d;
};

template <class T>
struct WaveletPyramid {
    int levels = 0;
    Mat<T> approx;                               // LL at the deepest level
    std::vector<std::array<Mat<T>, 3>> details;  // details[k] from level k+1 (1 = finest)
    std::vector<std::pair<int, int>> dims;       // input dims consumed at each level
};

namespace wav_detail {

// Periodized transform. Odd signals are extended by repeating the last
// sample, so a length-n input always yields ceil(n/2) coefficients per band.
template <class T>
void dwt1(const T* x, int n, const FilterBank& fb, T* ca, T* cd) {
    const int L = fb.length();
    const int ne = n + (n & 1);
    const int half = ne / 2;
    for (int k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (int j = 0; j < L; ++j) {
            int i = (2 * k + 1 - j) % ne;
            if (i < 0) i += ne;
            if (i == n) i = n - 1;  // the duplicated sample
            const double v = static_cast<double>(x[i]);
            a += fb.dec_lo[j] * v;
            d += fb.dec_hi[j] * v;
        }
        ca[k] = static_cast<T>(a);
        cd[k] = static_cast<T>(d);
    }
}

// Synthesis with the reconstruction pair; for an orthogonal bank this is the
// exact transpose of the analysis matrix, so even-length round trips are
// perfect to rounding error. Odd n drops the extension sample.
template <class T>
void idwt1(const T* ca, const T* cd, int n, const FilterBank& fb, T* x) {
    const int L = fb.length();
    const int ne = n + (n & 1);
    const int half = ne / 2;
    std::vector<double> acc(ne, 0.0);
    for (int k = 0; k < half; ++k) {
        const double a = static_cast<double>(ca[k]);
        const double d = static_cast<double>(cd[k]);
        for (int j = 0; j < L; ++j) {
            int i = (2 * k + 2 - L + j) % ne;
            if (i < 0) i += ne;
            acc[i] += a * fb.rec_lo[j] + d * fb.rec_hi[j];
        }
    }
    for (int i = 0; i < n; ++i) x[i] = static_cast<T>(acc[i]);
}

}  // namespace wav_detail

template <class T>
Subbands<T> dwt2(const Mat<T>& img, const FilterBank& fb) {
    const int L = fb.length();
    if (img.h < L || img.w < L)
        throw DimensionError("dwt2: image " + std::to_string(img.h) + "x" + std::to_string(img.w) +
                             " smaller than filter length " + std::to_string(L));
    const int hw = (img.w + 1) / 2;
    const int hh = (img.h + 1) / 2;

    // rows first
    Mat<T> rl(img.h, hw), rh(img.h, hw);
    std::vector<T> ca(hw), cd(hw);
    for (int y = 0; y < img.h; ++y) {
        wav_detail::dwt1(&img.v[static_cast<size_t>(y) * img.w], img.w, fb, ca.data(), cd.data());
        for (int x = 0; x < hw; ++x) {
            rl.at(y, x) = ca[x];
            rh.at(y, x) = cd[x];
        }
    }

    // then columns
    Subbands<T> out{Mat<T>(hh, hw), {Mat<T>(hh, hw), Mat<T>(hh, hw), Mat<T>(hh, hw)}};
    std::vector<T> col(img.h), cca(hh), ccd(hh);
    for (int x = 0; x < hw; ++x) {
        for (int y = 0; y < img.h; ++y) col[y] = rl.at(y, x);
        wav_detail::dwt1(col.data(), img.h, fb, cca.data(), ccd.data());
        for (int y = 0; y < hh; ++y) {
            out.ll.at(y, x) = cca[y];
            out.d[0].at(y, x) = ccd[y];
        }
        for (int y = 0; y < img.h; ++y) col[y] = rh.at(y, x);
        wav_detail::dwt1(col.data(), img.h, fb, cca.data(), ccd.data());
        for (int y = 0; y < hh; ++y) {
            out.d[1].at(y, x) = cca[y];
            out.d[2].at(y, x) = ccd[y];
        }
    }
    return out;
}

template <class T>
Mat<T> idwt2(const Subbands<T>& sb, int h, int w, const FilterBank& fb) {
    const int hw = (w + 1) / 2;
    const int hh = (h + 1) / 2;
    if (sb.ll.h != hh || sb.ll.w != hw)
        throw DimensionError("idwt2: subband " + std::to_string(sb.ll.h) + "x" +
                             std::to_string(sb.ll.w) + " does not match target " +
                             std::to_string(h) + "x" + std::to_string(w));

    // columns first (inverse of rows-then-columns)
    Mat<T> rl(h, hw), rh(h, hw);
    std::vector<T> cca(hh), ccd(hh), col(h);
    for (int x = 0; x < hw; ++x) {
        for (int y = 0; y < hh; ++y) {
            cca[y] = sb.ll.at(y, x);
            ccd[y] = sb.d[0].at(y, x);
        }
        wav_detail::idwt1(cca.data(), ccd.data(), h, fb, col.data());
        for (int y = 0; y < h; ++y) rl.at(y, x) = col[y];
        for (int y = 0; y < hh; ++y) {
            cca[y] = sb.d[1].at(y, x);
            ccd[y] = sb.d[2].at(y, x);
        }
        wav_detail::idwt1(cca.data(), ccd.data(), h, fb, col.data());
        for (int y = 0; y < h; ++y) rh.at(y, x) = col[y];
    }

    Mat<T> out(h, w);
    std::vector<T> ca(hw), cd(hw), row(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < hw; ++x) {
            ca[x] = rl.at(y, x);
            cd[x] = rh.at(y, x);
        }
        wav_detail::idwt1(ca.data(), cd.data(), w, fb, row.data());
        for (int x = 0; x < w; ++x) out.at(y, x) = row[x];
    }
    return out;
}

template <class T>
WaveletPyramid<T> decompose(const Mat<T>& img, int levels, const FilterBank& fb) {
    if (levels < 1) throw ContractError("decompose: levels must be >= 1");
    WaveletPyramid<T> pyr;
    pyr.levels = levels;
    pyr.details.resize(levels);
    pyr.dims.resize(levels);
    Mat<T> cur = img;
    for (int l = 0; l < levels; ++l) {
        if (cur.h < fb.length() || cur.w < fb.length())
            throw DimensionError("decompose: level " + std::to_string(l + 1) + " input " +
                                 std::to_string(cur.h) + "x" + std::to_string(cur.w) +
                                 " smaller than filter length " + std::to_string(fb.length()));
        pyr.dims[l] = {cur.h, cur.w};
        auto sb = dwt2(cur, fb);
        pyr.details[l] = std::move(sb.d);
        cur = std::move(sb.ll);
    }
    pyr.approx = std::move(cur);
    return pyr;
}

template <class T>
Mat<T> reconstruct(const WaveletPyramid<T>& pyr, const FilterBank& fb) {
    Mat<T> cur = pyr.approx;
    for (int l = pyr.levels - 1; l >= 0; --l) {
        Subbands<T> sb{std::move(cur), pyr.details[l]};
        cur = idwt2(sb, pyr.dims[l].first, pyr.dims[l].second, fb);
    }
    return cur;
}

// Stacks the pyramid into 3*levels + 1 channels on the deepest level's grid:
// approx first, then each level's details from coarsest to finest. Bands not
// already on that grid are resized bilinearly.
template <class T>
std::vector<Mat<T>> pack_pyramid(const WaveletPyramid<T>& pyr) {
    const int gh = pyr.approx.h, gw = pyr.approx.w;
    std::vector<Mat<T>> ch;
    ch.reserve(3 * pyr.levels + 1);
    ch.push_back(pyr.approx);
    for (int l = pyr.levels - 1; l >= 0; --l)
        for (const auto& band : pyr.details[l]) {
            if (band.h == gh && band.w == gw) ch.push_back(band);
            else ch.push_back(bilinear_resize(band, gh, gw));
        }
    return ch;
}

}  // namespace fpdn
