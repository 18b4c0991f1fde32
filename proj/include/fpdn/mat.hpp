#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fpdn/errors.hpp"

namespace fpdn {

// Plain row-major 2D matrix. Grayscale images live in Mat<float> with values
// nominally in [0,1]; wavelet subbands and test oracles use Mat<double>.
template <class T>
struct Mat {
    int h = 0;
    int w = 0;
    std::vector<T> v;

    Mat() = default;
    Mat(int h_, int w_, T fill = T(0)) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {
        if (h_ <= 0 || w_ <= 0)
            throw DimensionError("Mat: dims must be positive, got " + std::to_string(h_) + "x" +
                                 std::to_string(w_));
    }

    T& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
    T at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
    size_t size() const { return v.size(); }

    template <class U>
    Mat<U> cast() const {
        Mat<U> out(h, w);
        for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
        return out;
    }
};

template <class T>
bool same_dims(const Mat<T>& a, const Mat<T>& b) {
    return a.h == b.h && a.w == b.w;
}

template <class T>
bool all_finite(const Mat<T>& m) {
    for (T x : m.v)
        if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
}

// Bilinear interpolation with the align-corners convention: source position of
// output pixel i is i*(H-1)/(OH-1), so corner pixels map to corner pixels.
template <class T>
Mat<T> bilinear_resize(const Mat<T>& in, int oh, int ow) {
    if (oh < 1 || ow < 1)
        throw DimensionError("bilinear_resize: target dims must be >= 1");
    if (oh == in.h && ow == in.w) return in;
    Mat<T> out(oh, ow);
    const double sy = oh > 1 ? static_cast<double>(in.h - 1) / (oh - 1) : 0.0;
    const double sx = ow > 1 ? static_cast<double>(in.w - 1) / (ow - 1) : 0.0;
    for (int y = 0; y < oh; ++y) {
        const double fy = y * sy;
        int y0 = static_cast<int>(fy);
        if (y0 > in.h - 2) y0 = in.h - 2;
        if (y0 < 0) y0 = 0;
        const double wy = in.h > 1 ? fy - y0 : 0.0;
        for (int x = 0; x < ow; ++x) {
            const double fx = x * sx;
            int x0 = static_cast<int>(fx);
            if (x0 > in.w - 2) x0 = in.w - 2;
            if (x0 < 0) x0 = 0;
            const double wx = in.w > 1 ? fx - x0 : 0.0;
            const int y1 = in.h > 1 ? y0 + 1 : y0;
            const int x1 = in.w > 1 ? x0 + 1 : x0;
            const double a = static_cast<double>(in.at(y0, x0));
            const double b = static_cast<double>(in.at(y0, x1));
            const double c = static_cast<double>(in.at(y1, x0));
            const double d = static_cast<double>(in.at(y1, x1));
            out.at(y, x) = static_cast<T>((1 - wy) * ((1 - wx) * a + wx * b) +
                                          wy * ((1 - wx) * c + wx * d));
        }
    }
    return out;
}

using Image = Mat<float>;

}  // namespace fpdn
