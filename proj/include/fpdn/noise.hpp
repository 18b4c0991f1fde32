#pragma once

#include <algorithm>

#include "fpdn/mat.hpp"
#include "fpdn/rng.hpp"

namespace fpdn {

// sigma is quoted on the 8-bit scale (e.g. 100 means sigma/255 on the
// normalized images we work with). By default the noisy image is left
// unclipped; clipping to [0, 1] is opt-in because it changes the effective
// noise power at high sigma.
struct NoiseSpec {
    double sigma = 100.0;
    uint64_t seed = 0;
    bool clip = false;
};

inline Image add_awgn(const Image& img, const NoiseSpec& spec) {
    Rng rng(spec.seed);
    const double s = spec.sigma / 255.0;
    Image out(img.h, img.w);
    for (size_t i = 0; i < img.v.size(); ++i) {
        double v = static_cast<double>(img.v[i]) + s * rng.normal();
        if (spec.clip) v = std::clamp(v, 0.0, 1.0);
        out.v[i] = static_cast<float>(v);
    }
    return out;
}

}  // namespace fpdn
