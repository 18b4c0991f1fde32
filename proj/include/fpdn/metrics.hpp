#pragma once

#include "fpdn/mat.hpp"

namespace fpdn {

struct SsimResult {
    double value = 0.0;
    bool truncated_window = false;  // image smaller than the standard 11x11 window
};

// All metrics expect images on the normalized [0, 1] scale and accumulate in
// double regardless of storage type.

double mse(const Image& a, const Image& b);

// -10*log10(mse); +infinity when mse is exactly zero.
double psnr_from_mse(double mse_value);

double psnr(const Image& a, const Image& b);

// Gaussian-weighted SSIM (11x11 window, sigma 1.5, C1 = 0.01^2, C2 = 0.03^2),
// averaged over all fully-interior windows.
SsimResult ssim(const Image& a, const Image& b);

}  // namespace fpdn
