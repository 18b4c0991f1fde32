#pragma once

#include <string>
#include <vector>

#include "fpdn/mat.hpp"

namespace fpdn {

// Pixels are normalized to [0, 1] on load. PGM (P5/P2) and uncompressed BMP
// (8-bit palette or 24-bit, converted to luma) are accepted; format is
// detected from the file's magic bytes, not the extension.
Image read_image(const std::string& path);

// 8-bit binary PGM; values are clamped to [0, 1] and rounded.
void write_pgm(const std::string& path, const Image& img);

// Side-by-side strip (same heights required) with a light separator column,
// used for clean / noisy / denoised triptychs.
Image hconcat(const std::vector<Image>& imgs, int gap = 4, float gap_value = 1.0f);

}  // namespace fpdn
