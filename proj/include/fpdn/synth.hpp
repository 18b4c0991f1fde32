#pragma once

#include <cstdint>
#include <string>

#include "fpdn/mat.hpp"

namespace fpdn {

// Fingerprint-like test image: band-pass oriented texture with a smoothly
// varying orientation field and a ridge period of a few pixels, normalized to
// roughly span [0.1, 0.9].
Image synth_fingerprint(int h, int w, uint64_t seed);

// Writes count images as fp_NNNN.pgm into out_dir (created if missing).
void synth_dataset(const std::string& out_dir, int count, int h, int w, uint64_t seed);

}  // namespace fpdn
