#pragma once

#include <string>
#include <vector>

#include "fpdn/mat.hpp"

namespace fpdn {

struct Dataset {
    std::vector<Image> images;
    std::vector<std::string> names;  // file names, same order as images

    int size() const { return static_cast<int>(images.size()); }
};

// Loads every readable PGM/BMP in the directory in sorted filename order.
// Files that fail to parse are skipped with a warning on stderr; images whose
// dimensions differ from target are resized (with a warning). An empty result
// is an error.
Dataset load_dataset(const std::string& dir, int target_h, int target_w);

// 70/15/15 split (rounded) over a seeded shuffle of the index range.
struct Split {
    std::vector<int> train, val, test;
};

Split split_dataset(int n, uint64_t seed);

}  // namespace fpdn
