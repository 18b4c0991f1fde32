#include "fpdn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "fpdn/errors.hpp"
#include "fpdn/image_io.hpp"
#include "fpdn/rng.hpp"

namespace fs = std::filesystem;

namespace fpdn {

Dataset load_dataset(const std::string& dir, int target_h, int target_w) {
    if (!fs::is_directory(dir)) throw IoError("dataset directory not found: " + dir);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());

    Dataset ds;
    for (const auto& name : files) {
        Image img;
        try {
            img = read_image((fs::path(dir) / name).string());
        } catch (const IoError& e) {
            std::cerr << "warning: skipping " << name << ": " << e.what() << "\n";
            continue;
        }
        if (img.h != target_h || img.w != target_w) {
            std::cerr << "warning: resizing " << name << " from " << img.h << "x" << img.w
                      << " to " << target_h << "x" << target_w << "\n";
            img = bilinear_resize(img, target_h, target_w);
        }
        ds.images.push_back(std::move(img));
        ds.names.push_back(name);
    }
    if (ds.images.empty()) throw IoError("no readable images in " + dir);
    return ds;
}

Split split_dataset(int n, uint64_t seed) {
    if (n < 3) throw ContractError("split_dataset: need at least 3 images, got " +
                                   std::to_string(n));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1))]);

    const int n_train = static_cast<int>(std::llround(0.70 * n));
    const int n_val = static_cast<int>(std::llround(0.15 * n));
    Split s;
    s.train.assign(idx.begin(), idx.begin() + n_train);
    s.val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
    s.test.assign(idx.begin() + n_train + n_val, idx.end());
    return s;
}

}  // namespace fpdn
