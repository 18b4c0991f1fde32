#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fpdn/errors.hpp"
#include "fpdn/train.hpp"

namespace fpdn {

// Fixed formatting so identical runs produce byte-identical files.
inline std::string fmt_g(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void write_history_csv(const std::string& path, const std::vector<HistoryRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "epoch,train_loss,val_loss,val_psnr\n";
    for (const auto& r : rows)
        out << r.epoch << ',' << fmt_g(r.train_loss) << ',' << fmt_g(r.val_loss) << ','
            << fmt_g(r.val_psnr) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

inline void write_eval_csv(const std::string& path, const std::vector<EvalRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "model,sigma,psnr,ssim,mse,delta_psnr\n";
    for (const auto& r : rows)
        out << r.model << ',' << fmt_g(r.sigma) << ',' << fmt_g(r.psnr) << ',' << fmt_g(r.ssim)
            << ',' << fmt_g(r.mse) << ',' << fmt_g(r.delta_psnr) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace fpdn
