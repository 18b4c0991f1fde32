#include "fpdn/wavelet.hpp"

#include <fstream>
#include <sstream>

namespace fpdn {

namespace {

// Quadrature mirror construction for orthogonal banks: the highpass and the
// reconstruction pair all follow from dec_lo.
FilterBank orthogonal_bank(std::string name, std::vector<double> dec_lo) {
    FilterBank fb;
    fb.name = std::move(name);
    const int L = static_cast<int>(dec_lo.size());
    fb.dec_lo = std::move(dec_lo);
    fb.dec_hi.resize(L);
    for (int j = 0; j < L; ++j)
        fb.dec_hi[j] = (j % 2 == 0 ? -1.0 : 1.0) * fb.dec_lo[L - 1 - j];
    fb.rec_lo.assign(fb.dec_lo.rbegin(), fb.dec_lo.rend());
    fb.rec_hi.assign(fb.dec_hi.rbegin(), fb.dec_hi.rend());
    return fb;
}

void validate_bank(const FilterBank& fb, const std::string& origin) {
    const size_t L = fb.dec_lo.size();
    if (L < 2 || L % 2 != 0)
        throw ConfigError(origin + ": filter length must be even and >= 2, got " +
                          std::to_string(L));
    if (fb.dec_hi.size() != L || fb.rec_lo.size() != L || fb.rec_hi.size() != L)
        throw ConfigError(origin + ": all four filters must have the same length");
}

}  // namespace

const FilterBank& builtin_filter_bank(const std::string& name) {
    static const FilterBank sym4 = orthogonal_bank(
        "sym4", {-0.07576571478927333, -0.02963552764599851, 0.49761866763201545,
                 0.8037387518059161, 0.29785779560527736, -0.09921954357684722,
                 -0.012603967262037833, 0.0322231006040427});
    static const FilterBank haar =
        orthogonal_bank("haar", {0.7071067811865476, 0.7071067811865476});
    if (name == "sym4") return sym4;
    if (name == "haar") return haar;
    throw ConfigError("unknown wavelet '" + name + "' (built in: sym4, haar)");
}

FilterBank load_filter_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open filter bank file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw ConfigError(path + ": non-numeric filter coefficient");
        rows.push_back(std::move(row));
    }
    if (rows.size() != 4)
        throw ConfigError(path + ": expected 4 filter lines (dec_lo dec_hi rec_lo rec_hi), got " +
                          std::to_string(rows.size()));
    FilterBank fb;
    fb.name = path;
    fb.dec_lo = std::move(rows[0]);
    fb.dec_hi = std::move(rows[1]);
    fb.rec_lo = std::move(rows[2]);
    fb.rec_hi = std::move(rows[3]);
    validate_bank(fb, path);
    return fb;
}

}  // namespace fpdn
