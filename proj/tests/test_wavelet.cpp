#include <cmath>
#include <fstream>
#include <iomanip>
#include <vector>

#include "doctest.h"
#include "fpdn/wavelet.hpp"
#include "test_support.hpp"
#include "wavelet_ref_data.hpp"

using namespace fpdn;
using testsup::Lcg;

namespace {

std::vector<double> lcg_signal(int n, uint64_t seed) {
    Lcg g(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = g.next();
    return x;
}

Mat<double> lcg_image(int h, int w, uint64_t seed) {
    Lcg g(seed);
    Mat<double> img(h, w);
    for (auto& v : img.v) v = g.next();
    return img;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want,
                 double tol = 1e-10) {
    REQUIRE(got.size() == want.size());
    double worst = 0;
    for (size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    CHECK(worst < tol);
}

}  // namespace

TEST_CASE("1D analysis matches the reference data") {
    const auto& sym4 = builtin_filter_bank("sym4");
    const auto& haar = builtin_filter_bank("haar");

    auto run = [](const std::vector<double>& x, const FilterBank& fb) {
        const int half = (static_cast<int>(x.size()) + 1) / 2;
        std::vector<double> ca(half), cd(half);
        wav_detail::dwt1(x.data(), static_cast<int>(x.size()), fb, ca.data(), cd.data());
        return std::pair{ca, cd};
    };

    auto [ca16, cd16] = run(lcg_signal(16, 21), sym4);
    check_close(ca16, wavref::d1_sym4_n16_ca);
    check_close(cd16, wavref::d1_sym4_n16_cd);

    auto [ca11, cd11] = run(lcg_signal(11, 22), sym4);
    check_close(ca11, wavref::d1_sym4_n11_ca);
    check_close(cd11, wavref::d1_sym4_n11_cd);

    auto [ca7, cd7] = run(lcg_signal(7, 23), haar);
    check_close(ca7, wavref::d1_haar_n7_ca);
    check_close(cd7, wavref::d1_haar_n7_cd);
}

TEST_CASE("2D single-level subbands match the reference data") {
    auto sb = dwt2(lcg_image(13, 10, 31), builtin_filter_bank("sym4"));
    CHECK(sb.ll.h == 7);
    CHECK(sb.ll.w == 5);
    check_close(sb.ll.v, wavref::d2_sym4_13x10_ll);
    check_close(sb.d[0].v, wavref::d2_sym4_13x10_d0);
    check_close(sb.d[1].v, wavref::d2_sym4_13x10_d1);
    check_close(sb.d[2].v, wavref::d2_sym4_13x10_d2);
}

TEST_CASE("two-level pyramid matches the reference data") {
    auto pyr = decompose(lcg_image(32, 32, 32), 2, builtin_filter_bank("sym4"));
    REQUIRE(pyr.levels == 2);
    check_close(pyr.approx.v, wavref::p_sym4_32_approx);
    check_close(pyr.details[0][0].v, wavref::p_sym4_32_l1_d0);  // finest level
    check_close(pyr.details[0][1].v, wavref::p_sym4_32_l1_d1);
    check_close(pyr.details[0][2].v, wavref::p_sym4_32_l1_d2);
    check_close(pyr.details[1][0].v, wavref::p_sym4_32_l2_d0);
    check_close(pyr.details[1][1].v, wavref::p_sym4_32_l2_d1);
    check_close(pyr.details[1][2].v, wavref::p_sym4_32_l2_d2);
}

TEST_CASE("decompose/reconstruct round trip is exact to rounding") {
    const auto& fb = builtin_filter_bank("sym4");
    auto img = lcg_image(103, 96, 41);
    auto pyr = decompose(img, 3, fb);
    CHECK(pyr.approx.h == 13);
    CHECK(pyr.approx.w == 12);
    auto back = reconstruct(pyr, fb);
    REQUIRE(back.h == img.h);
    REQUIRE(back.w == img.w);
    double worst = 0;
    for (size_t i = 0; i < img.v.size(); ++i)
        worst = std::max(worst, std::abs(back.v[i] - img.v[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("constant images pass through as scaled approximations") {
    const auto& fb = builtin_filter_bank("sym4");
    Mat<double> img(40, 40);
    for (auto& v : img.v) v = 0.75;
    auto pyr = decompose(img, 3, fb);
    // each level scales a constant by sqrt(2) per dimension: 2 per level
    for (auto& v : pyr.approx.v) CHECK(v == doctest::Approx(0.75 * 8.0).epsilon(1e-9));
    for (const auto& lvl : pyr.details)
        for (const auto& d : lvl)
            for (double v : d.v) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("decompose names the level that became too small") {
    const auto& fb = builtin_filter_bank("sym4");
    auto img = lcg_image(16, 16, 42);
    CHECK_NOTHROW(decompose(img, 2, fb));
    try {
        decompose(img, 3, fb);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("level 3") != std::string::npos);
    }
}

TEST_CASE("pack_pyramid lays out approx plus details on the approx grid") {
    auto pyr = decompose(lcg_image(103, 96, 43), 3, builtin_filter_bank("sym4"));
    auto planes = pack_pyramid(pyr);
    REQUIRE(planes.size() == 10);  // 3K + 1
    for (const auto& p : planes) {
        CHECK(p.h == 13);
        CHECK(p.w == 12);
    }
    // the first plane is the approximation itself
    check_close(planes[0].v, pyr.approx.v, 0.0 + 1e-12);
}

TEST_CASE("filter banks load from text files and validate") {
    const auto& sym4 = builtin_filter_bank("sym4");
    CHECK_THROWS_AS(builtin_filter_bank("db9"), ConfigError);

    auto dir = testsup::fresh_dir("wavelet_banks");
    auto write_bank = [&](const std::string& name, const std::vector<std::vector<double>>& rows) {
        std::ofstream out(dir / name);
        out << std::setprecision(17);
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
            out << "\n";
        }
        return (dir / name).string();
    };

    auto ok = load_filter_bank(
        write_bank("sym4.txt", {sym4.dec_lo, sym4.dec_hi, sym4.rec_lo, sym4.rec_hi}));
    check_close(ok.dec_lo, sym4.dec_lo, 1e-15);
    check_close(ok.rec_hi, sym4.rec_hi, 1e-15);

    // wrong line count
    CHECK_THROWS_AS(load_filter_bank(write_bank("short.txt", {sym4.dec_lo, sym4.dec_hi})),
                    ConfigError);
    // odd filter length
    CHECK_THROWS_AS(load_filter_bank(write_bank("odd.txt", {{1, 0, 1}, {1, 0, 1}, {1, 0, 1},
                                                            {1, 0, 1}})),
                    ConfigError);
    // non-numeric token
    {
        std::ofstream out(dir / "bad.txt");
        out << "1 0\n0 x\n1 0\n0 1\n";
    }
    CHECK_THROWS_AS(load_filter_bank((dir / "bad.txt").string()), ConfigError);
    CHECK_THROWS_AS(load_filter_bank((dir / "missing.txt").string()), IoError);
}

TEST_CASE("images smaller than the filter are rejected") {
    const auto& fb = builtin_filter_bank("sym4");
    CHECK_THROWS_AS(dwt2(lcg_image(6, 20, 44), fb), DimensionError);
    CHECK_NOTHROW(dwt2(lcg_image(8, 8, 45), fb));
}
