#include <omp.h>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpdn/kernels.hpp"
#include "test_support.hpp"

using namespace fpdn::kernels;
using testsup::Lcg;

namespace {

// Brute-force direct convolution, written independently of the production
// kernels (plain padded gather, no layout tricks).
template <class T>
void naive_conv_fwd(const std::vector<T>& in, const std::vector<T>& w, const std::vector<T>& b,
                    std::vector<T>& out, const ConvGeom& g) {
    for (int oc = 0; oc < g.OC; ++oc)
        for (int oy = 0; oy < g.OH; ++oy)
            for (int ox = 0; ox < g.OW; ++ox) {
                double acc = b.empty() ? 0.0 : static_cast<double>(b[oc]);
                for (int ic = 0; ic < g.C; ++ic)
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const int y = oy * g.stride - g.pad_top + ky;
                            const int x = ox * g.stride - g.pad_left + kx;
                            if (y < 0 || y >= g.H || x < 0 || x >= g.W) continue;
                            acc += static_cast<double>(in[(ic * g.H + y) * g.W + x]) *
                                   static_cast<double>(w[((oc * g.C + ic) * 3 + ky) * 3 + kx]);
                        }
                out[(oc * g.OH + oy) * g.OW + ox] = static_cast<T>(acc);
            }
}

template <class T>
double dot(const std::vector<T>& a, const std::vector<T>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

struct Case {
    int C, H, W, OC, stride;
};

}  // namespace

TEST_CASE("conv_geom computes ceil output sizes and centered padding") {
    auto g = conv_geom(1, 103, 96, 32, 2);
    CHECK(g.OH == 52);
    CHECK(g.OW == 48);
    auto g2 = conv_geom(32, 52, 48, 64, 2);
    CHECK(g2.OH == 26);
    CHECK(g2.OW == 24);
    auto g3 = conv_geom(1, 7, 7, 1, 1);
    CHECK(g3.OH == 7);
    CHECK(g3.pad_top == 1);
    CHECK(g3.pad_left == 1);
    // odd extent at stride 2: pad total = (4-1)*2 + 3 - 7 = 2, split 1/1
    auto g4 = conv_geom(1, 7, 7, 1, 2);
    CHECK(g4.OH == 4);
    CHECK(g4.pad_top == 1);
}

TEST_CASE("production conv matches the brute-force oracle") {
    Lcg g(3001);
    for (const Case c : {Case{1, 9, 8, 4, 2}, Case{3, 7, 7, 2, 1}, Case{4, 13, 12, 5, 2},
                         Case{2, 5, 11, 3, 3}}) {
        const ConvGeom geom = conv_geom(c.C, c.H, c.W, c.OC, c.stride);
        std::vector<double> in(c.C * c.H * c.W), w(c.OC * c.C * 9), b(c.OC);
        testsup::fill(in, g);
        testsup::fill(w, g);
        testsup::fill(b, g);
        std::vector<double> want(c.OC * geom.OH * geom.OW), got(want.size());
        naive_conv_fwd(in, w, b, want, geom);
        serial::conv2d_fwd(in.data(), w.data(), b.data(), got.data(), geom);
        for (size_t i = 0; i < want.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("backward kernels are exact adjoints of the forward") {
    // <A x, y> == <x, A^T y> ties bwd_input to fwd; the weight gradient is
    // checked the same way against the forward as a function of the weights.
    Lcg g(3002);
    const ConvGeom geom = conv_geom(3, 10, 9, 4, 2);
    std::vector<double> x(3 * 10 * 9), w(4 * 3 * 9), y(4 * geom.OH * geom.OW);
    testsup::fill(x, g);
    testsup::fill(w, g);
    testsup::fill(y, g);

    std::vector<double> ax(y.size());
    serial::conv2d_fwd(x.data(), w.data(), static_cast<const double*>(nullptr), ax.data(), geom);
    std::vector<double> aty(x.size(), 0.0);
    serial::conv2d_bwd_input(y.data(), w.data(), aty.data(), geom);
    CHECK(dot(ax, y) == doctest::Approx(dot(x, aty)).epsilon(1e-12));

    std::vector<double> gw(w.size(), 0.0);
    serial::conv2d_bwd_weight(y.data(), x.data(), gw.data(), geom);
    CHECK(dot(ax, y) == doctest::Approx(dot(w, gw)).epsilon(1e-12));  // bias-free forward

    std::vector<double> gb(4, 0.0);
    serial::conv2d_bwd_bias(y.data(), gb.data(), geom);
    double ysum0 = 0;
    for (int oy = 0; oy < geom.OH; ++oy)
        for (int ox = 0; ox < geom.OW; ++ox) ysum0 += y[(0 * geom.OH + oy) * geom.OW + ox];
    CHECK(gb[0] == doctest::Approx(ysum0).epsilon(1e-12));
}

TEST_CASE("bilinear kernels are adjoint and interpolate exactly") {
    Lcg g(3003);
    std::vector<double> x(2 * 5 * 4), y(2 * 8 * 7);
    testsup::fill(x, g);
    testsup::fill(y, g);
    std::vector<double> ax(y.size()), aty(x.size(), 0.0);
    serial::bilinear_fwd(x.data(), 2, 5, 4, ax.data(), 8, 7);
    serial::bilinear_bwd(y.data(), 2, 5, 4, aty.data(), 8, 7);
    CHECK(dot(ax, y) == doctest::Approx(dot(x, aty)).epsilon(1e-12));

    // 2x2 -> 3x3 puts the average of all four corners at the center
    std::vector<double> q = {1.0, 3.0, 5.0, 9.0}, up(9);
    serial::bilinear_fwd(q.data(), 1, 2, 2, up.data(), 3, 3);
    CHECK(up[4] == doctest::Approx(4.5));
    CHECK(up[0] == doctest::Approx(1.0));
    CHECK(up[8] == doctest::Approx(9.0));
}

TEST_CASE("matvec kernels match a direct product and its adjoint") {
    Lcg g(3004);
    const int out_n = 7, in_n = 11;
    std::vector<double> w(out_n * in_n), b(out_n), x(in_n), gy(out_n);
    testsup::fill(w, g);
    testsup::fill(b, g);
    testsup::fill(x, g);
    testsup::fill(gy, g);

    std::vector<double> y(out_n);
    serial::matvec(w.data(), b.data(), out_n, in_n, x.data(), y.data());
    for (int o = 0; o < out_n; ++o) {
        double acc = b[o];
        for (int i = 0; i < in_n; ++i) acc += w[o * in_n + i] * x[i];
        CHECK(y[o] == doctest::Approx(acc).epsilon(1e-12));
    }

    std::vector<double> ynob(out_n), gx(in_n, 0.0);
    serial::matvec(w.data(), static_cast<const double*>(nullptr), out_n, in_n, x.data(),
                   ynob.data());
    serial::matvec_bwd_x(w.data(), out_n, in_n, gy.data(), gx.data());
    CHECK(dot(ynob, gy) == doctest::Approx(dot(x, gx)).epsilon(1e-12));

    std::vector<double> gw(w.size(), 0.0), gb(out_n, 0.0);
    serial::matvec_bwd_w(gy.data(), x.data(), out_n, in_n, gw.data(), gb.data());
    CHECK(gw[1 * in_n + 2] == doctest::Approx(gy[1] * x[2]).epsilon(1e-12));
    CHECK(gb[3] == doctest::Approx(gy[3]).epsilon(1e-12));
}

TEST_CASE("serial and OpenMP paths are bitwise identical") {
    // oversubscribe on purpose so the parallel path really splits the loops
    const int max_before = omp_get_max_threads();
    omp_set_num_threads(3);
    Lcg g(3005);
    const ConvGeom geom = conv_geom(3, 14, 13, 5, 2);
    std::vector<float> in(3 * 14 * 13), w(5 * 3 * 9), b(5), go(5 * geom.OH * geom.OW);
    testsup::fill(in, g);
    testsup::fill(w, g);
    testsup::fill(b, g);
    testsup::fill(go, g);

    std::vector<float> y_s(go.size()), y_p(go.size());
    serial::conv2d_fwd(in.data(), w.data(), b.data(), y_s.data(), geom);
    omp::conv2d_fwd(in.data(), w.data(), b.data(), y_p.data(), geom);
    CHECK(y_s == y_p);

    std::vector<float> gi_s(in.size(), 0.0f), gi_p(in.size(), 0.0f);
    serial::conv2d_bwd_input(go.data(), w.data(), gi_s.data(), geom);
    omp::conv2d_bwd_input(go.data(), w.data(), gi_p.data(), geom);
    CHECK(gi_s == gi_p);

    std::vector<float> gw_s(w.size(), 0.0f), gw_p(w.size(), 0.0f), gb_s(5, 0.0f), gb_p(5, 0.0f);
    serial::conv2d_bwd_weight(go.data(), in.data(), gw_s.data(), geom);
    omp::conv2d_bwd_weight(go.data(), in.data(), gw_p.data(), geom);
    serial::conv2d_bwd_bias(go.data(), gb_s.data(), geom);
    omp::conv2d_bwd_bias(go.data(), gb_p.data(), geom);
    CHECK(gw_s == gw_p);
    CHECK(gb_s == gb_p);

    std::vector<float> bu_s(3 * 9 * 8), bu_p(3 * 9 * 8);
    serial::bilinear_fwd(in.data(), 3, 14, 13, bu_s.data(), 9, 8);
    omp::bilinear_fwd(in.data(), 3, 14, 13, bu_p.data(), 9, 8);
    CHECK(bu_s == bu_p);

    std::vector<float> gbi_s(in.size(), 0.0f), gbi_p(in.size(), 0.0f);
    serial::bilinear_bwd(bu_s.data(), 3, 14, 13, gbi_s.data(), 9, 8);
    omp::bilinear_bwd(bu_s.data(), 3, 14, 13, gbi_p.data(), 9, 8);
    CHECK(gbi_s == gbi_p);

    const int out_n = 9, in_n = 3 * 14 * 13;
    std::vector<float> wm(out_n * in_n), bias(out_n), mv_s(out_n), mv_p(out_n), gym(out_n);
    testsup::fill(wm, g);
    testsup::fill(bias, g);
    testsup::fill(gym, g);
    serial::matvec(wm.data(), bias.data(), out_n, in_n, in.data(), mv_s.data());
    omp::matvec(wm.data(), bias.data(), out_n, in_n, in.data(), mv_p.data());
    CHECK(mv_s == mv_p);

    std::vector<float> gx_s(in_n, 0.0f), gx_p(in_n, 0.0f);
    serial::matvec_bwd_x(wm.data(), out_n, in_n, gym.data(), gx_s.data());
    omp::matvec_bwd_x(wm.data(), out_n, in_n, gym.data(), gx_p.data());
    CHECK(gx_s == gx_p);

    std::vector<float> gwm_s(wm.size(), 0.0f), gwm_p(wm.size(), 0.0f), gbm_s(out_n, 0.0f),
        gbm_p(out_n, 0.0f);
    serial::matvec_bwd_w(gym.data(), in.data(), out_n, in_n, gwm_s.data(), gbm_s.data());
    omp::matvec_bwd_w(gym.data(), in.data(), out_n, in_n, gwm_p.data(), gbm_p.data());
    CHECK(gwm_s == gwm_p);
    CHECK(gbm_s == gbm_p);

    omp_set_num_threads(max_before);
}

TEST_CASE("thread count controls the dispatch switch") {
    const int before = threads();
    set_threads(1);
    CHECK_FALSE(parallel_enabled());
    set_threads(4);
    CHECK(parallel_enabled());
    set_threads(before);
}
