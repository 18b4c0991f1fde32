#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpdn/loss.hpp"
#include "fpdn/metrics.hpp"
#include "test_support.hpp"

using namespace fpdn;
using testsup::Lcg;

namespace {

Image lcg_image(int h, int w, uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Lcg g(seed);
    Image img(h, w);
    for (auto& v : img.v) v = static_cast<float>(g.uniform(lo, hi));
    return img;
}

// Direct windowed SSIM, no separable filtering: every valid window is
// evaluated on its own with explicit Gaussian weights.
double ssim_direct(const Image& a, const Image& b, int win = 11, double sigma = 1.5) {
    std::vector<double> wgt(win * win);
    const int c = win / 2;
    double wsum = 0;
    for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
            const double d2 = (y - c) * (y - c) + (x - c) * (x - c);
            wgt[y * win + x] = std::exp(-d2 / (2 * sigma * sigma));
            wsum += wgt[y * win + x];
        }
    for (auto& w : wgt) w /= wsum;

    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0;
    int count = 0;
    for (int oy = 0; oy + win <= a.h; ++oy)
        for (int ox = 0; ox + win <= a.w; ++ox) {
            double mx = 0, my = 0;
            for (int y = 0; y < win; ++y)
                for (int x = 0; x < win; ++x) {
                    mx += wgt[y * win + x] * a.at(oy + y, ox + x);
                    my += wgt[y * win + x] * b.at(oy + y, ox + x);
                }
            double vx = 0, vy = 0, cov = 0;
            for (int y = 0; y < win; ++y)
                for (int x = 0; x < win; ++x) {
                    const double dx = a.at(oy + y, ox + x) - mx;
                    const double dy = b.at(oy + y, ox + x) - my;
                    vx += wgt[y * win + x] * dx * dx;
                    vy += wgt[y * win + x] * dy * dy;
                    cov += wgt[y * win + x] * dx * dy;
                }
            total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / count;
}

}  // namespace

TEST_CASE("mse and psnr on hand examples") {
    Image a(1, 2), b(1, 2);
    a.v = {0.0f, 0.5f};
    b.v = {0.25f, 0.25f};
    CHECK(mse(a, b) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(psnr_from_mse(0.01) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::isinf(psnr_from_mse(0.0)));
    CHECK(std::isinf(psnr(a, a)));

    Image c(2, 2);
    CHECK_THROWS_AS(mse(a, c), DimensionError);
    CHECK_THROWS_AS(psnr(a, c), DimensionError);
    CHECK_THROWS_AS(ssim(a, c), DimensionError);
}

TEST_CASE("ssim is exactly one on identical images") {
    auto img = lcg_image(30, 25, 61);
    auto r = ssim(img, img);
    CHECK(r.value == 1.0);
    CHECK_FALSE(r.truncated_window);
}

TEST_CASE("ssim matches a direct per-window evaluation") {
    auto a = lcg_image(24, 20, 62);
    auto b = lcg_image(24, 20, 63);
    CHECK(ssim(a, b).value == doctest::Approx(ssim_direct(a, b)).epsilon(1e-6));

    // a correlated pair rather than independent noise
    Image c = a;
    for (auto& v : c.v) v = std::min(1.0f, v + 0.1f);
    CHECK(ssim(a, c).value == doctest::Approx(ssim_direct(a, c)).epsilon(1e-6));
}

TEST_CASE("ssim shrinks its window on small images and flags it") {
    auto a = lcg_image(7, 30, 64);
    auto b = lcg_image(7, 30, 65);
    auto r = ssim(a, b);
    CHECK(r.truncated_window);
    CHECK(r.value == doctest::Approx(ssim_direct(a, b, 7)).epsilon(1e-6));
}

TEST_CASE("reconstruction loss on a worked two-pixel example") {
    Tape<double> tape;
    auto out = make_var<double>({1, 1, 2}, std::vector<double>{0.5, 0.5}, true);
    auto target = make_var<double>({1, 1, 2}, std::vector<double>{0.75, 0.25}, false);

    auto lt = reconstruction_loss(tape, out, target, 1.0);
    CHECK(lt.l2->data[0] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(lt.kld->data[0] == doctest::Approx(0.1438410362).epsilon(1e-6));
    CHECK(lt.total->data[0] == doctest::Approx(0.2688410362).epsilon(1e-6));

    // lambda scales only the divergence term
    Tape<double> t2;
    auto lt2 = reconstruction_loss(t2, out, target, 0.001);
    CHECK(lt2.total->data[0] ==
          doctest::Approx(0.125 + 0.001 * 0.1438410362).epsilon(1e-6));

    // and the loss is differentiable end to end
    out->zero_grad();
    tape.backward(lt.total);
    double gnorm = 0;
    for (double g : out->grad) gnorm += g * g;
    CHECK(gnorm > 0);
    CHECK(std::isfinite(gnorm));
}

TEST_CASE("the divergence term is nonnegative and zero on identical inputs") {
    Lcg g(66);
    for (int trial = 0; trial < 5; ++trial) {
        auto a = make_var<double>({1, 4, 5}, true);
        auto b = make_var<double>({1, 4, 5}, false);
        for (auto& v : a->data) v = g.uniform(0.01, 0.99);
        for (auto& v : b->data) v = g.uniform(0.01, 0.99);
        Tape<double> tape;
        tape.set_recording(false);
        CHECK(reconstruction_loss(tape, a, b, 1.0).kld->data[0] >= -1e-12);
        CHECK(reconstruction_loss(tape, a, a, 1.0).kld->data[0] ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("bilinear resize interpolates corners exactly") {
    Image q(2, 2);
    q.v = {1.0f, 3.0f, 5.0f, 9.0f};
    Image up = bilinear_resize(q, 3, 3);
    CHECK(up.at(0, 0) == doctest::Approx(1.0));
    CHECK(up.at(2, 2) == doctest::Approx(9.0));
    CHECK(up.at(1, 1) == doctest::Approx(4.5));
    Image down = bilinear_resize(up, 2, 2);
    CHECK(down.at(0, 0) == doctest::Approx(1.0));
    CHECK(down.at(1, 1) == doctest::Approx(9.0));
}
