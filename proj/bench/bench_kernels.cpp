// Timing comparison of the serial reference kernels against the OpenMP
// path, over the layer shapes the default model actually runs.
//
//   fpdn_bench [reps] [threads]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "fpdn/kernels.hpp"

using namespace fpdn::kernels;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

struct Shape {
    const char* name;
    int C, H, W, OC, stride;
};

template <class F>
double time_best(int reps, F body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        body();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    const int nthreads = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();
    omp_set_num_threads(nthreads);

    const std::vector<Shape> shapes = {
        {"enc1", 1, 103, 96, 32, 2},   {"enc2", 32, 52, 48, 64, 2},
        {"enc3", 64, 26, 24, 128, 2},  {"enc4", 128, 13, 12, 256, 2},
        {"wav3", 32, 13, 12, 64, 1},   {"dec-mid", 320, 13, 12, 128, 1},
    };

    std::mt19937 rng(1);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::printf("%-8s %-10s %10s %10s %8s\n", "layer", "kernel", "serial ms", "omp ms", "ratio");

    for (const Shape& s : shapes) {
        const ConvGeom g = conv_geom(s.C, s.H, s.W, s.OC, s.stride);
        std::vector<float> in(static_cast<size_t>(s.C) * s.H * s.W);
        std::vector<float> w(static_cast<size_t>(s.OC) * s.C * 9), b(s.OC);
        std::vector<float> out(static_cast<size_t>(s.OC) * g.OH * g.OW);
        std::vector<float> gin(in.size()), gw(w.size());
        for (auto& v : in) v = dist(rng);
        for (auto& v : w) v = dist(rng);
        for (auto& v : b) v = dist(rng);
        for (auto& v : out) v = dist(rng);

        struct Row {
            const char* name;
            double s, p;
        };
        const Row rows[] = {
            {"fwd",
             time_best(reps, [&] { serial::conv2d_fwd(in.data(), w.data(), b.data(), out.data(), g); }),
             time_best(reps, [&] { omp::conv2d_fwd(in.data(), w.data(), b.data(), out.data(), g); })},
            {"bwd_in",
             time_best(reps, [&] { serial::conv2d_bwd_input(out.data(), w.data(), gin.data(), g); }),
             time_best(reps, [&] { omp::conv2d_bwd_input(out.data(), w.data(), gin.data(), g); })},
            {"bwd_w",
             time_best(reps, [&] { serial::conv2d_bwd_weight(out.data(), in.data(), gw.data(), g); }),
             time_best(reps, [&] { omp::conv2d_bwd_weight(out.data(), in.data(), gw.data(), g); })},
        };
        for (const Row& r : rows)
            std::printf("%-8s %-10s %10.3f %10.3f %7.2fx\n", s.name, r.name, r.s, r.p,
                        r.s / r.p);
    }

    std::printf("\nthreads: %d (parallel path %s)\n", nthreads,
                nthreads > 1 ? "active" : "equals serial on one thread");
    return 0;
}
