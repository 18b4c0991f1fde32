#pragma once

#include <algorithm>
#include <cstdint>

namespace fpdn::kernels {

// Global switch between the OpenMP kernels and the serial reference path.
// Both paths compute every output element with the same accumulation order,
// so results are bitwise identical for any thread count.
void set_threads(int n);   // n <= 1 selects the serial path
int threads();
bool parallel_enabled();

struct ConvGeom {
    int C, H, W;     // input
    int OC, OH, OW;  // output
    int stride;
    int pad_top, pad_left;
};

// "Same" zero padding with ceil division: OH = ceil(H/stride). Total padding
// (OH-1)*stride + k - H is split floor/ceil between top and bottom.
inline ConvGeom conv_geom(int C, int H, int W, int OC, int stride, int kernel = 3) {
    ConvGeom g;
    g.C = C; g.H = H; g.W = W; g.OC = OC; g.stride = stride;
    g.OH = (H + stride - 1) / stride;
    g.OW = (W + stride - 1) / stride;
    const int pad_h = std::max((g.OH - 1) * stride + kernel - H, 0);
    const int pad_w = std::max((g.OW - 1) * stride + kernel - W, 0);
    g.pad_top = pad_h / 2;
    g.pad_left = pad_w / 2;
    return g;
}

// Weight layout is out_ch x in_ch x 3 x 3 throughout. All bwd_* kernels
// accumulate (+=) into their gradient buffer; callers own the zeroing policy.

namespace serial {

template <class T>
void conv2d_fwd(const T* in, const T* wgt, const T* bias, T* out, const ConvGeom& g);
template <class T>
void conv2d_bwd_input(const T* gout, const T* wgt, T* gin, const ConvGeom& g);
template <class T>
void conv2d_bwd_weight(const T* gout, const T* in, T* gwgt, const ConvGeom& g);
template <class T>
void conv2d_bwd_bias(const T* gout, T* gbias, const ConvGeom& g);

template <class T>
void bilinear_fwd(const T* in, int C, int H, int W, T* out, int OH, int OW);
template <class T>
void bilinear_bwd(const T* gout, int C, int H, int W, T* gin, int OH, int OW);

template <class T>
void matvec(const T* wm, const T* bias, int out_n, int in_n, const T* x, T* y);
template <class T>
void matvec_bwd_x(const T* wm, int out_n, int in_n, const T* gy, T* gx);
template <class T>
void matvec_bwd_w(const T* gy, const T* x, int out_n, int in_n, T* gw, T* gb);

}  // namespace serial

namespace omp {

template <class T>
void conv2d_fwd(const T* in, const T* wgt, const T* bias, T* out, const ConvGeom& g);
template <class T>
void conv2d_bwd_input(const T* gout, const T* wgt, T* gin, const ConvGeom& g);
template <class T>
void conv2d_bwd_weight(const T* gout, const T* in, T* gwgt, const ConvGeom& g);
template <class T>
void conv2d_bwd_bias(const T* gout, T* gbias, const ConvGeom& g);

template <class T>
void bilinear_fwd(const T* in, int C, int H, int W, T* out, int OH, int OW);
template <class T>
void bilinear_bwd(const T* gout, int C, int H, int W, T* gin, int OH, int OW);

template <class T>
void matvec(const T* wm, const T* bias, int out_n, int in_n, const T* x, T* y);
template <class T>
void matvec_bwd_x(const T* wm, int out_n, int in_n, const T* gy, T* gx);
template <class T>
void matvec_bwd_w(const T* gy, const T* x, int out_n, int in_n, T* gw, T* gb);

}  // namespace omp

// Dispatch: OpenMP kernels when more than one thread is configured.

template <class T>
inline void conv2d_fwd(const T* in, const T* wgt, const T* bias, T* out, const ConvGeom& g) {
    if (parallel_enabled()) omp::conv2d_fwd(in, wgt, bias, out, g);
    else serial::conv2d_fwd(in, wgt, bias, out, g);
}
template <class T>
inline void conv2d_bwd_input(const T* gout, const T* wgt, T* gin, const ConvGeom& g) {
    if (parallel_enabled()) omp::conv2d_bwd_input(gout, wgt, gin, g);
    else serial::conv2d_bwd_input(gout, wgt, gin, g);
}
template <class T>
inline void conv2d_bwd_weight(const T* gout, const T* in, T* gwgt, const ConvGeom& g) {
    if (parallel_enabled()) omp::conv2d_bwd_weight(gout, in, gwgt, g);
    else serial::conv2d_bwd_weight(gout, in, gwgt, g);
}
template <class T>
inline void conv2d_bwd_bias(const T* gout, T* gbias, const ConvGeom& g) {
    if (parallel_enabled()) omp::conv2d_bwd_bias(gout, gbias, g);
    else serial::conv2d_bwd_bias(gout, gbias, g);
}
template <class T>
inline void bilinear_fwd(const T* in, int C, int H, int W, T* out, int OH, int OW) {
    if (parallel_enabled()) omp::bilinear_fwd(in, C, H, W, out, OH, OW);
    else serial::bilinear_fwd(in, C, H, W, out, OH, OW);
}
template <class T>
inline void bilinear_bwd(const T* gout, int C, int H, int W, T* gin, int OH, int OW) {
    if (parallel_enabled()) omp::bilinear_bwd(gout, C, H, W, gin, OH, OW);
    else serial::bilinear_bwd(gout, C, H, W, gin, OH, OW);
}
template <class T>
inline void matvec(const T* wm, const T* bias, int out_n, int in_n, const T* x, T* y) {
    if (parallel_enabled()) omp::matvec(wm, bias, out_n, in_n, x, y);
    else serial::matvec(wm, bias, out_n, in_n, x, y);
}
template <class T>
inline void matvec_bwd_x(const T* wm, int out_n, int in_n, const T* gy, T* gx) {
    if (parallel_enabled()) omp::matvec_bwd_x(wm, out_n, in_n, gy, gx);
    else serial::matvec_bwd_x(wm, out_n, in_n, gy, gx);
}
template <class T>
inline void matvec_bwd_w(const T* gy, const T* x, int out_n, int in_n, T* gw, T* gb) {
    if (parallel_enabled()) omp::matvec_bwd_w(gy, x, out_n, in_n, gw, gb);
    else serial::matvec_bwd_w(gy, x, out_n, in_n, gw, gb);
}

}  // namespace fpdn::kernels
