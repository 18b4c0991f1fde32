#include "fpdn/kernels.hpp"

#include <omp.h>

#include <vector>

namespace fpdn::kernels {

namespace {
int g_threads = omp_get_max_threads();
}

void set_threads(int n) {
    g_threads = n < 1 ? 1 : n;
    omp_set_num_threads(g_threads);
}

int threads() { return g_threads; }

bool parallel_enabled() { return g_threads > 1; }

// The conv kernels work on channels-last scratch copies so the innermost
// loops are contiguous dot products. Serial and OpenMP variants share the
// same loop bodies and accumulation order; each output element is written by
// exactly one iteration of the parallelized loop, so results are bitwise
// identical for any thread count.

namespace detail {

// dst[(y*W + x)*C + c] = src[(c*H + y)*W + x]
template <class T>
void channels_last(const T* src, int C, int H, int W, T* dst) {
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                dst[(static_cast<size_t>(y) * W + x) * C + c] =
                    src[(static_cast<size_t>(c) * H + y) * W + x];
}

// dst[((oc*3 + ky)*3 + kx)*C + ic]
template <class T>
void weight_ic_last(const T* w, int OC, int C, T* dst) {
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < C; ++ic)
            for (int k = 0; k < 9; ++k)
                dst[(static_cast<size_t>(oc) * 9 + k) * C + ic] =
                    w[(static_cast<size_t>(oc) * C + ic) * 9 + k];
}

// dst[(k*C + ic)*OC + oc]
template <class T>
void weight_oc_last(const T* w, int OC, int C, T* dst) {
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < C; ++ic)
            for (int k = 0; k < 9; ++k)
                dst[(static_cast<size_t>(k) * C + ic) * OC + oc] =
                    w[(static_cast<size_t>(oc) * C + ic) * 9 + k];
}

template <class T>
inline T conv_point(const T* inT, const T* wT, const ConvGeom& g, int oc, int oy, int ox,
                    const T* bias) {
    T acc = bias ? bias[oc] : T(0);
    for (int ky = 0; ky < 3; ++ky) {
        const int iy = oy * g.stride + ky - g.pad_top;
        if (iy < 0 || iy >= g.H) continue;
        for (int kx = 0; kx < 3; ++kx) {
            const int ix = ox * g.stride + kx - g.pad_left;
            if (ix < 0 || ix >= g.W) continue;
            const T* a = inT + (static_cast<size_t>(iy) * g.W + ix) * g.C;
            const T* b = wT + (static_cast<size_t>(oc) * 9 + ky * 3 + kx) * g.C;
            for (int ic = 0; ic < g.C; ++ic) acc += a[ic] * b[ic];
        }
    }
    return acc;
}

template <class T>
inline T conv_back_point(const T* goT, const T* wT, const ConvGeom& g, int ic, int iy, int ix) {
    T acc = T(0);
    for (int ky = 0; ky < 3; ++ky) {
        const int ty = iy + g.pad_top - ky;
        if (ty < 0 || ty % g.stride) continue;
        const int oy = ty / g.stride;
        if (oy >= g.OH) continue;
        for (int kx = 0; kx < 3; ++kx) {
            const int tx = ix + g.pad_left - kx;
            if (tx < 0 || tx % g.stride) continue;
            const int ox = tx / g.stride;
            if (ox >= g.OW) continue;
            const T* a = goT + (static_cast<size_t>(oy) * g.OW + ox) * g.OC;
            const T* b = wT + (static_cast<size_t>(ky * 3 + kx) * g.C + ic) * g.OC;
            for (int oc = 0; oc < g.OC; ++oc) acc += a[oc] * b[oc];
        }
    }
    return acc;
}

// One output channel's weight-gradient slice; (oy, ox) ascending per element.
template <class T>
inline void conv_wslice(const T* gout, const T* inT, T* gwgt, const ConvGeom& g, int oc) {
    const T* go = gout + static_cast<size_t>(oc) * g.OH * g.OW;
    std::vector<T> acc(g.C);
    for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
            std::fill(acc.begin(), acc.end(), T(0));
            for (int oy = 0; oy < g.OH; ++oy) {
                const int iy = oy * g.stride + ky - g.pad_top;
                if (iy < 0 || iy >= g.H) continue;
                for (int ox = 0; ox < g.OW; ++ox) {
                    const int ix = ox * g.stride + kx - g.pad_left;
                    if (ix < 0 || ix >= g.W) continue;
                    const T gv = go[static_cast<size_t>(oy) * g.OW + ox];
                    const T* a = inT + (static_cast<size_t>(iy) * g.W + ix) * g.C;
                    for (int ic = 0; ic < g.C; ++ic) acc[ic] += gv * a[ic];
                }
            }
            for (int ic = 0; ic < g.C; ++ic)
                gwgt[((static_cast<size_t>(oc) * g.C + ic) * 3 + ky) * 3 + kx] += acc[ic];
        }
}

// Align-corners sample positions for one axis, shared by fwd and bwd so the
// scatter in bwd is the exact adjoint of the gather in fwd.
template <class T>
struct Tap {
    int i0, i1;
    T w1;  // weight of i1; i0 takes 1 - w1
};

template <class T>
inline Tap<T> resize_tap(int o, int out_n, int in_n) {
    Tap<T> t;
    if (in_n == 1) {
        t.i0 = t.i1 = 0;
        t.w1 = T(0);
        return t;
    }
    const double s = out_n > 1 ? static_cast<double>(in_n - 1) / (out_n - 1) : 0.0;
    const double f = o * s;
    int i0 = static_cast<int>(f);
    if (i0 > in_n - 2) i0 = in_n - 2;
    if (i0 < 0) i0 = 0;
    t.i0 = i0;
    t.i1 = i0 + 1;
    t.w1 = static_cast<T>(f - i0);
    return t;
}

template <class T>
inline void bilinear_row(const T* ip, T* op, int W, int OW, const Tap<T>& ty) {
    for (int ox = 0; ox < OW; ++ox) {
        const Tap<T> tx = resize_tap<T>(ox, OW, W);
        const T a = ip[static_cast<size_t>(ty.i0) * W + tx.i0];
        const T b = ip[static_cast<size_t>(ty.i0) * W + tx.i1];
        const T c = ip[static_cast<size_t>(ty.i1) * W + tx.i0];
        const T d = ip[static_cast<size_t>(ty.i1) * W + tx.i1];
        op[ox] = (T(1) - ty.w1) * ((T(1) - tx.w1) * a + tx.w1 * b) +
                 ty.w1 * ((T(1) - tx.w1) * c + tx.w1 * d);
    }
}

template <class T>
inline void bilinear_scatter_plane(const T* gp, T* ip, int H, int W, int OH, int OW) {
    for (int oy = 0; oy < OH; ++oy) {
        const Tap<T> ty = resize_tap<T>(oy, OH, H);
        for (int ox = 0; ox < OW; ++ox) {
            const Tap<T> tx = resize_tap<T>(ox, OW, W);
            const T v = gp[static_cast<size_t>(oy) * OW + ox];
            ip[static_cast<size_t>(ty.i0) * W + tx.i0] += (T(1) - ty.w1) * (T(1) - tx.w1) * v;
            ip[static_cast<size_t>(ty.i0) * W + tx.i1] += (T(1) - ty.w1) * tx.w1 * v;
            ip[static_cast<size_t>(ty.i1) * W + tx.i0] += ty.w1 * (T(1) - tx.w1) * v;
            ip[static_cast<size_t>(ty.i1) * W + tx.i1] += ty.w1 * tx.w1 * v;
        }
    }
}

}  // namespace detail

namespace serial {

template <class T>
void conv2d_fwd(const T* in, const T* wgt, const T* bias, T* out, const ConvGeom& g) {
    std::vector<T> inT(static_cast<size_t>(g.H) * g.W * g.C);
    std::vector<T> wT(static_cast<size_t>(g.OC) * 9 * g.C);
    detail::channels_last(in, g.C, g.H, g.W, inT.data());
    detail::weight_ic_last(wgt, g.OC, g.C, wT.data());
    for (int oc = 0; oc < g.OC; ++oc)
        for (int oy = 0; oy < g.OH; ++oy)
            for (int ox = 0; ox < g.OW; ++ox)
                out[(static_cast<size_t>(oc) * g.OH + oy) * g.OW + ox] =
                    detail::conv_point(inT.data(), wT.data(), g, oc, oy, ox, bias);
}

template <class T>
void conv2d_bwd_input(const T* gout, const T* wgt, T* gin, const ConvGeom& g) {
    std::vector<T> goT(static_cast<size_t>(g.OH) * g.OW * g.OC);
    std::vector<T> wT(static_cast<size_t>(9) * g.C * g.OC);
    detail::channels_last(gout, g.OC, g.OH, g.OW, goT.data());
    detail::weight_oc_last(wgt, g.OC, g.C, wT.data());
    for (int ic = 0; ic < g.C; ++ic)
        for (int iy = 0; iy < g.H; ++iy)
            for (int ix = 0; ix < g.W; ++ix)
                gin[(static_cast<size_t>(ic) * g.H + iy) * g.W + ix] +=
                    detail::conv_back_point(goT.data(), wT.data(), g, ic, iy, ix);
}

template <class T>
void conv2d_bwd_weight(const T* gout, const T* in, T* gwgt, const ConvGeom& g) {
    std::vector<T> inT(static_cast<size_t>(g.H) * g.W * g.C);
    detail::channels_last(in, g.C, g.H, g.W, inT.data());
    for (int oc = 0; oc < g.OC; ++oc) detail::conv_wslice(gout, inT.data(), gwgt, g, oc);
}

template <class T>
void conv2d_bwd_bias(const T* gout, T* gbias, const ConvGeom& g) {
    for (int oc = 0; oc < g.OC; ++oc) {
        T acc = T(0);
        const T* go = gout + static_cast<size_t>(oc) * g.OH * g.OW;
        for (int i = 0; i < g.OH * g.OW; ++i) acc += go[i];
        gbias[oc] += acc;
    }
}

template <class T>
void bilinear_fwd(const T* in, int C, int H, int W, T* out, int OH, int OW) {
    for (int c = 0; c < C; ++c)
        for (int oy = 0; oy < OH; ++oy)
            detail::bilinear_row(in + static_cast<size_t>(c) * H * W,
                                 out + (static_cast<size_t>(c) * OH + oy) * OW, W, OW,
                                 detail::resize_tap<T>(oy, OH, H));
}

template <class T>
void bilinear_bwd(const T* gout, int C, int H, int W, T* gin, int OH, int OW) {
    for (int c = 0; c < C; ++c)
        detail::bilinear_scatter_plane(gout + static_cast<size_t>(c) * OH * OW,
                                       gin + static_cast<size_t>(c) * H * W, H, W, OH, OW);
}

template <class T>
void matvec(const T* wm, const T* bias, int out_n, int in_n, const T* x, T* y) {
    for (int o = 0; o < out_n; ++o) {
        T acc = bias ? bias[o] : T(0);
        const T* row = wm + static_cast<size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

template <class T>
void matvec_bwd_x(const T* wm, int out_n, int in_n, const T* gy, T* gx) {
    // row-major friendly: accumulate in scratch, add once at the end; per
    // element this is o ascending, matching the parallel gather
    std::vector<T> acc(static_cast<size_t>(in_n), T(0));
    for (int o = 0; o < out_n; ++o) {
        const T g = gy[o];
        const T* row = wm + static_cast<size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) acc[i] += row[i] * g;
    }
    for (int i = 0; i < in_n; ++i) gx[i] += acc[i];
}

template <class T>
void matvec_bwd_w(const T* gy, const T* x, int out_n, int in_n, T* gw, T* gb) {
    for (int o = 0; o < out_n; ++o) {
        const T g = gy[o];
        T* row = gw + static_cast<size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) row[i] += g * x[i];
        if (gb) gb[o] += g;
    }
}

}  // namespace serial

namespace omp {

template <class T>
void conv2d_fwd(const T* in, const T* wgt, const T* bias, T* out, const ConvGeom& g) {
    std::vector<T> inT(static_cast<size_t>(g.H) * g.W * g.C);
    std::vector<T> wT(static_cast<size_t>(g.OC) * 9 * g.C);
    detail::channels_last(in, g.C, g.H, g.W, inT.data());
    detail::weight_ic_last(wgt, g.OC, g.C, wT.data());
#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < g.OC; ++oc)
        for (int oy = 0; oy < g.OH; ++oy)
            for (int ox = 0; ox < g.OW; ++ox)
                out[(static_cast<size_t>(oc) * g.OH + oy) * g.OW + ox] =
                    detail::conv_point(inT.data(), wT.data(), g, oc, oy, ox, bias);
}

template <class T>
void conv2d_bwd_input(const T* gout, const T* wgt, T* gin, const ConvGeom& g) {
    std::vector<T> goT(static_cast<size_t>(g.OH) * g.OW * g.OC);
    std::vector<T> wT(static_cast<size_t>(9) * g.C * g.OC);
    detail::channels_last(gout, g.OC, g.OH, g.OW, goT.data());
    detail::weight_oc_last(wgt, g.OC, g.C, wT.data());
#pragma omp parallel for collapse(2) schedule(static)
    for (int ic = 0; ic < g.C; ++ic)
        for (int iy = 0; iy < g.H; ++iy)
            for (int ix = 0; ix < g.W; ++ix)
                gin[(static_cast<size_t>(ic) * g.H + iy) * g.W + ix] +=
                    detail::conv_back_point(goT.data(), wT.data(), g, ic, iy, ix);
}

template <class T>
void conv2d_bwd_weight(const T* gout, const T* in, T* gwgt, const ConvGeom& g) {
    std::vector<T> inT(static_cast<size_t>(g.H) * g.W * g.C);
    detail::channels_last(in, g.C, g.H, g.W, inT.data());
    // each thread owns whole output-channel slices of the weight gradient
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < g.OC; ++oc) detail::conv_wslice(gout, inT.data(), gwgt, g, oc);
}

template <class T>
void conv2d_bwd_bias(const T* gout, T* gbias, const ConvGeom& g) {
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < g.OC; ++oc) {
        T acc = T(0);
        const T* go = gout + static_cast<size_t>(oc) * g.OH * g.OW;
        for (int i = 0; i < g.OH * g.OW; ++i) acc += go[i];
        gbias[oc] += acc;
    }
}

template <class T>
void bilinear_fwd(const T* in, int C, int H, int W, T* out, int OH, int OW) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int c = 0; c < C; ++c)
        for (int oy = 0; oy < OH; ++oy)
            detail::bilinear_row(in + static_cast<size_t>(c) * H * W,
                                 out + (static_cast<size_t>(c) * OH + oy) * OW, W, OW,
                                 detail::resize_tap<T>(oy, OH, H));
}

template <class T>
void bilinear_bwd(const T* gout, int C, int H, int W, T* gin, int OH, int OW) {
    // scatter: parallel only over channels, each plane owned by one thread
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c)
        detail::bilinear_scatter_plane(gout + static_cast<size_t>(c) * OH * OW,
                                       gin + static_cast<size_t>(c) * H * W, H, W, OH, OW);
}

template <class T>
void matvec(const T* wm, const T* bias, int out_n, int in_n, const T* x, T* y) {
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out_n; ++o) {
        T acc = bias ? bias[o] : T(0);
        const T* row = wm + static_cast<size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

template <class T>
void matvec_bwd_x(const T* wm, int out_n, int in_n, const T* gy, T* gx) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < in_n; ++i) {
        T acc = T(0);
        for (int o = 0; o < out_n; ++o) acc += wm[static_cast<size_t>(o) * in_n + i] * gy[o];
        gx[i] += acc;
    }
}

template <class T>
void matvec_bwd_w(const T* gy, const T* x, int out_n, int in_n, T* gw, T* gb) {
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out_n; ++o) {
        const T g = gy[o];
        T* row = gw + static_cast<size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) row[i] += g * x[i];
        if (gb) gb[o] += g;
    }
}

}  // namespace omp

#define FPDN_INSTANTIATE(NS, T)                                                          \
    template void NS::conv2d_fwd<T>(const T*, const T*, const T*, T*, const ConvGeom&);  \
    template void NS::conv2d_bwd_input<T>(const T*, const T*, T*, const ConvGeom&);      \
    template void NS::conv2d_bwd_weight<T>(const T*, const T*, T*, const ConvGeom&);     \
    template void NS::conv2d_bwd_bias<T>(const T*, T*, const ConvGeom&);                 \
    template void NS::bilinear_fwd<T>(const T*, int, int, int, T*, int, int);            \
    template void NS::bilinear_bwd<T>(const T*, int, int, int, T*, int, int);            \
    template void NS::matvec<T>(const T*, const T*, int, int, const T*, T*);             \
    template void NS::matvec_bwd_x<T>(const T*, int, int, const T*, T*);                 \
    template void NS::matvec_bwd_w<T>(const T*, const T*, int, int, T*, T*);

FPDN_INSTANTIATE(serial, float)
FPDN_INSTANTIATE(serial, double)
FPDN_INSTANTIATE(omp, float)
FPDN_INSTANTIATE(omp, double)

#undef FPDN_INSTANTIATE

}  // namespace fpdn::kernels
