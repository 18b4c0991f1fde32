#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fpdn/kernels.hpp"
#include "fpdn/tape.hpp"
#include "fpdn/tensor.hpp"

namespace fpdn::ops {

namespace detail {

template <class T>
void check_same_shape(const char* op, const Var<T>& a, const Var<T>& b) {
    if (!same_shape(*a, *b))
        throw ContractError(std::string(op) + ": shape mismatch " + a->shape_str() + " vs " +
                            b->shape_str());
}

struct Chw {
    int c, h, w;
};

template <class T>
Chw chw(const char* op, const Var<T>& x) {
    if (x->shape.size() != 3)
        throw ContractError(std::string(op) + ": expected CxHxW tensor, got " + x->shape_str());
    return {x->shape[0], x->shape[1], x->shape[2]};
}

}  // namespace detail

// ---- elementwise ----

template <class T, class Fwd, class Bwd>
Var<T> binary_op(Tape<T>& tape, const char* name, const Var<T>& a, const Var<T>& b, Fwd fwd,
                 Bwd bwd) {
    detail::check_same_shape(name, a, b);
    auto out = make_var<T>(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) fwd(i, a->data[i], b->data[i], out->data[i]);
    if (tape.wants({a, b})) {
        tape.record(name, {a, b}, out, [a, b, out, bwd]() {
            for (size_t i = 0; i < out->data.size(); ++i) {
                const T go = out->grad[i];
                T ga = T(0), gb = T(0);
                bwd(i, a->data[i], b->data[i], go, ga, gb);
                if (a->requires_grad) a->grad[i] += ga;
                if (b->requires_grad) b->grad[i] += gb;
            }
        });
    }
    return out;
}

template <class T, class Fwd, class Bwd>
Var<T> unary_op(Tape<T>& tape, const char* name, const Var<T>& a, Fwd fwd, Bwd bwd) {
    auto out = make_var<T>(a->shape);
    for (size_t i = 0; i < out->data.size(); ++i) out->data[i] = fwd(a->data[i]);
    if (tape.wants({a})) {
        tape.record(name, {a}, out, [a, out, bwd]() {
            for (size_t i = 0; i < out->data.size(); ++i)
                a->grad[i] += bwd(a->data[i], out->data[i]) * out->grad[i];
        });
    }
    return out;
}

template <class T>
Var<T> add(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
    return binary_op(
        tape, "add", a, b, [](size_t, T x, T y, T& o) { o = x + y; },
        [](size_t, T, T, T go, T& ga, T& gb) { ga = go; gb = go; });
}

template <class T>
Var<T> sub(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
    return binary_op(
        tape, "sub", a, b, [](size_t, T x, T y, T& o) { o = x - y; },
        [](size_t, T, T, T go, T& ga, T& gb) { ga = go; gb = -go; });
}

template <class T>
Var<T> mul(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
    return binary_op(
        tape, "mul", a, b, [](size_t, T x, T y, T& o) { o = x * y; },
        [](size_t, T x, T y, T go, T& ga, T& gb) { ga = go * y; gb = go * x; });
}

template <class T>
Var<T> relu(Tape<T>& tape, const Var<T>& a) {
    return unary_op(
        tape, "relu", a, [](T x) { return x > T(0) ? x : T(0); },
        [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <class T>
Var<T> sigmoid(Tape<T>& tape, const Var<T>& a) {
    return unary_op(
        tape, "sigmoid", a,
        [](T x) { return T(1) / (T(1) + std::exp(-x)); },
        [](T, T s) { return s * (T(1) - s); });
}

template <class T>
Var<T> log_(Tape<T>& tape, const Var<T>& a) {
    // NaN passes through so a diverging loss reaches the finiteness check
    for (T x : a->data)
        if (x <= T(0)) throw ContractError("log: input must be positive");
    return unary_op(
        tape, "log", a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <class T>
Var<T> square(Tape<T>& tape, const Var<T>& a) {
    return unary_op(
        tape, "square", a, [](T x) { return x * x; }, [](T x, T) { return T(2) * x; });
}

template <class T>
Var<T> add_const(Tape<T>& tape, const Var<T>& a, T c) {
    return unary_op(
        tape, "add_const", a, [c](T x) { return x + c; }, [](T, T) { return T(1); });
}

template <class T>
Var<T> mul_const(Tape<T>& tape, const Var<T>& a, T c) {
    return unary_op(
        tape, "mul_const", a, [c](T x) { return x * c; }, [c](T, T) { return c; });
}

// ---- reductions ----

template <class T>
Var<T> sum(Tape<T>& tape, const Var<T>& a) {
    if (a->data.empty()) throw ContractError("sum: empty tensor");
    T acc = T(0);
    for (T x : a->data) acc += x;
    auto out = scalar_var<T>(acc);
    if (tape.wants({a})) {
        tape.record("sum", {a}, out, [a, out]() {
            const T go = out->grad[0];
            for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += go;
        });
    }
    return out;
}

template <class T>
Var<T> mean(Tape<T>& tape, const Var<T>& a) {
    if (a->data.empty()) throw ContractError("mean: empty tensor");
    return mul_const(tape, sum(tape, a), T(1) / static_cast<T>(a->size()));
}

// Broadcast divide by a scalar tensor (the only broadcast the model needs,
// besides constants): out_i = a_i / s.
template <class T>
Var<T> div_scalar(Tape<T>& tape, const Var<T>& a, const Var<T>& s) {
    if (!s->is_scalar()) throw ContractError("div_scalar: divisor must be scalar");
    const T sv = s->data[0];
    auto out = make_var<T>(a->shape);
    for (size_t i = 0; i < a->data.size(); ++i) out->data[i] = a->data[i] / sv;
    if (tape.wants({a, s})) {
        tape.record("div_scalar", {a, s}, out, [a, s, out]() {
            const T sv2 = s->data[0];
            T gs = T(0);
            for (size_t i = 0; i < out->data.size(); ++i) {
                const T go = out->grad[i];
                if (a->requires_grad) a->grad[i] += go / sv2;
                gs += go * (-a->data[i] / (sv2 * sv2));
            }
            if (s->requires_grad) s->grad[0] += gs;
        });
    }
    return out;
}

// ---- shape ops ----

template <class T>
Var<T> reshape(Tape<T>& tape, const Var<T>& a, std::vector<int> shape) {
    if (shape_numel<T>(shape) != a->size())
        throw ContractError("reshape: element count mismatch");
    auto out = make_var<T>(std::move(shape), a->data);
    if (tape.wants({a})) {
        tape.record("reshape", {a}, out, [a, out]() {
            for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += out->grad[i];
        });
    }
    return out;
}

// a's channels first, then b's. Gradient splits back into the two slices.
template <class T>
Var<T> concat_channels(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
    const auto da = detail::chw("concat_channels", a);
    const auto db = detail::chw("concat_channels", b);
    if (da.h != db.h || da.w != db.w)
        throw DimensionError("concat_channels: spatial mismatch " + a->shape_str() + " vs " +
                             b->shape_str());
    auto out = make_var<T>({da.c + db.c, da.h, da.w});
    std::copy(a->data.begin(), a->data.end(), out->data.begin());
    std::copy(b->data.begin(), b->data.end(), out->data.begin() + a->data.size());
    if (tape.wants({a, b})) {
        tape.record("concat_channels", {a, b}, out, [a, b, out]() {
            const size_t na = a->data.size();
            if (a->requires_grad)
                for (size_t i = 0; i < na; ++i) a->grad[i] += out->grad[i];
            if (b->requires_grad)
                for (size_t i = 0; i < b->data.size(); ++i) b->grad[i] += out->grad[na + i];
        });
    }
    return out;
}

// ---- layer primitives ----

template <class T>
Var<T> conv2d(Tape<T>& tape, const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
              int stride) {
    const auto d = detail::chw("conv2d", x);
    if (weight->shape.size() != 4 || weight->shape[2] != 3 || weight->shape[3] != 3)
        throw ContractError("conv2d: weight must be OCxICx3x3, got " + weight->shape_str());
    if (weight->shape[1] != d.c)
        throw ContractError("conv2d: input has " + std::to_string(d.c) + " channels, layer expects " +
                            std::to_string(weight->shape[1]));
    const int oc = weight->shape[0];
    const auto g = kernels::conv_geom(d.c, d.h, d.w, oc, stride);
    auto out = make_var<T>({oc, g.OH, g.OW});
    kernels::conv2d_fwd(x->data.data(), weight->data.data(), bias->data.data(), out->data.data(),
                        g);
    if (tape.wants({x, weight, bias})) {
        tape.record("conv2d", {x, weight, bias}, out, [x, weight, bias, out, g]() {
            if (x->requires_grad)
                kernels::conv2d_bwd_input(out->grad.data(), weight->data.data(), x->grad.data(), g);
            if (weight->requires_grad)
                kernels::conv2d_bwd_weight(out->grad.data(), x->data.data(), weight->grad.data(),
                                           g);
            if (bias->requires_grad) kernels::conv2d_bwd_bias(out->grad.data(), bias->grad.data(), g);
        });
    }
    return out;
}

// Keeps rows [0,th) and cols [0,tw), zero-filling any excess: the asymmetric
// output padding that reconciles odd target sizes at the bottom/right edge.
template <class T>
Var<T> crop_or_pad(Tape<T>& tape, const Var<T>& x, int th, int tw) {
    const auto d = detail::chw("crop_or_pad", x);
    if (th == d.h && tw == d.w) return x;
    auto out = make_var<T>({d.c, th, tw});
    const int ch = std::min(th, d.h), cw = std::min(tw, d.w);
    for (int c = 0; c < d.c; ++c)
        for (int y = 0; y < ch; ++y)
            for (int xx = 0; xx < cw; ++xx)
                out->data[(static_cast<size_t>(c) * th + y) * tw + xx] =
                    x->data[(static_cast<size_t>(c) * d.h + y) * d.w + xx];
    if (tape.wants({x})) {
        tape.record("crop_or_pad", {x}, out, [x, out, d, th, tw, ch, cw]() {
            for (int c = 0; c < d.c; ++c)
                for (int y = 0; y < ch; ++y)
                    for (int xx = 0; xx < cw; ++xx)
                        x->grad[(static_cast<size_t>(c) * d.h + y) * d.w + xx] +=
                            out->grad[(static_cast<size_t>(c) * th + y) * tw + xx];
        });
    }
    return out;
}

// Transpose convolution as the exact adjoint of a stride-s "same" conv from
// (target_h, target_w) down to the input size. weight layout: IC x OC x 3 x 3.
// Targets that are not ceil-consistent with the input, but within one stride
// of stride*H, are reached by bottom/right crop or zero pad.
template <class T>
Var<T> conv2d_transpose(Tape<T>& tape, const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
                        int stride, int target_h, int target_w) {
    const auto d = detail::chw("conv2d_transpose", x);
    if (weight->shape.size() != 4 || weight->shape[2] != 3 || weight->shape[3] != 3)
        throw ContractError("conv2d_transpose: weight must be ICxOCx3x3, got " +
                            weight->shape_str());
    if (weight->shape[0] != d.c)
        throw ContractError("conv2d_transpose: input has " + std::to_string(d.c) +
                            " channels, layer expects " + std::to_string(weight->shape[0]));
    const int oc = weight->shape[1];

    auto reachable = [&](int t, int n) { return (t + stride - 1) / stride == n; };
    auto nearest = [&](int t, int n) {
        // reachable sizes are [s*(n-1)+1, s*n]
        if (reachable(t, n)) return t;
        if (t < stride * n - stride || t > stride * n + stride)
            throw DimensionError("conv2d_transpose: target " + std::to_string(t) +
                                 " unreachable from input extent " + std::to_string(n) +
                                 " at stride " + std::to_string(stride));
        return t > stride * n ? stride * n : stride * (n - 1) + 1;
    };
    const int rh = nearest(target_h, d.h);
    const int rw = nearest(target_w, d.w);

    // Geometry of the corresponding down conv: (oc, rh, rw) -> (d.c, d.h, d.w)
    const auto g = kernels::conv_geom(oc, rh, rw, d.c, stride);
    auto core = make_var<T>({oc, rh, rw});
    kernels::conv2d_bwd_input(x->data.data(), weight->data.data(), core->data.data(), g);
    for (int c = 0; c < oc; ++c) {
        const T b = bias->data[c];
        T* p = core->data.data() + static_cast<size_t>(c) * rh * rw;
        for (int i = 0; i < rh * rw; ++i) p[i] += b;
    }
    if (tape.wants({x, weight, bias})) {
        tape.record("conv2d_transpose", {x, weight, bias}, core, [x, weight, bias, core, g]() {
            if (x->requires_grad) {
                std::vector<T> tmp(x->data.size());
                kernels::conv2d_fwd(core->grad.data(), weight->data.data(),
                                    static_cast<const T*>(nullptr), tmp.data(), g);
                for (size_t i = 0; i < tmp.size(); ++i) x->grad[i] += tmp[i];
            }
            if (weight->requires_grad)
                kernels::conv2d_bwd_weight(x->data.data(), core->grad.data(), weight->grad.data(),
                                           g);
            if (bias->requires_grad) {
                const int occ = core->shape[0], n = core->shape[1] * core->shape[2];
                for (int c = 0; c < occ; ++c) {
                    T acc = T(0);
                    const T* p = core->grad.data() + static_cast<size_t>(c) * n;
                    for (int i = 0; i < n; ++i) acc += p[i];
                    bias->grad[c] += acc;
                }
            }
        });
    }
    return crop_or_pad(tape, core, target_h, target_w);
}

template <class T>
Var<T> bilinear_resize(Tape<T>& tape, const Var<T>& x, int target_h, int target_w) {
    const auto d = detail::chw("bilinear_resize", x);
    if (target_h < 1 || target_w < 1)
        throw ContractError("bilinear_resize: target dims must be >= 1");
    auto out = make_var<T>({d.c, target_h, target_w});
    kernels::bilinear_fwd(x->data.data(), d.c, d.h, d.w, out->data.data(), target_h, target_w);
    if (tape.wants({x})) {
        tape.record("bilinear_resize", {x}, out, [x, out, d, target_h, target_w]() {
            kernels::bilinear_bwd(out->grad.data(), d.c, d.h, d.w, x->grad.data(), target_h,
                                  target_w);
        });
    }
    return out;
}

template <class T>
Var<T> dense(Tape<T>& tape, const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
    if (weight->shape.size() != 2)
        throw ContractError("dense: weight must be 2D, got " + weight->shape_str());
    const int out_n = weight->shape[0], in_n = weight->shape[1];
    if (x->size() != in_n)
        throw ContractError("dense: input size " + std::to_string(x->size()) +
                            " != layer input " + std::to_string(in_n));
    auto out = make_var<T>({out_n});
    kernels::matvec(weight->data.data(), bias->data.data(), out_n, in_n, x->data.data(),
                    out->data.data());
    if (tape.wants({x, weight, bias})) {
        tape.record("dense", {x, weight, bias}, out, [x, weight, bias, out, out_n, in_n]() {
            if (x->requires_grad)
                kernels::matvec_bwd_x(weight->data.data(), out_n, in_n, out->grad.data(),
                                      x->grad.data());
            if (weight->requires_grad)
                kernels::matvec_bwd_w(out->grad.data(), x->data.data(), out_n, in_n,
                                      weight->grad.data(),
                                      bias->requires_grad ? bias->grad.data() : nullptr);
        });
    }
    return out;
}

}  // namespace fpdn::ops
