#pragma once

#include <cmath>
#include <vector>

#include "fpdn/ops.hpp"
#include "fpdn/rng.hpp"

namespace fpdn {

namespace detail {

// Glorot/Xavier uniform: +-sqrt(6 / (fan_in + fan_out)), biases zero.
template <class T>
void xavier_fill(Var<T>& w, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& x : w->data) x = static_cast<T>(rng.uniform(-limit, limit));
}

}  // namespace detail

template <class T>
struct ConvLayer {
    Var<T> w, b;
    int stride;

    ConvLayer(int in_ch, int out_ch, int stride_, Rng& rng) : stride(stride_) {
        w = make_var<T>({out_ch, in_ch, 3, 3});
        b = make_var<T>({out_ch});
        detail::xavier_fill(w, in_ch * 9, out_ch * 9, rng);
        w->set_requires_grad(true);
        b->set_requires_grad(true);
    }

    Var<T> operator()(Tape<T>& tape, const Var<T>& x) const {
        return ops::conv2d(tape, x, w, b, stride);
    }

    std::vector<Var<T>> params() const { return {w, b}; }
};

template <class T>
struct TransposeConvLayer {
    Var<T> w, b;  // w: in_ch x out_ch x 3 x 3 (adjoint of a down conv)
    int stride;

    TransposeConvLayer(int in_ch, int out_ch, int stride_, Rng& rng) : stride(stride_) {
        w = make_var<T>({in_ch, out_ch, 3, 3});
        b = make_var<T>({out_ch});
        detail::xavier_fill(w, in_ch * 9, out_ch * 9, rng);
        w->set_requires_grad(true);
        b->set_requires_grad(true);
    }

    Var<T> operator()(Tape<T>& tape, const Var<T>& x, int target_h, int target_w) const {
        return ops::conv2d_transpose(tape, x, w, b, stride, target_h, target_w);
    }

    std::vector<Var<T>> params() const { return {w, b}; }
};

template <class T>
struct DenseLayer {
    Var<T> w, b;

    DenseLayer(int in_n, int out_n, Rng& rng) {
        w = make_var<T>({out_n, in_n});
        b = make_var<T>({out_n});
        detail::xavier_fill(w, in_n, out_n, rng);
        w->set_requires_grad(true);
        b->set_requires_grad(true);
    }

    Var<T> operator()(Tape<T>& tape, const Var<T>& x) const {
        return ops::dense(tape, x, w, b);
    }

    std::vector<Var<T>> params() const { return {w, b}; }
};

}  // namespace fpdn
