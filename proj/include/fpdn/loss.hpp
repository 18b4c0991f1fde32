#pragma once

#include "fpdn/ops.hpp"

namespace fpdn {

template <class T>
struct LossTerms {
    Var<T> total, l2, kld;
};

// Per-image loss: squared reconstruction error plus a KL divergence between
// the output and target treated as normalized intensity distributions,
// KL(p_out || p_target). eps keeps both distributions strictly positive.
template <class T>
LossTerms<T> reconstruction_loss(Tape<T>& tape, const Var<T>& out, const Var<T>& target,
                                 T lambda, T eps = T(1e-8)) {
    auto l2 = ops::sum(tape, ops::square(tape, ops::sub(tape, out, target)));

    auto po = ops::add_const(tape, out, eps);
    auto p = ops::div_scalar(tape, po, ops::sum(tape, po));
    auto qo = ops::add_const(tape, target, eps);
    auto q = ops::div_scalar(tape, qo, ops::sum(tape, qo));
    auto kld = ops::sum(
        tape, ops::mul(tape, p, ops::sub(tape, ops::log_(tape, p), ops::log_(tape, q))));

    LossTerms<T> lt;
    lt.l2 = l2;
    lt.kld = kld;
    lt.total = ops::add(tape, l2, ops::mul_const(tape, kld, lambda));
    return lt;
}

}  // namespace fpdn
