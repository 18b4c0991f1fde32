#!/usr/bin/env python3
"""Generates frozen reference vectors for the wavelet tests.

Independent implementation: the periodized transform is built as an explicit
orthogonal matrix per axis and inverted by transposition, rather than the
filter-scatter form the library uses. Inputs come from a small LCG that the
C++ tests reproduce, so only expected outputs are embedded.

Run from the repository root:  python3 tests/make_wavelet_refs.py
"""

import numpy as np

SYM4_DEC_LO = np.array([
    -0.07576571478927333, -0.02963552764599851, 0.49761866763201545,
    0.8037387518059161, 0.29785779560527736, -0.09921954357684722,
    -0.012603967262037833, 0.0322231006040427,
])
HAAR_DEC_LO = np.array([0.7071067811865476, 0.7071067811865476])


def bank(dec_lo):
    L = len(dec_lo)
    dec_hi = np.array([(-1.0 if j % 2 == 0 else 1.0) * dec_lo[L - 1 - j]
                       for j in range(L)])
    return dec_lo, dec_hi


def analysis_matrix(n, dec_lo, dec_hi):
    """Rows 0..n/2-1: lowpass shifts; rows n/2..n-1: highpass. n must be even."""
    assert n % 2 == 0 and n >= len(dec_lo)
    A = np.zeros((n, n))
    for k in range(n // 2):
        for j in range(len(dec_lo)):
            i = (2 * k + 1 - j) % n
            A[k, i] += dec_lo[j]
            A[n // 2 + k, i] += dec_hi[j]
    return A


def dwt1(x, dec_lo, dec_hi):
    n = len(x)
    xe = np.concatenate([x, x[-1:]]) if n % 2 else x
    A = analysis_matrix(len(xe), dec_lo, dec_hi)
    c = A @ xe
    return c[: len(xe) // 2], c[len(xe) // 2:]


def idwt1(ca, cd, n, dec_lo, dec_hi):
    ne = n + (n % 2)
    A = analysis_matrix(ne, dec_lo, dec_hi)
    xe = A.T @ np.concatenate([ca, cd])
    return xe[:n]


def dwt2(img, dec_lo, dec_hi):
    h, w = img.shape
    hw, hh = (w + 1) // 2, (h + 1) // 2
    rl = np.zeros((h, hw))
    rh = np.zeros((h, hw))
    for y in range(h):
        rl[y], rh[y] = dwt1(img[y], dec_lo, dec_hi)
    ll = np.zeros((hh, hw))
    d = [np.zeros((hh, hw)) for _ in range(3)]
    for x in range(hw):
        ll[:, x], d[0][:, x] = dwt1(rl[:, x], dec_lo, dec_hi)
        d[1][:, x], d[2][:, x] = dwt1(rh[:, x], dec_lo, dec_hi)
    return ll, d


def decompose(img, levels, dec_lo, dec_hi):
    details = []
    cur = img
    for _ in range(levels):
        cur, d = dwt2(cur, dec_lo, dec_hi)
        details.append(d)
    return cur, details


class Lcg:
    def __init__(self, seed):
        self.s = seed

    def next(self):
        self.s = (1103515245 * self.s + 12345) % (1 << 31)
        return self.s / float(1 << 31)

    def mat(self, h, w):
        return np.array([[self.next() for _ in range(w)] for _ in range(h)])


def self_check():
    for dec_lo in (SYM4_DEC_LO, HAAR_DEC_LO):
        lo, hi = bank(dec_lo)
        for n in (8, 16, 26, 52):
            if n < len(lo):
                continue
            A = analysis_matrix(n, lo, hi)
            assert np.abs(A @ A.T - np.eye(n)).max() < 1e-12, "not orthogonal"
        for n in (8, 13, 16, 103):
            if n < len(lo):
                continue
            x = Lcg(99 + n).mat(1, n)[0]
            ca, cd = dwt1(x, lo, hi)
            xr = idwt1(ca, cd, n, lo, hi)
            assert np.abs(xr - x).max() < 1e-12, "no perfect reconstruction"
    lo, hi = bank(SYM4_DEC_LO)
    const = np.full((64, 64), 0.37)
    cur = const
    for k in range(3):
        cur, _ = dwt2(cur, lo, hi)
    assert np.abs(cur - 0.37 * 2 ** 3).max() < 1e-10, "constant scaling wrong"
    img = Lcg(5).mat(16, 16)
    ll, d = dwt2(img, lo, hi)
    e_in = (img ** 2).sum()
    e_out = (ll ** 2).sum() + sum((b ** 2).sum() for b in d)
    assert abs(e_in - e_out) < 1e-10, "energy not preserved"


def emit_array(f, name, arr):
    flat = np.asarray(arr).ravel()
    f.write(f"inline const std::vector<double> {name} = {{\n")
    for i in range(0, len(flat), 4):
        chunk = ", ".join(f"{v:.17g}" for v in flat[i:i + 4])
        f.write(f"    {chunk},\n")
    f.write("};\n\n")


def main():
    self_check()
    lo4, hi4 = bank(SYM4_DEC_LO)
    loh, hih = bank(HAAR_DEC_LO)

    with open("tests/wavelet_ref_data.hpp", "w") as f:
        f.write("#pragma once\n\n// Generated by tests/make_wavelet_refs.py; do not edit.\n")
        f.write("// Inputs are LCG streams: s = (1103515245*s + 12345) mod 2^31,\n")
        f.write("// value = s / 2^31, row-major fill.\n\n#include <vector>\n\n")
        f.write("namespace wavref {\n\n")

        # 1D sym4, even length 16, seed 21
        x = Lcg(21).mat(1, 16)[0]
        ca, cd = dwt1(x, lo4, hi4)
        emit_array(f, "d1_sym4_n16_ca", ca)
        emit_array(f, "d1_sym4_n16_cd", cd)

        # 1D sym4, odd length 11, seed 22
        x = Lcg(22).mat(1, 11)[0]
        ca, cd = dwt1(x, lo4, hi4)
        emit_array(f, "d1_sym4_n11_ca", ca)
        emit_array(f, "d1_sym4_n11_cd", cd)

        # 1D haar, odd length 7, seed 23
        x = Lcg(23).mat(1, 7)[0]
        ca, cd = dwt1(x, loh, hih)
        emit_array(f, "d1_haar_n7_ca", ca)
        emit_array(f, "d1_haar_n7_cd", cd)

        # 2D sym4 single level, odd 13x10, seed 31
        img = Lcg(31).mat(13, 10)
        ll, d = dwt2(img, lo4, hi4)
        emit_array(f, "d2_sym4_13x10_ll", ll)
        for i in range(3):
            emit_array(f, f"d2_sym4_13x10_d{i}", d[i])

        # 2D sym4 two levels, 32x32, seed 32
        img = Lcg(32).mat(32, 32)
        approx, details = decompose(img, 2, lo4, hi4)
        emit_array(f, "p_sym4_32_approx", approx)
        for lvl in range(2):
            for i in range(3):
                emit_array(f, f"p_sym4_32_l{lvl + 1}_d{i}", details[lvl][i])

        f.write("}  // namespace wavref\n")
    print("wrote tests/wavelet_ref_data.hpp")


if __name__ == "__main__":
    main()
