#!/usr/bin/env python3
"""Regenerate the static filter-bank tables in src/wavelet_tables.cpp.

Daubechies filters (db2..db10) are obtained by spectral factorization of the
Daubechies half-band polynomial, carried out in 60-digit arithmetic so the
printed doubles are correctly rounded.

The discrete Meyer filter is the usual 62-tap FIR approximation: sample the
Meyer conjugate mirror filter response on a dense grid, inverse-FFT, truncate
to 62 taps, then apply a small least-norm correction so the truncated filter
satisfies the double-shift orthogonality and DC constraints to machine
precision (the correction is ~1e-9, below the truncation error itself).

Usage: python3 scripts/make_wavelet_tables.py > src/wavelet_tables.cpp
"""

import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 60


def daubechies(p):
    """Length-2p orthogonal Daubechies scaling filter, sum = sqrt(2)."""
    # P(y) = sum_{k<p} C(p-1+k, k) y^k ; |H|^2 = 2 cos^{2p}(w/2) P(sin^2(w/2))
    coeffs = [mp.binomial(p - 1 + k, k) for k in range(p)]
    # Map y -> (2 - z - 1/z)/4 and factor the Laurent polynomial in z.
    # Q(z) = P(y(z)) * (4z)^{p-1} is a polynomial of degree 2(p-1).
    z = np.polynomial.Polynomial
    # Build Q in mpmath: y(z) = (2z - z^2 - 1)/(4z); y^k contributes
    # ((2z - z^2 - 1)/4)^k * z^{p-1-k}
    base = [mp.mpf(-1) / 4, mp.mpf(2) / 4, mp.mpf(-1) / 4]  # (-1 + 2z - z^2)/4

    def polymul(a, b):
        out = [mp.mpf(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    Q = [mp.mpf(0)] * (2 * p - 1)
    for k in range(p):
        term = [mp.mpf(1)]
        for _ in range(k):
            term = polymul(term, base)
        # multiply by z^{p-1-k}
        shifted = [mp.mpf(0)] * (p - 1 - k) + term
        for i, c in enumerate(shifted):
            Q[i] += coeffs[k] * c
    # roots of Q (degree 2p-2); they come in (z, 1/z) pairs
    roots = mp.polyroots(list(reversed(Q)), maxsteps=200, extraprec=200)
    inside = [r for r in roots if abs(r) < 1]
    assert len(inside) == p - 1, f"expected {p-1} roots inside unit circle"
    # H(z) = sqrt(2) ((1+z)/2)^p * prod (z - zi)/(1 - zi)
    h = [mp.mpf(1)]
    for _ in range(p):
        h = polymul(h, [mp.mpf(1) / 2, mp.mpf(1) / 2])
    for r in inside:
        h = polymul(h, [-r, mp.mpf(1)])
        h = [c / (1 - r) for c in h]
    h = [mp.re(c) * mp.sqrt(2) for c in h]
    # normalize exactly: sum must be sqrt(2)
    s = sum(h)
    h = [c * mp.sqrt(2) / s for c in h]
    return h


def meyer_aux(x):
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    return x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3)


def dmey62():
    n = 1 << 18
    w = 2 * np.pi * np.fft.fftfreq(n)
    H = np.zeros(n)
    aw = np.abs(w)
    flat = aw <= np.pi / 3
    taper = (aw > np.pi / 3) & (aw < 2 * np.pi / 3)
    H[flat] = np.sqrt(2)
    xs = 3 * aw[taper] / np.pi - 1
    H[taper] = np.sqrt(2) * np.cos(
        np.pi / 2 * np.array([meyer_aux(x) for x in xs])
    )
    h = np.fft.ifft(H).real
    h = np.roll(h, 31)[:62]  # taps n = -31..30 of the symmetric filter
    # Least-norm correction: enforce sum over even/odd taps = 1/sqrt(2) and
    # double-shift orthogonality sum_k h[k] h[k+2m] = delta_m.
    for _ in range(60):
        cons = []
        grads = []
        for m in range(31):
            r = float(np.dot(h[: 62 - 2 * m], h[2 * m :]))
            target = 1.0 if m == 0 else 0.0
            g = np.zeros(62)
            g[: 62 - 2 * m] += h[2 * m :]
            g[2 * m :] += h[: 62 - 2 * m]
            cons.append(r - target)
            grads.append(g)
        for par in (0, 1):
            g = np.zeros(62)
            g[par::2] = 1.0
            cons.append(float(h[par::2].sum()) - 1 / np.sqrt(2))
            grads.append(g)
        cons = np.array(cons)
        if np.abs(cons).max() < 1e-15:
            break
        J = np.array(grads)
        # Newton step of minimum norm: h -= J^T (J J^T)^{-1} c
        h = h - J.T @ np.linalg.solve(J @ J.T, cons)
    return list(h)


def emit(name, h):
    print(f"const double {name}[] = {{")
    for i in range(0, len(h), 4):
        row = ", ".join(mp.nstr(c, 19, strip_zeros=False) for c in h[i : i + 4])
        print(f"    {row},")
    print("};")
    print()


def main():
    print("// Generated by scripts/make_wavelet_tables.py -- do not edit by hand.")
    print("// Orthogonal scaling (low-pass analysis) filters, sum = sqrt(2).")
    print()
    print('#include "src/wavelet_tables.hpp"')
    print()
    print("namespace rird::tables {")
    print()
    emit("kHaar", [mp.sqrt(2) / 2, mp.sqrt(2) / 2])
    for p in range(2, 11):
        emit(f"kDb{p}", daubechies(p))
    emit("kDmey", [mp.mpf(float(c)) for c in dmey62()])
    print("} // namespace rird::tables")


if __name__ == "__main__":
    main()
