"""Independent brute-force reference implementations used as oracles.

Everything here is deliberately naive (plain loops, direct summation in
ascending index order) and kept free of the package's optimized code
paths.
"""
from __future__ import annotations

import math

import numpy as np


def sampen_naive(x: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """O(N^2) template-matching counts (a, b) over the first N-m templates,
    Chebyshev distance, self-matches excluded."""
    n = len(x)
    nt = n - m
    a = 0
    b = 0
    for i in range(nt):
        for j in range(i + 1, nt):
            d = 0.0
            for k in range(m):
                t = abs(x[i + k] - x[j + k])
                if t > d:
                    d = t
            if d <= r:
                b += 1
                if abs(x[i + m] - x[j + m]) <= r:
                    a += 1
    return a, b


def sampen_naive_blocked(x: np.ndarray, m: int, r: float,
                         block: int = 256) -> tuple[int, int]:
    """Same counts as :func:`sampen_naive` via full pairwise Chebyshev
    distance matrices, processed in row blocks. Still O(N^2) brute force,
    just vectorized; structurally unrelated to the sorted-pruning kernel
    it checks."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    nt = n - m
    idx = np.arange(nt)[:, None] + np.arange(m + 1)[None, :]
    templates = x[idx]                       # (nt, m+1)
    col_idx = np.arange(nt)[None, :]
    a = 0
    b = 0
    for start in range(0, nt, block):
        rows = templates[start:start + block]
        cheb = np.abs(rows[:, None, :m] - templates[None, :, :m]).max(axis=2)
        within = cheb <= r
        extend = np.abs(rows[:, None, m] - templates[None, :, m]) <= r
        upper = col_idx > (start + np.arange(rows.shape[0]))[:, None]
        b += int(np.count_nonzero(within & upper))
        a += int(np.count_nonzero(within & extend & upper))
    return a, b


def sampen_naive_value(x: np.ndarray, m: int = 2, r_factor: float = 0.2) -> float:
    r = r_factor * float(np.std(x))
    a, b = sampen_naive(x, m, r)
    if b == 0:
        return 0.0
    if a == 0:
        return float(-math.log(0.5 / b))
    return float(-math.log(a / b))


def higuchi_lengths_naive(x: np.ndarray, kmax: int) -> np.ndarray:
    """Curve lengths L(k), plain loops, ascending summation."""
    n = len(x)
    out = np.empty(kmax)
    for k in range(1, kmax + 1):
        acc = 0.0
        for m in range(k):
            cnt = (n - m - 1) // k
            s = 0.0
            for i in range(1, cnt + 1):
                s += abs(x[m + i * k] - x[m + (i - 1) * k])
            acc += s * (n - 1) / (cnt * k) / k
        out[k - 1] = acc / k
    return out


def higuchi_fd_naive(x: np.ndarray, kmax: int = 10) -> float:
    lengths = higuchi_lengths_naive(x, kmax)
    k_axis = np.log(1.0 / np.arange(1, kmax + 1))
    logs = np.log(lengths)
    xm = k_axis.mean()
    ym = logs.mean()
    return float(((k_axis - xm) * (logs - ym)).sum() / ((k_axis - xm) ** 2).sum())


def dwt_step_naive(x: np.ndarray, dec_lo: np.ndarray, dec_hi: np.ndarray
                   ) -> tuple[np.ndarray, np.ndarray]:
    """One periodized analysis step by direct circular correlation."""
    n = len(x)
    if n % 2:
        x = np.concatenate([x, x[-1:]])
        n += 1
    half = n // 2
    approx = np.zeros(half)
    detail = np.zeros(half)
    L = len(dec_lo)
    for k in range(half):
        sa = 0.0
        sd = 0.0
        for mm in range(L):
            v = x[(2 * k + mm) % n]
            sa += dec_lo[mm] * v
            sd += dec_hi[mm] * v
        approx[k] = sa
        detail[k] = sd
    return approx, detail


def dwt_decompose_naive(x: np.ndarray, dec_lo: np.ndarray, dec_hi: np.ndarray,
                        levels: int) -> tuple[list[np.ndarray], np.ndarray]:
    details = []
    approx = np.asarray(x, dtype=np.float64)
    for _ in range(levels):
        approx, detail = dwt_step_naive(approx, dec_lo, dec_hi)
        details.append(detail)
    return details, approx


def project_box_hyperplane(v: np.ndarray, y: np.ndarray, lo: np.ndarray,
                           hi: np.ndarray, iters: int = 60) -> np.ndarray:
    """Euclidean projection onto {lo <= a <= hi, y.a = 0} by bisection on
    the hyperplane multiplier (continuous-knapsack structure)."""
    def clipped(mu: float) -> np.ndarray:
        return np.clip(v - mu * y, lo, hi)

    span = float(np.abs(v).sum() + hi.sum() + 1.0)
    lo_mu, hi_mu = -span, span
    for _ in range(iters):
        mid = (lo_mu + hi_mu) / 2.0
        if float(y @ clipped(mid)) > 0:
            lo_mu = mid
        else:
            hi_mu = mid
    return clipped((lo_mu + hi_mu) / 2.0)


def qp_dual_oracle(K: np.ndarray, y: np.ndarray, c_hi: np.ndarray,
                   n_iters: int = 40000, step: float | None = None,
                   rel_tol: float = 1e-13) -> np.ndarray:
    """Projected-gradient ascent on the SVM dual with per-point upper
    bounds; brute force, for small problems only. Stops early once the
    objective stalls."""
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    if step is None:
        eig = np.linalg.eigvalsh(Q)
        step = 1.0 / max(float(eig[-1]), 1e-9)
    a = np.zeros(n)
    lo = np.zeros(n)
    last = -np.inf
    for it in range(n_iters):
        grad = 1.0 - Q @ a
        a = project_box_hyperplane(a + step * grad, y, lo, c_hi)
        if it % 200 == 199:
            obj = dual_objective_naive(K, y, a)
            if obj - last < rel_tol * max(abs(obj), 1.0):
                break
            last = obj
    return a


def dual_objective_naive(K: np.ndarray, y: np.ndarray, a: np.ndarray) -> float:
    ay = a * y
    return float(a.sum() - 0.5 * ay @ K @ ay)


def sine_fit_amplitude(x: np.ndarray, fs: float, freq: float) -> float:
    """Least-squares amplitude of a known-frequency sinusoid."""
    t = np.arange(len(x)) / fs
    design = np.column_stack([np.sin(2 * np.pi * freq * t),
                              np.cos(2 * np.pi * freq * t),
                              np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(design, x, rcond=None)
    return float(np.hypot(coef[0], coef[1]))
