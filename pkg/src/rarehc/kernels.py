"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``RAREHC_DISABLE_NUMBA=1`` before import to force the numpy path.
Both implementations are always importable as ``numpy_kernels`` and
``numba_kernels`` (the latter is ``None`` when numba is missing) so tests
and the benchmark can compare them directly.
"""

import os
import types

import numpy as np

__all__ = [
    "USE_NUMBA",
    "hc_scan",
    "hc_components_sorted",
    "weighted_sup_sorted",
    "min_spacing_sorted",
    "numpy_kernels",
    "numba_kernels",
]


def _env_disabled():
    return os.environ.get("RAREHC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


# --------------------------------------------------------------------- numpy


def _np_hc_components_sorted(p, n):
    i = np.arange(1, p.size + 1, dtype=np.float64)
    return np.sqrt(n) * (i / n - p) / np.sqrt(p * (1.0 - p))


def _np_hc_scan(p, n, imax):
    """Max of HC components over the first ``imax`` sorted P-values.

    Returns ``(value, index0)``; ties resolve to the smallest index.
    """
    comps = _np_hc_components_sorted(p[:imax], n)
    k = int(np.argmax(comps))
    return float(comps[k]), k


def _segment_sup(d, a, b):
    # sup of d * w(t) over [a, b]; w is convex with minimum at t = 1/2
    wa = 1.0 / np.sqrt(a * (1.0 - a))
    wb = 1.0 / np.sqrt(b * (1.0 - b))
    m = np.clip(0.5, a, b)
    wm = 1.0 / np.sqrt(m * (1.0 - m))
    return np.where(d > 0, d * np.maximum(wa, wb), np.where(d < 0, d * wm, 0.0))


def _np_weighted_sup_sorted(s0, s1, t_lo, t_hi, n):
    """sup over [t_lo, t_hi] of sqrt(n) * (F1 - F0)(t) * w(t) for sorted samples."""
    j0 = s0[(s0 > t_lo) & (s0 <= t_hi)]
    j1 = s1[(s1 > t_lo) & (s1 <= t_hi)]
    starts = np.unique(np.concatenate(([t_lo], j0, j1)))
    ends = np.append(starts[1:], t_hi)
    d = (np.searchsorted(s1, starts, side="right") - np.searchsorted(s0, starts, side="right")) / n
    return float(np.sqrt(n) * np.max(_segment_sup(d, starts, ends)))


def _np_min_spacing_sorted(u):
    """Smallest gap among 0 = u_(0) <= u_(1) <= ... <= u_(n) <= u_(n+1) = 1."""
    return float(np.min(np.diff(np.concatenate(([0.0], u, [1.0])))))


numpy_kernels = types.SimpleNamespace(
    hc_scan=_np_hc_scan,
    hc_components_sorted=_np_hc_components_sorted,
    weighted_sup_sorted=_np_weighted_sup_sorted,
    min_spacing_sorted=_np_min_spacing_sorted,
)


# --------------------------------------------------------------------- numba


def _build_numba():
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def hc_components_sorted(p, n):
        out = np.empty(p.size)
        sn = np.sqrt(n)
        for k in range(p.size):
            x = p[k]
            out[k] = sn * ((k + 1) / n - x) / np.sqrt(x * (1.0 - x))
        return out

    @njit(cache=True)
    def _hc_scan(p, n, imax):
        sn = np.sqrt(n)
        best = -np.inf
        arg = 0
        for k in range(imax):
            x = p[k]
            v = sn * ((k + 1) / n - x) / np.sqrt(x * (1.0 - x))
            if v > best:
                best = v
                arg = k
        return best, arg

    def hc_scan(p, n, imax):
        best, arg = _hc_scan(p, float(n), imax)
        return float(best), int(arg)

    @njit(cache=True)
    def _w(t):
        return 1.0 / np.sqrt(t * (1.0 - t))

    @njit(cache=True)
    def _seg(d, a, b):
        if d > 0.0:
            wa = _w(a)
            wb = _w(b)
            return d * (wa if wa > wb else wb)
        if d < 0.0:
            m = 0.5
            if m < a:
                m = a
            if m > b:
                m = b
            return d * _w(m)
        return 0.0

    @njit(cache=True)
    def _weighted_sup(s0, s1, t_lo, t_hi, n):
        i0 = np.searchsorted(s0, t_lo, side="right")
        i1 = np.searchsorted(s1, t_lo, side="right")
        c0 = i0
        c1 = i1
        a = t_lo
        best = -np.inf
        while True:
            nxt = np.inf
            if i0 < s0.size and s0[i0] <= t_hi:
                nxt = s0[i0]
            if i1 < s1.size and s1[i1] <= t_hi and s1[i1] < nxt:
                nxt = s1[i1]
            if nxt == np.inf:
                v = _seg((c1 - c0) / n, a, t_hi)
                if v > best:
                    best = v
                break
            v = _seg((c1 - c0) / n, a, nxt)
            if v > best:
                best = v
            while i0 < s0.size and s0[i0] == nxt:
                i0 += 1
                c0 += 1
            while i1 < s1.size and s1[i1] == nxt:
                i1 += 1
                c1 += 1
            a = nxt
        return np.sqrt(n) * best

    def weighted_sup_sorted(s0, s1, t_lo, t_hi, n):
        return float(_weighted_sup(s0, s1, float(t_lo), float(t_hi), float(n)))

    @njit(cache=True)
    def _min_spacing(u):
        prev = 0.0
        best = np.inf
        for k in range(u.size):
            g = u[k] - prev
            if g < best:
                best = g
            prev = u[k]
        g = 1.0 - prev
        if g < best:
            best = g
        return best

    def min_spacing_sorted(u):
        return float(_min_spacing(u))

    return types.SimpleNamespace(
        hc_scan=hc_scan,
        hc_components_sorted=lambda p, n: hc_components_sorted(p, float(n)),
        weighted_sup_sorted=weighted_sup_sorted,
        min_spacing_sorted=min_spacing_sorted,
    )


numba_kernels = _build_numba()

USE_NUMBA = numba_kernels is not None and not _env_disabled()
_active = numba_kernels if USE_NUMBA else numpy_kernels

hc_scan = _active.hc_scan
hc_components_sorted = _active.hc_components_sorted
weighted_sup_sorted = _active.weighted_sup_sorted
min_spacing_sorted = _active.min_spacing_sorted
