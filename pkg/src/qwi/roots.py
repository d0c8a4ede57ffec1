"""Uniform bracketing and bisection for real residual functions."""
from __future__ import annotations

from typing import Callable

import numpy as np

ROOT_RTOL = 1e-12
# Scan nodes stay this fraction of the window inside the open interval, where
# some wavenumber vanishes and the residuals are undefined.
EDGE_FRACTION = 1e-10


def scan_nodes(lo: float, hi: float, resolution: int) -> np.ndarray:
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    nodes = np.linspace(lo, hi, resolution)
    inset = EDGE_FRACTION * (hi - lo)
    nodes[0] = lo + inset
    nodes[-1] = hi - inset
    return nodes


def bisect(func: Callable[[float], float], lo: float, hi: float, rtol: float = ROOT_RTOL,
           f_lo: float | None = None) -> float:
    """Bisect a sign change of ``func`` on [lo, hi] until the bracket is narrower than
    ``rtol * max(1, |E|)``."""
    f_lo = float(func(lo)) if f_lo is None else f_lo
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo < rtol * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        f_mid = float(func(mid))
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_roots(func: Callable, lo: float, hi: float, resolution: int,
               rtol: float = ROOT_RTOL) -> list[float]:
    """All sign changes of a vectorised ``func`` on the open interval (lo, hi).

    Two roots closer than the scan spacing are invisible; raise ``resolution``
    for dense spectra.
    """
    nodes = scan_nodes(lo, hi, resolution)
    vals = np.asarray(func(nodes), dtype=float)
    signs = np.sign(vals)
    roots = []
    for i in range(len(nodes) - 1):
        if signs[i] == 0:
            roots.append(float(nodes[i]))
        elif signs[i] * signs[i + 1] < 0:
            roots.append(bisect(func, float(nodes[i]), float(nodes[i + 1]), rtol, f_lo=vals[i]))
    if signs[-1] == 0:
        roots.append(float(nodes[-1]))
    return roots
