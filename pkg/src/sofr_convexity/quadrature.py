"""Composite Gauss-Legendre rules split at parameter breakpoints."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_edges(a: float, b: float, cuts, max_width: float) -> np.ndarray:
    """Sorted panel endpoints covering [a, b], including every cut inside."""
    cuts = np.asarray(cuts, dtype=float)
    pts = np.unique(np.concatenate([[a, b], cuts[(cuts > a) & (cuts < b)]]))
    out = [pts[:1]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        k = max(1, int(np.ceil((hi - lo) / max_width - 1e-12)))
        out.append(np.linspace(lo, hi, k + 1)[1:])
    return np.concatenate(out)


def nodes_on(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on every panel of ``edges`` (flattened)."""
    x, w = gauss_legendre(n)
    lo = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    return (lo + half * (x + 1.0)).ravel(), (half * w).ravel()


def composite(a: float, b: float, cuts, n: int, max_width: float):
    """Nodes and weights of a composite rule on [a, b]."""
    if b <= a:
        return np.empty(0), np.empty(0)
    return nodes_on(panel_edges(a, b, cuts, max_width), n)


def integrate(f, a: float, b: float, cuts, n: int, max_width: float) -> float:
    x, w = composite(a, b, cuts, n, max_width)
    if x.size == 0:
        return 0.0
    return float(np.dot(w, f(x)))


def cumulative(f, a: float, targets, cuts, n: int, max_width: float) -> np.ndarray:
    """Integrals of ``f`` from ``a`` to each entry of ``targets`` (all >= a).

    One composite rule is laid over the sorted union of targets and cuts, so
    the cost is linear in the number of targets.
    """
    targets = np.asarray(targets, dtype=float)
    flat = targets.ravel()
    if flat.size == 0:
        return targets.copy()
    if np.any(flat < a):
        raise ValueError("cumulative integral targets must be >= lower limit")
    top = float(flat.max())
    if top == a:
        return np.zeros_like(targets)
    cuts = np.asarray(cuts, dtype=float)
    pts = np.unique(np.concatenate([[a], flat, cuts[(cuts > a) & (cuts < top)]]))
    edges = panel_edges(a, top, pts, max_width)
    x, w = nodes_on(edges, n)
    panel = (w * f(x)).reshape(edges.size - 1, n).sum(axis=1)
    cum = np.concatenate([[0.0], np.cumsum(panel)])
    idx = np.searchsorted(edges, flat)
    return cum[idx].reshape(targets.shape)
