"""Monte Carlo oracle for the smile/skew model.

The OU driver is advanced with its exact Gaussian transition; the short rate
r = rbar + R*_1 + sinh(gamma (y + y*)) / gamma is integrated by the trapezoid
rule on each step, with the deterministic R*_1 part integrated by two-point
Gauss-Legendre. Only ``z = int (r - rbar)`` is simulated; the rbar part is
folded back in through the discount curve.

Random numbers come from Philox streams keyed by ``(seed, block index)``.
Blocks have a fixed size, so any partition of the blocks over workers gives
bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import KernelSet
from .pricing import bond_price
from .termstructure import ContractKind, ContractSpec, discount

DEFAULT_BLOCK = 1 << 15


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``n_paths`` counts individual paths (both members of an antithetic pair).
    ``block_size`` fixes the random-stream partition and must not change
    between runs that are expected to agree.
    """

    n_paths: int
    step: float = 1.0 / 365.0
    seed: int = 0
    antithetic: bool = True
    block_size: int = DEFAULT_BLOCK
    workers: int = 1

    def __post_init__(self):
        if self.n_paths <= 0:
            raise ValueError("n_paths must be positive")
        if not (0.0 < self.step <= 1.0 / 52.0):
            raise ValueError("step must lie in (0, 1/52]")
        if self.antithetic and (self.n_paths % 2 or self.block_size % 2):
            raise ValueError("antithetic sampling needs even n_paths and block_size")
        if self.block_size <= 0 or self.workers <= 0:
            raise ValueError("block_size and workers must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int

    def interval(self, k: float = 3.0) -> tuple[float, float]:
        return self.mean - k * self.std_error, self.mean + k * self.std_error


@dataclass(frozen=True)
class PathEnsemble:
    """State at the record times; arrays have shape (n_paths, n_times)."""

    times: np.ndarray
    y: np.ndarray
    z: np.ndarray
    int_r: np.ndarray


def _kernels(obj) -> KernelSet:
    return obj if isinstance(obj, KernelSet) else KernelSet(obj)


# -- time grid ------------------------------------------------------------------------


@dataclass(frozen=True)
class _Grid:
    times: np.ndarray
    phi: np.ndarray      # per-step OU decay
    sd: np.ndarray       # per-step OU standard deviation
    gamma: np.ndarray    # per-step smile factor (segment value)
    ystar: np.ndarray
    r1_int: np.ndarray   # per-step integral of R*_1
    record_idx: np.ndarray


def _build_grid(k: KernelSet, t0: float, record_times, step: float) -> _Grid:
    rec = np.asarray(record_times, dtype=float)
    if rec.ndim != 1 or rec.size == 0:
        raise ValueError("record_times must be a non-empty 1-D sequence")
    if np.any(rec < t0):
        raise ValueError("record times must not precede the start time")
    t_end = float(rec.max())
    if t_end > k.params.horizon + 1e-12:
        raise ValueError(f"simulation end {t_end} exceeds horizon {k.params.horizon}")
    n = max(1, math.ceil((t_end - t0) / step - 1e-9))
    cuts = k.cuts[(k.cuts > t0) & (k.cuts < t_end)]
    times = np.unique(np.concatenate([np.linspace(t0, t_end, n + 1), cuts, rec]))
    # merge points closer than 1e-12 (round-off from linspace)
    keep = np.concatenate([[True], np.diff(times) > 1e-12])
    times = times[keep]
    idx = np.clip(np.searchsorted(times, rec - 1e-12), 0, times.size - 1)

    a, b = times[:-1], times[1:]
    mid = 0.5 * (a + b)
    phi = np.asarray(k.phi_r(a, b), dtype=float)
    var = np.array([k.sigma_rr(s, e) for s, e in zip(a, b)])
    half = 0.5 * (b - a)
    off = half / math.sqrt(3.0)
    r1 = half * (k.r_star_1(mid - off) + k.r_star_1(mid + off))
    return _Grid(
        times, phi, np.sqrt(var), np.atleast_1d(k.gamma(mid)), np.atleast_1d(k.y_star(mid)),
        np.asarray(r1), idx,
    )


# -- block engine ----------------------------------------------------------------------


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), block])))


def _rate(g: float, x: np.ndarray, floor: float) -> np.ndarray:
    """sinh(g x) / g for scalar g."""
    if abs(g) < floor:
        return x + (g * g / 6.0) * x**3
    return np.sinh(g * x) / g


def _simulate_block(k: KernelSet, g: _Grid, cfg: SimConfig, block: int, size: int, y0: float):
    """Return (y, z) at the record times for one block, shape (size, n_rec)."""
    rng = _block_rng(cfg.seed, block)
    n_draw = size // 2 if cfg.antithetic else size
    y = np.full(size, float(y0))
    z = np.zeros(size)
    n_rec = g.record_idx.size
    ys = np.empty((size, n_rec))
    zs = np.empty((size, n_rec))
    rec_at = {}
    for j, i in enumerate(g.record_idx):
        rec_at.setdefault(int(i), []).append(j)
    for j in rec_at.get(0, ()):
        ys[:, j], zs[:, j] = y, z
    dt = np.diff(g.times)
    floor = k.floor
    r_prev, last = None, None
    for i in range(dt.size):
        gam, ys_i = g.gamma[i], g.ystar[i]
        if (gam, ys_i) != last:
            r_prev, last = _rate(gam, y + ys_i, floor), (gam, ys_i)
        eps = rng.standard_normal(n_draw)
        if cfg.antithetic:
            # interleave so that paths 2m and 2m+1 form a pair
            eps = np.column_stack([eps, -eps]).ravel()
        y = g.phi[i] * y + g.sd[i] * eps
        r_next = _rate(gam, y + ys_i, floor)
        z += 0.5 * dt[i] * (r_prev + r_next) + g.r1_int[i]
        r_prev = r_next
        for j in rec_at.get(i + 1, ()):
            ys[:, j], zs[:, j] = y, z
    return ys, zs


def _block_sizes(cfg: SimConfig) -> list[int]:
    full, rest = divmod(cfg.n_paths, cfg.block_size)
    return [cfg.block_size] * full + ([rest] if rest else [])


def _run(k: KernelSet, record_times, cfg: SimConfig, reducer: Callable, t0=0.0, y0=0.0):
    """Apply ``reducer(times, y, z)`` to every block; results in block order."""
    g = _build_grid(k, t0, record_times, cfg.step)
    rec = np.asarray(record_times, dtype=float)

    def job(item):
        b, size = item
        ys, zs = _simulate_block(k, g, cfg, b, size, y0)
        return reducer(rec, ys, zs)

    items = list(enumerate(_block_sizes(cfg)))
    if cfg.workers == 1:
        return [job(it) for it in items]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(job, items))


def _pair_values(x: np.ndarray, antithetic: bool) -> np.ndarray:
    """Per-sample values used for the standard error (pair means if antithetic)."""
    return x.reshape(-1, 2, *x.shape[1:]).mean(axis=1) if antithetic else x


def _estimate(samples: np.ndarray, n_paths: int) -> McEstimate:
    m = samples.size
    mean = math.fsum(samples.tolist()) / m
    dev = samples - mean
    var = math.fsum((dev * dev).tolist()) / max(m - 1, 1)
    return McEstimate(mean, math.sqrt(var / m), n_paths)


# -- public API ------------------------------------------------------------------------


def simulate_paths(params, record_times, cfg: SimConfig, t0: float = 0.0, y0: float = 0.0) -> PathEnsemble:
    """Simulate ``cfg.n_paths`` paths and return the state at ``record_times``.

    ``int_r`` is the full integral of r from ``t0``, including the rbar part.
    Intended for moderate path counts; the pricing helpers stream blocks.
    """
    k = _kernels(params)
    blocks = _run(k, record_times, cfg, lambda t, y, z: (y, z), t0, y0)
    y = np.concatenate([b[0] for b in blocks])
    z = np.concatenate([b[1] for b in blocks])
    rec = np.asarray(record_times, dtype=float)
    int_rbar = np.asarray(k.params.rbar.integral(t0, rec))
    return PathEnsemble(rec, y, z, z + int_rbar)


def _payoff(k: KernelSet, spec: ContractSpec) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    T1, T2 = spec.T1, spec.T2
    D = float(discount(k.params, T1, T2))
    kind = spec.kind
    if kind is ContractKind.SOFR_1M:
        return lambda y, z: z[:, 1] - z[:, 0] - math.log(D)
    if kind is ContractKind.SOFR_3M:
        return lambda y, z: np.exp(z[:, 1] - z[:, 0]) / D - 1.0
    if kind is ContractKind.EURODOLLAR:
        return lambda y, z: 1.0 / bond_price(k, y[:, 0], T1, T2) - 1.0
    raise ValueError(f"no futures payoff for {kind.value}")


def mc_price(spec: ContractSpec, params, cfg: SimConfig) -> McEstimate:
    """Undiscounted expectation of the futures payoff at t=0, y=0.

    Forward contracts are priced as the ratio of simulated bond prices, with
    a delta-method standard error.
    """
    k = _kernels(params)
    if spec.kind is ContractKind.FORWARD:
        return _mc_forward(k, spec, cfg)
    pay = _payoff(k, spec)
    blocks = _run(k, [spec.T1, spec.T2], cfg,
                  lambda t, y, z: _pair_values(pay(y, z), cfg.antithetic))
    return _estimate(np.concatenate(blocks), cfg.n_paths)


def mc_price_difference(spec_a: ContractSpec, spec_b: ContractSpec, params, cfg: SimConfig) -> McEstimate:
    """Expectation of payoff(a) - payoff(b) on common paths.

    Both contracts must share the same accrual period.
    """
    if (spec_a.T1, spec_a.T2) != (spec_b.T1, spec_b.T2):
        raise ValueError("difference estimator needs contracts on the same period")
    k = _kernels(params)
    pa, pb = _payoff(k, spec_a), _payoff(k, spec_b)
    blocks = _run(k, [spec_a.T1, spec_a.T2], cfg,
                  lambda t, y, z: _pair_values(pa(y, z) - pb(y, z), cfg.antithetic))
    return _estimate(np.concatenate(blocks), cfg.n_paths)


def _mc_forward(k: KernelSet, spec: ContractSpec, cfg: SimConfig) -> McEstimate:
    # E[exp(-z_T1)] / E[exp(-z_T2)] / D - 1, the rbar part being deterministic
    blocks = _run(k, [spec.T1, spec.T2], cfg,
                  lambda t, y, z: _pair_values(np.exp(-z), cfg.antithetic))
    s = np.concatenate(blocks)
    a, b = s[:, 0], s[:, 1]
    ma, mb = math.fsum(a.tolist()) / a.size, math.fsum(b.tolist()) / b.size
    D = float(discount(k.params, spec.T1, spec.T2))
    ratio = ma / mb
    # delta method on the ratio of means
    infl = (a - ma) / mb - ratio * (b - mb) / mb
    se = float(np.std(infl, ddof=1)) / math.sqrt(a.size)
    return McEstimate(ratio / D - 1.0, se / D, cfg.n_paths)


def mc_no_arbitrage(params, t_grid, cfg: SimConfig) -> list[tuple[float, McEstimate, float]]:
    """E[exp(-int_0^t r)] against D(0, t) for every t in ``t_grid``."""
    k = _kernels(params)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0.0) or np.any(t_grid > k.params.horizon):
        raise ValueError("t_grid must lie in (0, horizon]")
    blocks = _run(k, t_grid, cfg, lambda t, y, z: _pair_values(np.exp(-z), cfg.antithetic))
    s = np.concatenate(blocks)
    out = []
    for j, t in enumerate(t_grid):
        D = float(discount(k.params, 0.0, t))
        est = _estimate(s[:, j], cfg.n_paths)
        out.append((float(t), McEstimate(D * est.mean, D * est.std_error, est.n_paths), D))
    return out


def mc_bond(params, y: float, t: float, T: float, cfg: SimConfig) -> McEstimate:
    """Zero-coupon bond E[exp(-int_t^T r) | y_t = y] by simulation."""
    k = _kernels(params)
    D = float(discount(k.params, t, T))
    blocks = _run(k, [T], cfg, lambda tt, yy, z: _pair_values(np.exp(-z[:, 0]), cfg.antithetic), t0=t, y0=y)
    est = _estimate(np.concatenate(blocks), cfg.n_paths)
    return McEstimate(D * est.mean, D * est.std_error, est.n_paths)
