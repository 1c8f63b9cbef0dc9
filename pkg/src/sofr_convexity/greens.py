"""Perturbative Green's function of the (y, z) backward equation.

``G0`` is the bivariate Gaussian transition density of (y_v, z_v - z_t);
``G1`` is its first-order smile/skew correction, a z-derivative of shifted
Gaussians. All derivatives are closed-form Gaussian derivatives.

Prices are obtained by integrating a payoff against ``G0 + G1`` on a tensor
Gauss-Legendre grid laid out in the Cholesky coordinates of the covariance,
so the grid follows the correlation of (y, z). The z state only enters
through differences and is set to zero by callers that price futures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from . import quadrature as quad
from .kernels import KernelSet, sinhc
from .termstructure import discount

DEFAULT_GRID = 200
DEFAULT_BOX = 10.0
MIN_BOX = 8.0


class DegenerateCovariance(ValueError):
    """Deterministic limit (no volatility on [t, v]); use a point mass instead."""


class BoxTooNarrow(ValueError):
    """The payoff box leaves too much (tilted) Gaussian mass outside."""


@dataclass(frozen=True)
class Gaussian2D:
    mean: tuple[float, float]
    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T, rtol=0, atol=1e-300):
            raise ValueError("covariance must be a symmetric 2x2 matrix")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", (float(self.mean[0]), float(self.mean[1])))
        if not cov[0, 0] > 0 or np.linalg.det(cov) <= 1e-14 * cov[0, 0] * max(cov[1, 1], 1e-300):
            raise DegenerateCovariance("deterministic limit; use point mass")

    @property
    def chol(self) -> np.ndarray:
        return np.linalg.cholesky(self.cov)

    @property
    def precision(self) -> np.ndarray:
        return np.linalg.inv(self.cov)

    def pdf(self, x1, x2):
        d1 = np.asarray(x1, dtype=float) - self.mean[0]
        d2 = np.asarray(x2, dtype=float) - self.mean[1]
        g, _, _ = _parts(d1, d2, self.precision)
        return g


def _parts(d1, d2, P):
    """Density and precision-weighted residuals w = P d of a centred Gaussian."""
    w1 = P[0, 0] * d1 + P[0, 1] * d2
    w2 = P[1, 0] * d1 + P[1, 1] * d2
    det_p = P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    g = math.sqrt(det_p) / (2.0 * math.pi) * np.exp(-0.5 * (d1 * w1 + d2 * w2))
    return g, w1, w2


def transition(k: KernelSet, y: float, z: float, t: float, v: float) -> Gaussian2D:
    """Law of (y_v, z_v) under G0 started from (y, z) at t."""
    if not t < v:
        raise ValueError("need t < v")
    if not k.sigma_rr(t, v) > 0:
        raise DegenerateCovariance("deterministic limit; use point mass")
    return Gaussian2D((k.phi_r(t, v) * y, z + k.mu_star(y, t, v)), k.cov(t, v))


def g0(k: KernelSet, y: float, z: float, t: float, eta, zeta, v: float):
    """Zeroth-order Green's function: the Gaussian transition density."""
    return transition(k, y, z, t, v).pdf(eta, zeta)


def g1(k: KernelSet, y: float, z: float, t: float, eta, zeta, v: float):
    """First-order correction [int_t^v (R1 + R*_1) dt1 - Q(t, v)] dz G0.

    The R1 term evaluates dz G0 at the start point shifted by +-(Delta y,
    Delta z); on the Gaussian this moves the mean by (phi_r(t, v) Delta y,
    Delta z + B*(t, v) Delta y). Both shifted densities are written as the
    unshifted one times exp(+-gamma w.s), so the difference quotient needs
    no cancellation and stays exact as gamma -> 0.
    """
    gauss = transition(k, y, z, t, v)
    P = gauss.precision
    d1 = np.asarray(eta, dtype=float) - gauss.mean[0]
    d2 = np.asarray(zeta, dtype=float) - gauss.mean[1]
    g, w1, w2 = _parts(d1, d2, P)
    d_2 = g * w2
    d_12 = g * (w1 * w2 - P[0, 1])
    d_22 = g * (w2 * w2 - P[1, 1])

    phi_v = k.phi_r(t, v)
    bs_v = k.b_star(t, v)
    q = k.mu_star(y, t, v) * d_2 + k.sigma_rz(t, v) * d_12 + k.sigma_zz(t, v) * d_22

    x, wts = k.nodes(t, v)
    gam = np.atleast_1d(k.gamma(x))
    rr = np.atleast_1d(k.sigma_rr(t, x))
    rz = np.atleast_1d(k.sigma_rz(t, x))
    ph = np.atleast_1d(k.phi_r(t, x))
    bs = np.atleast_1d(k.b_star(t, x))
    a = ph * y + np.atleast_1d(k.y_star(x))
    psi = np.exp(0.5 * gam * gam * rr)
    r1 = np.atleast_1d(k.r_star_1(x))

    acc = np.zeros_like(d_2)
    for j in range(x.size):
        # mean shift per unit gamma
        ey = rr[j] / ph[j]
        s1, s2 = phi_v * ey, rz[j] - bs[j] * ey + bs_v * ey
        gj = gam[j]
        ps2 = P[1, 0] * s1 + P[1, 1] * s2
        ws = w1 * s1 + w2 * s2
        damp = g * np.exp(-0.5 * gj * gj * (s1 * (P[0, 0] * s1 + P[0, 1] * s2) + s2 * ps2))
        # dz G0 at d -+ gamma s, split into odd / (2 gamma) and even parts
        odd = damp * (w2 * sinhc(gj, ws, k.floor) - ps2 * np.cosh(gj * ws))
        even = damp * (w2 * np.cosh(gj * ws) - ps2 * gj * gj * sinhc(gj, ws, k.floor))
        term = psi[j] * (np.cosh(gj * a[j]) * odd + sinhc(gj, a[j], k.floor) * even)
        acc += wts[j] * (term + r1[j] * d_2)
    return acc - q


# -- convolution ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PayoffGrid:
    """Tensor Gauss-Legendre grid in Cholesky coordinates of a transition.

    ``eta``, ``zeta`` and ``weights`` are flattened node arrays; ``values``
    holds the payoff at the nodes. ``weights`` already include the Jacobian.
    """

    eta: np.ndarray
    zeta: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    box: float
    n: int

    @classmethod
    def build(
        cls,
        gauss: Gaussian2D,
        payoff: Callable[[np.ndarray, np.ndarray], np.ndarray],
        n: int = DEFAULT_GRID,
        box: float = DEFAULT_BOX,
        tilt: tuple[float, float] = (0.0, 0.0),
    ) -> "PayoffGrid":
        """Lay the grid over ``gauss`` and sample ``payoff``.

        ``tilt`` is the exponential growth rate c of the payoff
        (|P| <~ exp(c . x)); the box must hold the tilted mass to 1e-8.
        """
        if box < MIN_BOX:
            raise ValueError(f"box must cover at least {MIN_BOX} standard deviations")
        L = gauss.chol
        shift = L.T @ np.asarray(tilt, dtype=float)
        outside = 1.0 - np.prod(ndtr(box - shift) - ndtr(-box - shift))
        if outside > 1e-8:
            raise BoxTooNarrow(f"tilted mass outside box {outside:.3g} > 1e-8")
        if 1.0 - (ndtr(box) - ndtr(-box)) ** 2 > 1e-10:
            raise BoxTooNarrow("Gaussian mass outside box exceeds 1e-10")
        u, w = quad.gauss_legendre(n)
        u, w = box * u, box * w
        u1, u2 = np.meshgrid(u, u, indexing="ij")
        ww = np.outer(w, w) * L[0, 0] * L[1, 1]
        eta = gauss.mean[0] + L[0, 0] * u1
        zeta = gauss.mean[1] + L[1, 0] * u1 + L[1, 1] * u2
        eta, zeta = eta.ravel(), zeta.ravel()
        values = np.broadcast_to(np.asarray(payoff(eta, zeta), dtype=float), eta.shape)
        return cls(eta, zeta, ww.ravel(), np.array(values), float(box), int(n))


@dataclass(frozen=True)
class Convolution:
    """Zeroth- and first-order parts of a convolution integral."""

    order0: float
    order1: float

    @property
    def total(self) -> float:
        return self.order0 + self.order1


def convolve(k: KernelSet, grid: PayoffGrid, y: float, z: float, t: float, v: float) -> Convolution:
    """Integrals of the payoff against G0 and G1 separately."""
    p0 = g0(k, y, z, t, grid.eta, grid.zeta, v)
    p1 = g1(k, y, z, t, grid.eta, grid.zeta, v)
    wv = grid.weights * grid.values
    return Convolution(math.fsum((wv * p0).tolist()), math.fsum((wv * p1).tolist()))


def convolve_price(
    k: KernelSet,
    payoff: Callable[[np.ndarray, np.ndarray], np.ndarray],
    y: float,
    z: float,
    t: float,
    v: float,
    n: int = DEFAULT_GRID,
    box: float = DEFAULT_BOX,
    tilt: tuple[float, float] = (0.0, 0.0),
) -> float:
    """Integral of ``payoff(eta, zeta)`` against G0 + G1."""
    grid = PayoffGrid.build(transition(k, y, z, t, v), payoff, n, box, tilt)
    return convolve(k, grid, y, z, t, v).total


# -- futures payoffs and two-stage pricing ------------------------------------------------


def payoff_3m(k: KernelSet, T1: float, T2: float):
    """Compounded payoff exp(zeta - z_T1) / D - 1, as a function of zeta - z_T1."""
    D = float(discount(k.params, T1, T2))
    return lambda dz: np.exp(dz) / D - 1.0


def payoff_1m(k: KernelSet, T1: float, T2: float):
    """Averaged payoff (zeta - z_T1) - log D."""
    log_d = math.log(float(discount(k.params, T1, T2)))
    return lambda dz: dz - log_d


@dataclass(frozen=True)
class StagedResult:
    price: float
    # outer G1 acting on the zeroth-order inner value; should vanish
    v10: float
    inner0: np.ndarray
    inner1: np.ndarray


def staged_price(
    k: KernelSet,
    payoff: Callable[[np.ndarray], np.ndarray],
    y: float,
    t: float,
    T1: float,
    T2: float,
    n: int = 64,
    box: float = DEFAULT_BOX,
    tilt: float = 0.0,
) -> StagedResult:
    """Two-stage convolution of a payoff on z_T2 - z_T1.

    The inner stage prices the payoff at T1 for every outer grid value of
    y_T1 (z_T1 = 0 by translation). The outer stage convolves that value
    against G0 + G1 from (y, 0, t). Cross terms of order epsilon are kept;
    the G1 x G1 term is dropped.
    """
    if not t <= T1 < T2:
        raise ValueError("need t <= T1 < T2")
    if k.sigma_rr(t, T2) == 0.0:
        # deterministic limit: payoff on the forward path of z
        x, w = k.nodes(T1, T2)
        r = k.r_star_1(x) + sinhc(k.gamma(x), k.phi_r(t, x) * y + k.y_star(x), k.floor)
        val = float(payoff(np.asarray(float(np.dot(w, r)))))
        return StagedResult(val, 0.0, np.array([val]), np.array([0.0]))

    def inner(eta1: float):
        g = transition(k, eta1, 0.0, T1, T2)
        grid = PayoffGrid.build(g, lambda e, zt: payoff(zt), n, box, (0.0, tilt))
        return convolve(k, grid, eta1, 0.0, T1, T2)

    if t == T1:
        c = inner(y)
        return StagedResult(c.total, 0.0, np.array([c.order0]), np.array([c.order1]))

    outer = transition(k, y, 0.0, t, T1)
    tilt_outer = (tilt * k.b_star(T1, T2), 0.0)
    shape = PayoffGrid.build(outer, lambda e, zt: 0.0, n, box, tilt_outer)
    # eta depends on the first Cholesky coordinate only: n distinct values
    eta_nodes = shape.eta.reshape(n, n)[:, 0]
    cs = [inner(float(e)) for e in eta_nodes]
    in0 = np.array([c.order0 for c in cs])
    in1 = np.array([c.order1 for c in cs])
    grid0 = PayoffGrid(shape.eta, shape.zeta, shape.weights, np.repeat(in0, n), box, n)
    grid1 = PayoffGrid(shape.eta, shape.zeta, shape.weights, np.repeat(in1, n), box, n)
    c0 = convolve(k, grid0, y, 0.0, t, T1)
    c1 = convolve(k, grid1, y, 0.0, t, T1)
    return StagedResult(c0.order0 + c0.order1 + c1.order0, c0.order1, in0, in1)
