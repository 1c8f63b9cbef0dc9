"""Deterministic kernel functions of the smile/skew extended Hull-White model.

Notation follows the short-rate map r = rbar + R* + sinh(gamma (y + y*)) / gamma
with dy = -alpha y dt + sigma dW:

* ``phi_r(t, v)``    mean-reversion factor exp(-int_t^v alpha)
* ``sigma_rr(t, v)`` variance of y_v given y_t
* ``psi_r(t, v)``    smile dispersion factor exp(gamma(v)^2 sigma_rr(t, v) / 2)
* ``sigma_rz``, ``sigma_zz``  smile-weighted cross and integrated-rate variances
* ``b_star``, ``b_plus``, ``mu_star``  bond-type drift functions
* ``r_star_1``       first-order drift correction enforcing the forward curve

``phi_r`` and ``sigma_rr`` are closed form per constant segment; the others
use composite Gauss-Legendre rules split at every parameter breakpoint.
Nested integrals tabulate the inner function at the outer nodes through a
single cumulative rule.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import quadrature as quad
from .termstructure import ModelParams


def sinhc(g, x, floor: float):
    """sinh(g x) / g, by Taylor series when |g| < floor."""
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    small = np.abs(g) < floor
    safe = np.where(small, 1.0, g)
    out = np.where(small, x + g * g * x**3 / 6.0, np.sinh(g * x) / safe)
    return float(out) if out.ndim == 0 else out


def cosh_m1(a):
    """cosh(a) - 1 without cancellation."""
    out = 2.0 * np.sinh(0.5 * np.asarray(a, dtype=float)) ** 2
    return float(out) if out.ndim == 0 else out


def _expm1_over(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    return np.where(small, 1.0 + 0.5 * x, np.expm1(x) / np.where(small, 1.0, x))


def _check_order(*args):
    for a, b in zip(args[:-1], args[1:]):
        if np.any(np.asarray(a) > np.asarray(b)):
            raise ValueError(f"time arguments out of order: {a} > {b}")


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class EpsilonReport:
    """Size of the smile perturbation; diagnostic only."""

    epsilon: float
    skew_scale: float


class KernelSet:
    """Evaluator of all kernel functions for one :class:`ModelParams`.

    Scalar calls of the expensive functions are memoized on time arguments
    rounded to 1e-12; the cache is guarded by a lock.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        q = params.quadrature
        self.n = int(q.nodes_per_segment)
        self.n_inner = int(q.inner_grid_points)
        self.floor = float(q.gamma_floor)
        self.max_panel = float(q.max_panel)
        self.cuts = params.breakpoints()
        self._cache: dict = {}
        self._lock = threading.Lock()

        # closed form of J(u) = int_{p0}^u exp(2 A(s)) sigma^2(s) ds on the
        # joint alpha/sigma segments, A = primitive of alpha
        pts = set(params.alpha.breakpoints) | set(params.sigma.breakpoints)
        self._p = np.array(sorted(pts))
        a_seg = params.alpha(self._p)
        s2_seg = params.sigma(self._p) ** 2
        self._a_seg = np.atleast_1d(a_seg)
        self._s2_seg = np.atleast_1d(s2_seg)
        self._e2A = np.exp(2.0 * np.atleast_1d(params.alpha.primitive(self._p)))
        dp = np.diff(self._p)
        inc = self._s2_seg[:-1] * self._e2A[:-1] * dp * _expm1_over(2.0 * self._a_seg[:-1] * dp)
        self._Jcum = np.concatenate([[0.0], np.cumsum(inc)])

    # -- memo ------------------------------------------------------------------

    def _memo(self, name, args, compute):
        key = (name,) + tuple(round(float(a), 12) for a in args)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = compute()
        with self._lock:
            self._cache.setdefault(key, val)
        return val

    # -- building blocks ---------------------------------------------------------

    def _A(self, t):
        return self.params.alpha.primitive(t)

    def _J(self, u):
        u = np.asarray(u, dtype=float)
        i = np.clip(np.searchsorted(self._p, u, side="right") - 1, 0, self._p.size - 1)
        d = u - self._p[i]
        return self._Jcum[i] + self._s2_seg[i] * self._e2A[i] * d * _expm1_over(2.0 * self._a_seg[i] * d)

    def gamma(self, t):
        return self.params.gamma(t)

    def y_star(self, t):
        return self.params.y_star(t)

    def cumulative(self, f, a, targets, inner=False):
        n = self.n_inner if inner else self.n
        return quad.cumulative(f, a, targets, self.cuts, n, self.max_panel)

    def nodes(self, a, b):
        """Outer composite rule on [a, b]."""
        return quad.composite(a, b, self.cuts, self.n, self.max_panel)

    def integrate(self, f, a, b):
        return quad.integrate(f, a, b, self.cuts, self.n, self.max_panel)

    # -- closed-form kernels ---------------------------------------------------------

    def phi_r(self, t, v):
        _check_order(t, v)
        return _out(np.exp(-(self._A(v) - self._A(t))))

    def sigma_rr(self, t, v):
        _check_order(t, v)
        v = np.asarray(v, dtype=float)
        out = np.exp(-2.0 * self._A(v)) * (self._J(v) - self._J(t))
        return _out(np.maximum(out, 0.0))

    def psi_r(self, t, v):
        # gamma evaluated at the later argument
        g = self.gamma(v)
        return _out(np.exp(0.5 * g * g * self.sigma_rr(t, v)))

    # -- integrated kernels ----------------------------------------------------------

    def _sigma_rz_many(self, t, v, inner=False):
        t = float(t)

        def f(u):
            return self.psi_r(t, u) * np.exp(self._A(u)) * self.sigma_rr(t, u)

        v = np.asarray(v, dtype=float)
        return np.exp(-self._A(v)) * self.cumulative(f, t, v, inner=inner)

    def sigma_rz(self, t, v):
        _check_order(t, v)
        if np.ndim(v) == 0:
            return self._memo("rz", (t, v), lambda: float(self._sigma_rz_many(t, v)))
        return self._sigma_rz_many(t, v)

    def _sigma_zz_many(self, t, v):
        t = float(t)

        def f(u):
            return 2.0 * self.psi_r(t, u) * self._sigma_rz_many(t, u, inner=True)

        return self.cumulative(f, t, v)

    def sigma_zz(self, t, v):
        _check_order(t, v)
        if np.ndim(v) == 0:
            return self._memo("zz", (t, v), lambda: float(self._sigma_zz_many(t, v)))
        return self._sigma_zz_many(t, v)

    def cov(self, t, v) -> np.ndarray:
        """2x2 covariance of (y_v, z_v - z_t) given the state at t."""
        rr, rz, zz = self.sigma_rr(t, v), self.sigma_rz(t, v), self.sigma_zz(t, v)
        return np.array([[rr, rz], [rz, zz]])

    def _b_star_many(self, t, v, inner=False):
        t = float(t)

        def f(u):
            return self.psi_r(t, u) * self.phi_r(t, u)

        return self.cumulative(f, t, v, inner=inner)

    def b_star(self, t, v):
        _check_order(t, v)
        if np.ndim(v) == 0:
            return self._memo("bs", (t, v), lambda: float(self._b_star_many(t, v)))
        return self._b_star_many(t, v)

    def b_plus(self, t, t1, v):
        """Integral form int_{t1}^v psi_r(t, u) phi_r(t1, u) du."""
        _check_order(t, t1, v)
        t1a = np.atleast_1d(np.asarray(t1, dtype=float))
        out = np.array([
            self.integrate(lambda u, s=s: self.psi_r(t, u) * self.phi_r(s, u), s, v)
            for s in t1a
        ])
        return float(out[0]) if np.ndim(t1) == 0 else out.reshape(np.shape(t1))

    def b_plus_quotient(self, t, t1, v):
        """Quotient form (B*(t, v) - B*(t, t1)) / phi_r(t, t1)."""
        _check_order(t, t1, v)
        return _out((self.b_star(t, v) - self.b_star(t, t1)) / self.phi_r(t, t1))

    def _b_plus_many(self, t, t1, v):
        """B+(t, t1, v) for an array t1, via one cumulative rule from t."""
        t1 = np.asarray(t1, dtype=float)

        def f(u):
            return self.psi_r(t, u) * np.exp(-self._A(u))

        c = self.cumulative(f, t, np.append(t1, v))
        return np.exp(self._A(t1)) * (c[-1] - c[:-1])

    def mu_star(self, y, t, v):
        _check_order(t, v)
        bs = self.b_star(t, v)
        return _out(bs * (np.asarray(y) + self.sigma_rz(0.0, t)) + 0.5 * bs * bs * self.sigma_rr(0.0, t))

    def v_c(self, t, u, v):
        _check_order(t, u, v)
        bs = self.b_star(u, v)
        return bs * bs * self.sigma_rr(t, u) + self.sigma_zz(u, v)

    def v_c_tilde(self, t, T1, T2):
        _check_order(t, T1, T2)
        bs = self.b_star(T1, T2)
        return bs * bs * self.sigma_rr(t, T1)

    def delta_shifts(self, t, u):
        """(Delta y, Delta z) shift pair of the first-order Green's function."""
        _check_order(t, u)
        g = self.gamma(u)
        dy = g * self.sigma_rr(t, u) / self.phi_r(t, u)
        dz = g * self.sigma_rz(t, u) - self.b_star(t, u) * dy
        return _out(dy), _out(dz)

    # -- first-order calibration ------------------------------------------------------

    def _y_star_cap_many(self, t1, t):
        t1 = np.asarray(t1, dtype=float)
        rr = self.sigma_rr(0.0, t1)
        rz = self._sigma_rz_many(0.0, t1, inner=True)
        bp = self._b_plus_many(0.0, t1, t)
        return self.gamma(t1) * (self.y_star(t1) - bp * rr - rz)

    def y_star_cap(self, t1, t):
        _check_order(0.0, t1, t)
        return _out(self._y_star_cap_many(np.asarray(t1, dtype=float), t))

    def _r_star_1(self, t: float) -> float:
        g_t = self.gamma(t)
        head = sinhc(g_t, self.y_star(t) - self.sigma_rz(0.0, t), self.floor)
        x, w = self.nodes(0.0, t)
        tail = 0.0
        if x.size:
            y_cap = self._y_star_cap_many(x, t)
            f = self.psi_r(0.0, x) * self.phi_r(x, t) * self.sigma_rr(0.0, x) * cosh_m1(y_cap)
            tail = float(np.dot(w, f))
        # minus sign on the cosh integral: keeps F^T(0, 0) = D(0, T) exact at first order
        return -self.psi_r(0.0, t) * (head - tail)

    def r_star_1(self, t):
        _check_order(0.0, t)
        ta = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([self._memo("r1", (s,), lambda s=s: self._r_star_1(float(s))) for s in ta])
        return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))

    def epsilon_report(self, horizon: float | None = None) -> EpsilonReport:
        """Sup over a 64-point grid on [0, horizon] of gamma^2 sigma_rr(0, v) and |gamma y*|."""
        h = self.params.horizon if horizon is None else float(horizon)
        grid = np.linspace(0.0, h, 64)
        g = self.gamma(grid)
        eps = float(np.max(g * g * self.sigma_rr(0.0, grid)))
        skew = float(np.max(np.abs(g * self.y_star(grid))))
        return EpsilonReport(eps, skew)
