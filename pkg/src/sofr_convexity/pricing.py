"""Closed-form futures prices and convexities to first order in the smile.

Prices are functions of the OU state ``y`` at valuation time ``t``. Each
``price_*`` returns a :class:`PriceBreakdown` holding the Hull-White-like
zeroth order value, the first-order smile/skew correction and a reference
value (the matching forward premium, or -log D for the 1M contract).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSet, sinhc
from .termstructure import ContractKind, ContractSpec, discount

_MAX_EXPONENT = 50.0


@dataclass(frozen=True)
class PriceBreakdown:
    v0: float
    v1: float
    total: float
    reference: float

    @property
    def convexity(self) -> float:
        return self.total - self.reference


def _bd(v0, v1, total, reference) -> PriceBreakdown:
    return PriceBreakdown(float(v0), float(v1), float(total), float(reference))


def _order(t, T1, T2):
    if not (t <= T1 < T2):
        raise ValueError(f"need t <= T1 < T2, got t={t}, T1={T1}, T2={T2}")


def _guard(exponent: float):
    if exponent > _MAX_EXPONENT:
        raise OverflowError(f"exponent {exponent:.3g} > {_MAX_EXPONENT}: unrealistic parameters")


def _D(k: KernelSet, t1, t2):
    return discount(k.params, t1, t2)


# -- zero-coupon bond and forward ------------------------------------------------------


def f_one(k: KernelSet, y, t: float, T: float):
    """First-order bond correction; vectorized over ``y``."""
    if t > T:
        raise ValueError("f_one needs t <= T")
    y = np.asarray(y, dtype=float)
    if T == t:
        return np.zeros_like(y) if y.ndim else 0.0
    x, w = k.nodes(t, T)
    rr = k.sigma_rr(t, x)
    yy = y[..., None] if y.ndim else y
    arg = (
        k.phi_r(t, x) * yy
        + k.y_star(x)
        - k._b_plus_many(t, x, T) * rr
        - k.sigma_rz(t, x)
    )
    f = k.psi_r(t, x) * sinhc(k.gamma(x), arg, k.floor) + k.r_star_1(x)
    out = f @ w - k.mu_star(y, t, T) + 0.5 * k.sigma_zz(t, T)
    return float(out) if np.ndim(out) == 0 else out


def bond_price(k: KernelSet, y, t: float, T: float):
    """Zero-coupon bond F^T(y, t) = D(t, T) exp(-mu*) (1 - F1)."""
    return _D(k, t, T) * np.exp(-k.mu_star(y, t, T)) * (1.0 - f_one(k, y, t, T))


def price_forward(k: KernelSet, y: float, t: float, T1: float, T2: float) -> float:
    """Forward premium F^T1 / F^T2 - 1, linearized in the first-order terms."""
    _order(t, T1, T2)
    expo = k.mu_star(y, t, T2) - k.mu_star(y, t, T1)
    _guard(expo)
    corr = 1.0 - f_one(k, y, t, T1) + f_one(k, y, t, T2)
    return math.exp(expo) / _D(k, T1, T2) * corr - 1.0


# -- backward-looking futures ---------------------------------------------------------


def phi_3m(k: KernelSet, y: float, t: float, T1: float, T2: float) -> float:
    """First-order factor of the compounded (3M) futures price."""
    _order(t, T1, T2)
    x, w = k.nodes(T1, T2)
    bs = k.b_star(T1, T2)
    arg = (
        k.phi_r(t, x) * y
        + k.y_star(x)
        + bs * k.phi_r(T1, x) * k.sigma_rr(t, T1)
        + k.sigma_rz(T1, x)
        + k._b_plus_many(T1, x, T2) * k.sigma_rr(T1, x)
    )
    f = k.psi_r(t, x) * sinhc(k.gamma(x), arg, k.floor) + k.r_star_1(x)
    m = k.phi_r(t, T1) * y
    return float(f @ w) - k.mu_star(m, T1, T2) - k.v_c(t, T1, T2)


def price_sofr_3m(k: KernelSet, y: float, t: float, T1: float, T2: float) -> PriceBreakdown:
    _order(t, T1, T2)
    m = k.phi_r(t, T1) * y
    expo = k.mu_star(m, T1, T2) + 0.5 * k.v_c(t, T1, T2)
    _guard(expo)
    D = _D(k, T1, T2)
    base = math.exp(expo) / D
    total = (1.0 + phi_3m(k, y, t, T1, T2)) * base - 1.0
    v0 = base - 1.0
    return _bd(v0, total - v0, total, price_forward(k, y, t, T1, T2))


def price_sofr_1m(k: KernelSet, y: float, t: float, T1: float, T2: float) -> PriceBreakdown:
    _order(t, T1, T2)
    log_d = math.log(_D(k, T1, T2))
    x, w = k.nodes(T1, T2)
    arg = k.phi_r(t, x) * y + k.y_star(x)
    f = k.psi_r(t, x) * sinhc(k.gamma(x), arg, k.floor) + k.r_star_1(x)
    total = -log_d + float(f @ w)
    v0 = -log_d + k.mu_star(k.phi_r(t, T1) * y, T1, T2)
    return _bd(v0, total - v0, total, -log_d)


def sofr_1m_convexity_approx(k: KernelSet, T1: float, T2: float) -> float:
    """Closed integral for the 1M convexity at y=0, t=0, dropping the cosh part of R*_1."""
    x, w = k.nodes(T1, T2)
    g, ys = k.gamma(x), k.y_star(x)
    f = k.psi_r(0.0, x) * (
        sinhc(g, ys, k.floor) - sinhc(g, ys - k.sigma_rz(0.0, x), k.floor)
    )
    return float(f @ w)


# -- forward-looking (Eurodollar) futures --------------------------------------------


def price_eurodollar(k: KernelSet, y: float, t: float, T1: float, T2: float) -> PriceBreakdown:
    """Futures on the term rate fixed at T1, paying 1/F^T2(y_T1, T1) - 1.

    The first-order term is the Gaussian convolution of the bond correction:
    the sinh argument carries the measure shift phi_r(T1, t1) B*(T1, T2)
    sigma_rr(t, T1) induced by exp(mu*), and psi_r is taken from t.
    """
    _order(t, T1, T2)
    m = k.phi_r(t, T1) * y
    bs = k.b_star(T1, T2)
    rr_t = k.sigma_rr(t, T1)
    vct = k.v_c_tilde(t, T1, T2)
    mu = k.mu_star(m, T1, T2)
    expo = mu + 0.5 * vct
    _guard(expo)
    base = math.exp(expo) / _D(k, T1, T2)

    x, w = k.nodes(T1, T2)
    arg = (
        k.phi_r(t, x) * y
        + k.y_star(x)
        + k.phi_r(T1, x) * bs * rr_t
        - k._b_plus_many(T1, x, T2) * k.sigma_rr(T1, x)
        - k.sigma_rz(T1, x)
    )
    f = k.psi_r(t, x) * sinhc(k.gamma(x), arg, k.floor) + k.r_star_1(x)
    bracket = float(f @ w) - mu - vct + 0.5 * k.sigma_zz(T1, T2)
    v0 = base - 1.0
    v1 = bracket * base
    return _bd(v0, v1, v0 + v1, price_forward(k, y, t, T1, T2))


# -- Hull-White baselines ------------------------------------------------------------


def price_hw(k: KernelSet, y: float, t: float, T1: float, T2: float, kind, exact: bool = False) -> float:
    """Zeroth-order (Hull-White) futures value for ``kind``.

    ``k`` should be built on the Hull-White parameter set (gamma = 0, y* = 0,
    ATM-recalibrated sigma); see :func:`hw_kernels`. The default is the pure
    Gaussian-kernel value. With ``exact=True`` the backward-looking prices
    also carry the calibration drift of R*_1 over the accrual period, which
    tends to sigma_zz(T1, T2) / 2 as gamma -> 0. That makes them the exact
    Hull-White futures values.
    """
    _order(t, T1, T2)
    kind = ContractKind(kind)
    D = _D(k, T1, T2)
    mu = k.mu_star(k.phi_r(t, T1) * y, T1, T2)
    shift = 0.5 * k.sigma_zz(T1, T2) if exact else 0.0
    if kind is ContractKind.SOFR_1M:
        return -math.log(D) + mu + shift
    if kind is ContractKind.SOFR_3M:
        return math.exp(mu + shift + 0.5 * k.v_c(t, T1, T2)) / D - 1.0
    if kind is ContractKind.EURODOLLAR:
        return math.exp(mu + 0.5 * k.v_c_tilde(t, T1, T2)) / D - 1.0
    raise ValueError(f"no Hull-White futures baseline for {kind.value}")


def hw_reference(k: KernelSet, kind, T1: float, T2: float) -> float:
    """Value the Hull-White convexity is measured against, at y=0, t=0."""
    D = _D(k, T1, T2)
    if ContractKind(kind) is ContractKind.SOFR_1M:
        return -math.log(D)
    return 1.0 / D - 1.0


def hw_kernels(k: KernelSet) -> KernelSet:
    """Kernels of the Hull-White comparison model: no smile, no skew."""
    p = k.params
    return KernelSet(p.replace(gamma=0.0, y_star=0.0, sigma=p.hw_sigma or p.sigma, hw_sigma=None))


# -- convexity ---------------------------------------------------------------------


def price(k: KernelSet, spec: ContractSpec, y: float = 0.0, t: float = 0.0) -> PriceBreakdown:
    kind = spec.kind
    if kind is ContractKind.SOFR_3M:
        return price_sofr_3m(k, y, t, spec.T1, spec.T2)
    if kind is ContractKind.SOFR_1M:
        return price_sofr_1m(k, y, t, spec.T1, spec.T2)
    if kind is ContractKind.EURODOLLAR:
        return price_eurodollar(k, y, t, spec.T1, spec.T2)
    if kind is ContractKind.FORWARD:
        fwd = price_forward(k, y, t, spec.T1, spec.T2)
        base = 1.0 / _D(k, spec.T1, spec.T2) - 1.0
        return _bd(base, fwd - base, fwd, fwd)
    raise ValueError(f"unsupported contract kind {kind}")


def convexity(k: KernelSet, spec: ContractSpec) -> PriceBreakdown:
    """Price at y=0, t=0 with ``reference`` set to the convexity benchmark.

    3M SOFR: 1/D - 1. 1M SOFR: -log D. Eurodollar: the forward premium.
    Forward: itself (zero convexity by definition).
    """
    b = price(k, spec)
    D = _D(k, spec.T1, spec.T2)
    if spec.kind is ContractKind.SOFR_3M:
        ref = 1.0 / D - 1.0
    elif spec.kind is ContractKind.SOFR_1M:
        ref = -math.log(D)
    else:
        ref = b.reference
    return _bd(b.v0, b.v1, b.total, ref)
