"""Oracle suites shared by the CLI validation commands.

Every suite returns a list of :class:`Check` records; nothing is printed
here. Tolerances are multiplied by ``tol_scale`` so callers can tighten or
deliberately break them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import greens, mc
from .kernels import KernelSet
from .pricing import bond_price, price
from .termstructure import ContractKind, ContractSpec, ModelParams, discount


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(abs(self.residual) <= self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: residual={self.residual:.3e} tol={self.tolerance:.3e}"


def default_contracts(params: ModelParams) -> list[ContractSpec]:
    """3M and 1M contracts starting at T1 = 0.5, clipped to the horizon."""
    T1 = min(0.5, params.horizon - 0.25)
    return [
        ContractSpec(ContractKind.SOFR_3M, T1, T1 + 0.25, 0.25),
        ContractSpec(ContractKind.SOFR_1M, T1, T1 + 1.0 / 12.0, 1.0 / 12.0),
    ]


def _rel(a, b) -> float:
    """Largest relative error, absolute where the reference vanishes."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    err = np.abs(a - b) / np.where(b == 0, 1.0, np.abs(b))
    return float(np.max(err))


# -- closed-form kernels --------------------------------------------------------------------


def constant_coefficients(params: ModelParams) -> tuple[float, float]:
    """(alpha, sigma) if both curves are constant, else ValueError."""
    if len(params.alpha.values) != 1 or len(params.sigma.values) != 1:
        raise ValueError("closed-form suite needs constant alpha and sigma curves")
    return params.alpha.values[0], params.sigma.values[0]


def analytic_kernels(alpha: float, sigma: float, t: float, v):
    """phi_r, sigma_rr and B* (gamma = 0) for constant coefficients."""
    tau = np.asarray(v, dtype=float) - t
    phi = np.exp(-alpha * tau)
    if alpha == 0.0:
        return phi, sigma**2 * tau, tau
    rr = sigma**2 * -np.expm1(-2.0 * alpha * tau) / (2.0 * alpha)
    b = -np.expm1(-alpha * tau) / alpha
    return phi, rr, b


def trapezoid_oracle(k: KernelSet, t: float, v: float, panels: int = 10_000):
    """sigma_rz(t, v) and sigma_zz(t, v) by cumulative trapezoid rules.

    The interval is split at parameter breakpoints and panels are shared out
    by length; segment ends are sampled just inside the segment so jumps in
    the parameters are integrated on the correct side.
    """
    cuts = k.cuts[(k.cuts > t) & (k.cuts < v)]
    edges = np.concatenate([[t], cuts, [v]])
    A = k.params.alpha.primitive
    acc_rz = acc_zz = 0.0
    rz_end = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, round(panels * (b - a) / (v - t)))
        u = np.linspace(a, b, n + 1)
        nudge = 1e-13 * max(1.0, abs(b))
        ue = np.clip(u, a + nudge, b - nudge)
        psi = k.psi_r(t, ue)
        inc = cumulative_trapezoid(psi * np.exp(A(u)) * k.sigma_rr(t, u), u, initial=0.0)
        rz = np.exp(-A(u)) * (acc_rz + inc)
        acc_rz += inc[-1]
        acc_zz += 2.0 * np.trapezoid(psi * rz, u)
        rz_end = rz[-1]
    return float(rz_end), float(acc_zz)


def closedform_suite(params: ModelParams, tol_scale: float = 1.0, tol: float = 1e-12) -> list[Check]:
    alpha, sigma = constant_coefficients(params)
    h = params.horizon
    k0 = KernelSet(params.replace(gamma=0.0))
    v = np.linspace(0.0, h, 9)[1:]
    phi, rr, b = analytic_kernels(alpha, sigma, 0.0, v)
    checks = [
        Check("phi_r vs analytic", _rel(k0.phi_r(0.0, v), phi), tol * tol_scale),
        Check("sigma_rr vs analytic", _rel(k0.sigma_rr(0.0, v), rr), tol * tol_scale),
        Check("b_star vs analytic", _rel([k0.b_star(0.0, x) for x in v], b), tol * tol_scale),
    ]
    k = KernelSet(params)
    span = min(h, 1.0)
    rz_o, zz_o = trapezoid_oracle(k, 0.0, span)
    checks.append(Check("sigma_rz vs trapezoid", _rel(k.sigma_rz(0.0, span), rz_o), 1e-8 * tol_scale))
    checks.append(Check("sigma_zz vs trapezoid", _rel(k.sigma_zz(0.0, span), zz_o), 1e-8 * tol_scale))
    for T in (0.25, 0.5, 1.0, 2.0, 5.0):
        if T <= h:
            D = float(discount(params, 0.0, T))
            checks.append(Check(f"bond_price(0,0,{T:g}) vs D", _rel(bond_price(k, 0.0, 0.0, T), D),
                                1e-7 * tol_scale))
    return checks


# -- Monte Carlo -------------------------------------------------------------------------


_ROUNDING = 64 * np.finfo(float).eps


def mc_suite(params: ModelParams, contracts, cfg: mc.SimConfig, tol_scale: float = 1.0) -> list[Check]:
    k = KernelSet(params)
    checks = []
    grid = [t for t in (1.0, 2.0) if t <= params.horizon]
    if grid:
        for t, est, D in mc.mc_no_arbitrage(k, grid, cfg):
            eps = k.epsilon_report(t).epsilon
            tol = (3.0 * est.std_error / D + 2.0 * eps * eps) * tol_scale
            checks.append(Check(f"no-arbitrage t={t:g}", (est.mean - D) / D, tol))
    for spec in contracts or default_contracts(params):
        if spec.kind is ContractKind.FORWARD:
            continue
        est = mc.mc_price(spec, k, cfg)
        val = price(k, spec).total
        eps = k.epsilon_report(spec.T2).epsilon
        # rounding floor: antithetic pairs cancel exactly on payoffs linear in the state
        tol = max(3.0 * est.std_error, 2.0 * eps * eps * abs(val), _ROUNDING * abs(val)) * tol_scale
        checks.append(Check(f"{spec.kind.value} T1={spec.T1:g} vs MC", val - est.mean, tol))
    return checks


# -- Green's function -------------------------------------------------------------------


def greens_suite(params: ModelParams, contracts, n: int = greens.DEFAULT_GRID,
                 box: float = greens.DEFAULT_BOX, tol_scale: float = 1.0) -> list[Check]:
    k = KernelSet(params)
    checks = []
    specs = [s for s in (contracts or default_contracts(params))
             if s.kind in (ContractKind.SOFR_3M, ContractKind.SOFR_1M)]
    T1 = specs[0].T1 if specs and specs[0].T1 > 0 else 0.5
    g = greens.transition(k, 0.0, 0.0, 0.0, T1)
    mass = greens.convolve(k, greens.PayoffGrid.build(g, lambda e, z: 1.0, n, box), 0.0, 0.0, 0.0, T1)
    checks.append(Check("mass of G0", mass.order0 - 1.0, 1e-6 * tol_scale))
    checks.append(Check("mass of G1", mass.order1, 1e-6 * tol_scale))
    n_stage = min(n, 64)
    for spec in specs:
        if spec.kind is ContractKind.SOFR_3M:
            pay, tilt = greens.payoff_3m(k, spec.T1, spec.T2), 1.0
        else:
            pay, tilt = greens.payoff_1m(k, spec.T1, spec.T2), 0.0
        res = greens.staged_price(k, pay, 0.0, 0.0, spec.T1, spec.T2, n_stage, box, tilt)
        val = price(k, spec).total
        eps = k.epsilon_report(spec.T2).epsilon
        tol = (2.0 * eps * eps * abs(val) + 1e-6) * tol_scale
        checks.append(Check(f"{spec.kind.value} T1={spec.T1:g} staged vs closed form", res.price - val, tol))
        checks.append(Check(f"{spec.kind.value} T1={spec.T1:g} V(1,0) term", res.v10,
                            1e-8 * max(abs(val), 1e-300) * tol_scale))
    return checks


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)


__all__ = [
    "Check", "analytic_kernels", "closedform_suite", "default_contracts", "greens_suite",
    "mc_suite", "trapezoid_oracle", "all_passed",
]
