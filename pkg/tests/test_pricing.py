import math

import numpy as np
import pytest

from sofr_convexity import ContractKind, ContractSpec, KernelSet, ModelParams, PiecewiseCurve
from sofr_convexity import pricing as P
from sofr_convexity.termstructure import discount

from conftest import desk_params

T1, T2, T2_1M = 0.5, 0.75, 0.5 + 1.0 / 12.0

# desk smile set, y=0, t=0; closed forms cross-checked against the staged
# Green's-function convolution (agreement ~1e-17) and 1e6-path Monte Carlo
FROZEN = {
    "sofr3m": (T2, 0.0050193540055729624),
    "sofr1m": (T2_1M, 0.0016678955017364928),
    "eurodollar": (T2, 0.0050188191374209495),
}


@pytest.mark.parametrize("kind", sorted(FROZEN))
def test_frozen_desk_prices(desk, kind):
    t2, value = FROZEN[kind]
    assert P.price(desk, ContractSpec(kind, T1, t2, t2 - T1)).total == pytest.approx(value, rel=1e-10)


@pytest.mark.parametrize("T", [0.25, 0.5, 1.0, 2.0, 5.0])
def test_calibration_identity(desk, T):
    assert P.bond_price(desk, 0.0, 0.0, T) == pytest.approx(float(discount(desk.params, 0.0, T)), rel=1e-12)


def test_forward_premium_at_origin(desk):
    D = float(discount(desk.params, T1, T2))
    assert P.price_forward(desk, 0.0, 0.0, T1, T2) == pytest.approx(1.0 / D - 1.0, rel=1e-12)


def test_bond_vectorized_in_y(desk):
    ys = np.array([-0.01, 0.0, 0.01])
    vec = P.bond_price(desk, ys, 0.5, 1.0)
    assert vec.shape == (3,)
    for y, b in zip(ys, vec):
        assert b == pytest.approx(P.bond_price(desk, float(y), 0.5, 1.0), rel=1e-14)
    assert vec[0] > vec[1] > vec[2]


@pytest.mark.parametrize("kind", ["sofr3m", "sofr1m", "eurodollar", "forward"])
def test_zero_volatility_convexity_is_exactly_zero(kind):
    rbar = PiecewiseCurve((0.0, 0.6), (0.02, 0.03))
    k = KernelSet(desk_params(sigma=0.0, y_star=0.0).replace(rbar=rbar))
    t2 = T2_1M if kind == "sofr1m" else T2
    b = P.convexity(k, ContractSpec(kind, T1, t2, t2 - T1))
    assert b.convexity == 0.0
    assert b.v1 == 0.0


def test_one_month_convexity_positive_without_skew():
    k = KernelSet(desk_params(y_star=0.0))
    assert P.convexity(k, ContractSpec("sofr1m", T1, T2_1M, 1 / 12)).convexity > 0.0


def test_one_month_closed_integral_is_first_order_close(desk):
    exact = P.convexity(desk, ContractSpec("sofr1m", T1, T2_1M, 1 / 12)).convexity
    approx = P.sofr_1m_convexity_approx(desk, T1, T2_1M)
    eps = desk.epsilon_report(T2_1M).epsilon
    assert approx == pytest.approx(exact, rel=2 * eps)


def test_hull_white_limit_matches_exact_baselines(hw_limit):
    for kind, t2 in (("sofr3m", T2), ("sofr1m", T2_1M), ("eurodollar", T2)):
        ext = P.price(hw_limit, ContractSpec(kind, T1, t2, t2 - T1)).total
        assert ext == pytest.approx(P.price_hw(hw_limit, 0.0, 0.0, T1, t2, kind, exact=True), rel=1e-9)


def test_bare_baseline_misses_accrual_drift(hw_limit):
    ext = P.price_sofr_1m(hw_limit, 0.0, 0.0, T1, T2_1M).total
    base = P.price_hw(hw_limit, 0.0, 0.0, T1, T2_1M, "sofr1m")
    assert ext - base == pytest.approx(0.5 * hw_limit.sigma_zz(T1, T2_1M), rel=1e-6)


def test_hull_white_state_dependence(hw_limit):
    y, t = 0.003, 0.2
    ext = P.price_sofr_3m(hw_limit, y, t, T1, T2).total
    assert ext == pytest.approx(P.price_hw(hw_limit, y, t, T1, T2, "sofr3m", exact=True), rel=1e-9)
    ed = P.price_eurodollar(hw_limit, y, t, T1, T2).total
    assert ed == pytest.approx(P.price_hw(hw_limit, y, t, T1, T2, "eurodollar"), rel=1e-9)


def test_hw_kernels_use_recalibrated_sigma():
    p = desk_params().replace(hw_sigma=0.009)
    k = P.hw_kernels(KernelSet(p))
    assert k.params.gamma(1.0) == 0.0 and k.params.y_star(1.0) == 0.0
    assert k.params.sigma(1.0) == 0.009


def test_breakdown_adds_up(desk):
    b = P.price_eurodollar(desk, 0.001, 0.1, T1, T2)
    assert b.v0 + b.v1 == b.total
    assert b.convexity == b.total - b.reference


def test_sofr_exceeds_eurodollar_on_desk(desk):
    spec3 = ContractSpec("sofr3m", T1, T2, 0.25)
    sed = ContractSpec("eurodollar", T1, T2, 0.25)
    assert P.convexity(desk, spec3).convexity > P.convexity(desk, sed).convexity > 0


def test_forward_kind_has_zero_convexity(desk):
    b = P.price(desk, ContractSpec(ContractKind.FORWARD, T1, T2, 0.25))
    assert b.convexity == 0.0


def test_argument_order_and_overflow(desk):
    with pytest.raises(ValueError):
        P.price_sofr_3m(desk, 0.0, 0.6, T1, T2)
    wild = KernelSet(ModelParams.constant(0.0, 3.0, 0.0, 0.0, 0.02, 50.0))
    with pytest.raises(OverflowError):
        P.price_sofr_3m(wild, 0.0, 0.0, 10.0, 40.0)


def test_piecewise_parameters_price_smoothly():
    p = ModelParams(
        alpha=PiecewiseCurve((0.0, 1.0), (0.03, 0.05)),
        sigma=PiecewiseCurve((0.0, 0.6), (0.01, 0.012)),
        gamma=PiecewiseCurve((0.0, 0.65), (15.0, 20.0)),
        y_star=PiecewiseCurve((0.0,), (-0.002,)),
        rbar=PiecewiseCurve((0.0, 0.7), (0.02, 0.025)),
        horizon=3.0,
    )
    k = KernelSet(p)
    vals = [P.convexity(k, ContractSpec("sofr3m", t, t + 0.25, 0.25)).convexity for t in (0.5, 0.55, 0.6)]
    assert all(v > 0 for v in vals)
    assert math.isclose(vals[1], 0.5 * (vals[0] + vals[2]), rel_tol=0.05)
