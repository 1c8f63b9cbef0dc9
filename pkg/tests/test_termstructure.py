import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sofr_convexity.termstructure import (
    ConfigError,
    ContractKind,
    ContractSpec,
    ModelParams,
    PiecewiseCurve,
    QuadConfig,
    discount,
    load_config,
    params_from_dict,
    params_to_dict,
    save_config,
)

times = st.floats(0.0, 10.0, allow_nan=False)


@st.composite
def curves(draw, lo=-0.05, hi=0.05):
    n = draw(st.integers(1, 5))
    gaps = draw(st.lists(st.floats(0.05, 2.0), min_size=n - 1, max_size=n - 1))
    bp = np.concatenate([[0.0], np.cumsum(gaps)]).tolist()
    vals = draw(st.lists(st.floats(lo, hi), min_size=n, max_size=n))
    return PiecewiseCurve(tuple(bp), tuple(vals))


def test_curve_is_right_continuous():
    c = PiecewiseCurve((0.0, 1.0), (0.02, 0.03))
    assert c(0.999999) == 0.02
    assert c(1.0) == 0.03
    assert c(-1.0) == 0.02 and c(50.0) == 0.03


def test_curve_primitive_matches_hand_integral():
    c = PiecewiseCurve((0.0, 1.0, 2.5), (0.01, 0.02, 0.04))
    assert c.integral(0.5, 3.0) == pytest.approx(0.5 * 0.01 + 1.5 * 0.02 + 0.5 * 0.04, rel=1e-15)


def test_curve_rejects_bad_input():
    with pytest.raises(ValueError, match="strictly increasing"):
        PiecewiseCurve((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(ValueError, match="breakpoints"):
        PiecewiseCurve((0.0,), (1.0, 2.0))
    with pytest.raises(ValueError, match="finite"):
        PiecewiseCurve((0.0,), (math.nan,))


@given(curves(), times, times, times)
def test_discount_is_multiplicative(rbar, a, b, c):
    t1, t2, t3 = sorted((a, b, c))
    p = ModelParams.constant(0.03, 0.01, 0.0, 0.0, 0.02, 10.0).replace(rbar=rbar)
    lhs = discount(p, t1, t3)
    rhs = discount(p, t1, t2) * discount(p, t2, t3)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_discount_flat_curve():
    p = ModelParams.constant(0.03, 0.01, 0.0, 0.0, 0.02, 5.0)
    assert discount(p, 0.5, 0.75) == pytest.approx(math.exp(-0.005), rel=1e-15)
    assert discount(p, 1.0, 1.0) == 1.0


def test_negative_sigma_is_rejected_by_name():
    with pytest.raises(ConfigError, match="sigma must be non-negative") as info:
        ModelParams.constant(0.03, -0.01, 0.0, 0.0, 0.02, 5.0)
    assert info.value.field == "sigma"


def test_quadrature_validation():
    with pytest.raises(ConfigError, match="nodes_per_segment"):
        QuadConfig(nodes_per_segment=2)
    with pytest.raises(ConfigError, match="gamma_floor"):
        QuadConfig(gamma_floor=0.1)


def test_contract_spec_checks_order():
    with pytest.raises(ValueError):
        ContractSpec(ContractKind.SOFR_3M, 1.0, 0.5, 0.25)
    assert ContractSpec("sofr3m", 0.5, 0.75, 0.25).kind is ContractKind.SOFR_3M


def _raw():
    return {
        "horizon": 5.0,
        "curves": {
            "alpha": 0.03,
            "sigma": {"breakpoints": [0.0, 1.0], "values": [0.01, 0.012]},
            "gamma": 20.0,
            "y_star": -0.002,
            "rbar": {"breakpoints": [0.0, 2.0], "values": [0.02, 0.03]},
        },
        "contracts": [{"kind": "SOFR3M", "t1": 0.5, "t2": 0.75}],
    }


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda r: r.pop("horizon"), "horizon"),
        (lambda r: r["curves"].pop("gamma"), "curves.gamma"),
        (lambda r: r["curves"].__setitem__("alpha", {"breakpoints": [0, 0], "values": [1, 2]}), "curves.alpha"),
        (lambda r: r["curves"].__setitem__("sigma", -0.01), "sigma"),
        (lambda r: r["curves"].__setitem__("kappa", 1.0), "curves"),
        (lambda r: r.__setitem__("quadrature", {"bogus": 1}), "quadrature"),
        (lambda r: r["contracts"].append({"kind": "sofr1m", "t1": 4.95, "t2": 5.1}), "contracts[1]"),
        (lambda r: r["contracts"].append({"kind": "swap", "t1": 1, "t2": 2}), "contracts[1]"),
    ],
)
def test_config_errors_name_the_field(mutate, field):
    raw = _raw()
    mutate(raw)
    with pytest.raises(ConfigError) as info:
        params_from_dict(raw)
    assert info.value.field == field


def test_config_round_trip(tmp_path):
    params, contracts = params_from_dict(_raw())
    path = tmp_path / "cfg.json"
    save_config(path, params, contracts)
    again, contracts2 = load_config(path)
    assert again == params
    assert contracts2 == contracts
    assert json.loads(path.read_text())["contracts"][0]["kind"] == "sofr3m"


@given(curves(0.0, 0.05), curves(0.0, 0.02), curves(0.0, 30.0), curves(-0.01, 0.01), curves())
def test_config_round_trip_property(alpha, sigma, gamma, y_star, rbar):
    p = ModelParams(alpha, sigma, gamma, y_star, rbar, 10.0)
    again, _ = params_from_dict(json.loads(json.dumps(params_to_dict(p))))
    assert again == p


def test_load_config_reports_json_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "<json>"
