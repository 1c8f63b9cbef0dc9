"""Time-dependent model inputs: parameter curves, discount factors and config I/O.

All curves are right-continuous and piecewise constant in time (year fractions),
extrapolated flat on both sides. Everything here is immutable.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

CURVE_NAMES = ("alpha", "sigma", "gamma", "y_star", "rbar")


class ConfigError(ValueError):
    """Invalid model configuration. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class PiecewiseCurve:
    """Right-continuous piecewise-constant function of time.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``; the first
    value also applies to the left of ``breakpoints[0]``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(vals) == 0:
            raise ValueError("curve needs at least one value")
        if len(bp) != len(vals):
            raise ValueError(
                f"curve has {len(bp)} breakpoints but {len(vals)} values"
            )
        if not all(math.isfinite(x) for x in bp + vals):
            raise ValueError("curve breakpoints and values must be finite")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("curve breakpoints must be strictly increasing")
        b = np.asarray(bp)
        v = np.asarray(vals)
        cum = np.concatenate([[0.0], np.cumsum(v[:-1] * np.diff(b))])
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def constant(cls, value: float) -> "PiecewiseCurve":
        return cls((0.0,), (float(value),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = np.asarray(self.values)[idx]
        return float(out) if out.ndim == 0 else out

    def primitive(self, t):
        """Integral of the curve from ``breakpoints[0]`` to ``t`` (signed)."""
        t = np.asarray(t, dtype=float)
        b = np.asarray(self.breakpoints)
        idx = np.clip(np.searchsorted(b, t, side="right") - 1, 0, len(b) - 1)
        out = self._cum[idx] + np.asarray(self.values)[idx] * (t - b[idx])
        return float(out) if out.ndim == 0 else out

    def integral(self, a, b):
        return self.primitive(b) - self.primitive(a)

    def min_on(self, a: float, b: float) -> float:
        """Smallest value attained on ``[a, b]``."""
        bp = np.asarray(self.breakpoints)
        inside = [self(a)] + [self(x) for x in bp[(bp > a) & (bp <= b)]]
        return float(min(inside))

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}


def eval_curve(curve: PiecewiseCurve, t: float) -> float:
    return curve(t)


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature resolution.

    nodes_per_segment
        Gauss-Legendre order on every panel of an outer integral.
    inner_grid_points
        Gauss-Legendre order for nested (inner) integrals tabulated at the
        outer nodes.
    gamma_floor
        Below this smile factor, sinh(g x)/g is evaluated by its Taylor series.
    max_panel
        Panels longer than this (years) are subdivided.
    """

    nodes_per_segment: int = 24
    inner_grid_points: int = 10
    gamma_floor: float = 1e-6
    max_panel: float = 0.5

    def __post_init__(self):
        if int(self.nodes_per_segment) < 4:
            raise ConfigError("quadrature.nodes_per_segment", "must be >= 4")
        if int(self.inner_grid_points) < 1:
            raise ConfigError("quadrature.inner_grid_points", "must be positive")
        if not (0.0 < self.gamma_floor <= 1e-4):
            raise ConfigError("quadrature.gamma_floor", "must lie in (0, 1e-4]")
        if not self.max_panel > 0:
            raise ConfigError("quadrature.max_panel", "must be positive")


@dataclass(frozen=True)
class ModelParams:
    """Full model state: five parameter curves, the horizon and quadrature."""

    alpha: PiecewiseCurve
    sigma: PiecewiseCurve
    gamma: PiecewiseCurve
    y_star: PiecewiseCurve
    rbar: PiecewiseCurve
    horizon: float
    quadrature: QuadConfig = QuadConfig()
    # volatility of the Hull-White comparison model (ATM-recalibrated); None means sigma
    hw_sigma: PiecewiseCurve | None = None

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError("horizon", "must be a positive number")
        for name in ("alpha", "sigma", "gamma", "hw_sigma"):
            curve = getattr(self, name)
            if curve is not None and curve.min_on(0.0, self.horizon) < 0:
                raise ConfigError(name, f"{name} must be non-negative")

    @classmethod
    def constant(
        cls,
        alpha: float,
        sigma: float,
        gamma: float,
        y_star: float,
        rbar: float,
        horizon: float,
        quadrature: QuadConfig | None = None,
    ) -> "ModelParams":
        c = PiecewiseCurve.constant
        return cls(
            c(alpha), c(sigma), c(gamma), c(y_star), c(rbar), horizon,
            quadrature or QuadConfig(),
        )

    def curves(self) -> dict[str, PiecewiseCurve]:
        return {name: getattr(self, name) for name in CURVE_NAMES}

    def replace(self, **changes) -> "ModelParams":
        kw = {
            **self.curves(), "horizon": self.horizon, "quadrature": self.quadrature,
            "hw_sigma": self.hw_sigma,
        }
        for k, v in changes.items():
            if (k in CURVE_NAMES or k == "hw_sigma") and isinstance(v, (int, float)):
                v = PiecewiseCurve.constant(v)
            kw[k] = v
        return ModelParams(**kw)

    def breakpoints(self) -> np.ndarray:
        """Union of all curve breakpoints."""
        pts = set()
        for c in self.curves().values():
            pts.update(c.breakpoints)
        return np.array(sorted(pts))


class ContractKind(str, enum.Enum):
    SOFR_1M = "sofr1m"
    SOFR_3M = "sofr3m"
    EURODOLLAR = "eurodollar"
    FORWARD = "forward"


@dataclass(frozen=True)
class ContractSpec:
    kind: ContractKind
    T1: float
    T2: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ContractKind(self.kind))
        if not (0.0 <= self.T1 < self.T2):
            raise ValueError(f"contract needs 0 <= T1 < T2, got T1={self.T1}, T2={self.T2}")
        if not self.delta > 0:
            raise ValueError("contract delta must be positive")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "t1": self.T1, "t2": self.T2, "delta": self.delta}


def discount(params: ModelParams, t1, t2):
    """Forward discount factor exp(-int_{t1}^{t2} rbar)."""
    if np.any(np.asarray(t1) > np.asarray(t2)):
        raise ValueError("discount needs t1 <= t2")
    return np.exp(-params.rbar.integral(t1, t2))


# -- config I/O ---------------------------------------------------------------


def _curve_from(name: str, raw) -> PiecewiseCurve:
    if isinstance(raw, (int, float)):
        return PiecewiseCurve.constant(raw)
    if not isinstance(raw, dict) or "values" not in raw:
        raise ConfigError(f"curves.{name}", "expected {breakpoints, values}")
    values = raw["values"]
    breakpoints = raw.get("breakpoints", [0.0] if len(values) == 1 else None)
    if breakpoints is None:
        raise ConfigError(f"curves.{name}", "breakpoints missing")
    try:
        return PiecewiseCurve(tuple(breakpoints), tuple(values))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"curves.{name}", str(exc)) from None


def params_from_dict(raw: dict) -> tuple[ModelParams, list[ContractSpec]]:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if "horizon" not in raw:
        raise ConfigError("horizon", "missing")
    try:
        horizon = float(raw["horizon"])
    except (TypeError, ValueError):
        raise ConfigError("horizon", "must be a number") from None
    curves_raw = raw.get("curves")
    if not isinstance(curves_raw, dict):
        raise ConfigError("curves", "missing or not an object")
    curves = {}
    for name in CURVE_NAMES:
        if name not in curves_raw:
            raise ConfigError(f"curves.{name}", "missing")
        curves[name] = _curve_from(name, curves_raw[name])
    extra = {}
    for name, val in curves_raw.items():
        if name not in CURVE_NAMES:
            extra[name] = _curve_from(name, val)
    quad_raw = raw.get("quadrature", {})
    if not isinstance(quad_raw, dict):
        raise ConfigError("quadrature", "must be an object")
    unknown = set(quad_raw) - {"nodes_per_segment", "inner_grid_points", "gamma_floor", "max_panel"}
    if unknown:
        raise ConfigError("quadrature", f"unknown keys {sorted(unknown)}")
    bad = set(extra) - {"hw_sigma"}
    if bad:
        raise ConfigError("curves", f"unknown curves {sorted(bad)}")
    quad = QuadConfig(**quad_raw)
    params = ModelParams(
        **curves, horizon=horizon, quadrature=quad, hw_sigma=extra.get("hw_sigma")
    )

    contracts = []
    for i, c in enumerate(raw.get("contracts", [])):
        where = f"contracts[{i}]"
        try:
            spec = ContractSpec(
                ContractKind(str(c["kind"]).lower()), float(c["t1"]), float(c["t2"]),
                float(c.get("delta", float(c["t2"]) - float(c["t1"]))),
            )
        except KeyError as exc:
            raise ConfigError(where, f"missing {exc.args[0]}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(where, str(exc)) from None
        if spec.T2 > horizon:
            raise ConfigError(where, f"t2={spec.T2} exceeds horizon {horizon}")
        contracts.append(spec)
    return params, contracts


def load_config(path) -> tuple[ModelParams, list[ContractSpec]]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"parse error: {exc}") from None
    return params_from_dict(raw)


def params_to_dict(params: ModelParams, contracts: Iterable[ContractSpec] = ()) -> dict:
    q = params.quadrature
    curves = {name: c.to_dict() for name, c in params.curves().items()}
    if params.hw_sigma is not None:
        curves["hw_sigma"] = params.hw_sigma.to_dict()
    return {
        "horizon": params.horizon,
        "curves": curves,
        "quadrature": {
            "nodes_per_segment": q.nodes_per_segment,
            "inner_grid_points": q.inner_grid_points,
            "gamma_floor": q.gamma_floor,
            "max_panel": q.max_panel,
        },
        "contracts": [c.to_dict() for c in contracts],
    }


def save_config(path, params: ModelParams, contracts: Sequence[ContractSpec] = ()) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params, contracts), indent=2) + "\n")
