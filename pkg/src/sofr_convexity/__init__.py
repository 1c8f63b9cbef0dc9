"""SOFR and Eurodollar futures convexity under a Hull-White model with smile and skew."""

from .kernels import EpsilonReport, KernelSet
from .mc import McEstimate, SimConfig, mc_no_arbitrage, mc_price, simulate_paths
from .pricing import (
    PriceBreakdown,
    bond_price,
    convexity,
    hw_kernels,
    price,
    price_eurodollar,
    price_forward,
    price_hw,
    price_sofr_1m,
    price_sofr_3m,
)
from .termstructure import (
    ConfigError,
    ContractKind,
    ContractSpec,
    ModelParams,
    PiecewiseCurve,
    QuadConfig,
    discount,
    load_config,
    save_config,
)

__all__ = [
    "ConfigError", "ContractKind", "ContractSpec", "EpsilonReport", "KernelSet", "McEstimate",
    "ModelParams", "PiecewiseCurve", "PriceBreakdown", "QuadConfig", "SimConfig", "bond_price",
    "convexity", "discount", "hw_kernels", "load_config", "mc_no_arbitrage", "mc_price", "price",
    "price_eurodollar", "price_forward", "price_hw", "price_sofr_1m", "price_sofr_3m",
    "save_config", "simulate_paths",
]
