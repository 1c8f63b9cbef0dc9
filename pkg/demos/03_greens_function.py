"""
Staged Green's-function pricing
===============================

The futures price can be rebuilt without the closed forms: propagate the
joint density of the state and the integrated rate with the perturbed
transition density, first across the accrual period and then back to
today. The two stages reproduce the closed-form prices to round-off.
"""

from sofr_convexity import ContractSpec, KernelSet, ModelParams, greens
from sofr_convexity.pricing import price

params = ModelParams.constant(alpha=0.03, sigma=0.01, gamma=20.0, y_star=-0.002, rbar=0.02, horizon=5.0)
k = KernelSet(params)
T1, T2 = 0.5, 0.75

# the transition density integrates to one, and its correction to zero
g = greens.transition(k, 0.0, 0.0, 0.0, T1)
grid = greens.PayoffGrid.build(g, lambda eta, zeta: 1.0, n=200, box=10.0)
mass = greens.convolve(k, grid, 0.0, 0.0, 0.0, T1)
print(f"mass of G0 - 1: {mass.order0 - 1:.2e}   mass of G1: {mass.order1:.2e}")

# 3M SOFR: the payoff is exp of the integrated rate; tilt the grid towards its mass
res = greens.staged_price(k, greens.payoff_3m(k, T1, T2), 0.0, 0.0, T1, T2, n=64, tilt=1.0)
val = price(k, ContractSpec("sofr3m", T1, T2, 0.25)).total
print(f"3M staged {res.price:.15f}  closed {val:.15f}  diff {res.price - val:.1e}")
# the cross term of the two first-order corrections is second order and tiny
print(f"   second-order cross term V(1,0): {res.v10:.1e}")

res = greens.staged_price(k, greens.payoff_1m(k, T1, T1 + 1 / 12), 0.0, 0.0, T1, T1 + 1 / 12, n=64)
val = price(k, ContractSpec("sofr1m", T1, T1 + 1 / 12, 1 / 12)).total
print(f"1M staged {res.price:.15f}  closed {val:.15f}  diff {res.price - val:.1e}")
