"""
How the first-order 3M correction scales
========================================

The expansion parameter epsilon grows like (gamma * sigma)^2. The 3M price
correction v1 has two pieces. One is the Hull-White calibration drift over
the accrual period, equal to half the variance of the integrated rate
there. It grows like sigma^2 and ignores gamma. The other is the smile
piece, proportional to epsilon * sigma^2. Neither way of moving epsilon gives v1 a log-log slope
of one against epsilon. The smile piece alone has slope one only when gamma
is the knob.
"""

import numpy as np

from sofr_convexity import KernelSet, ModelParams
from sofr_convexity.pricing import price_sofr_3m

BASE = dict(alpha=0.03, sigma=0.01, gamma=20.0, y_star=-0.002, rbar=0.02, horizon=5.0)
T1, T2 = 0.5, 0.75


def pieces(**kw):
    k = KernelSet(ModelParams.constant(**{**BASE, **kw}))
    b = price_sofr_3m(k, 0.0, 0.0, T1, T2)
    # Hull-White drift term, carried on the zeroth-order price
    hw = 0.5 * k.sigma_zz(T1, T2) * (1.0 + b.v0)
    return k.epsilon_report(T2).epsilon, abs(b.v1), abs(b.v1 - hw)


def slope(x, y):
    return np.polyfit(np.log(x), np.log(y), 1)[0]


for name, values in (("sigma", [0.005, 0.01, 0.02]), ("gamma", [10.0, 20.0, 40.0])):
    eps, v1, smile = np.array([pieces(**{name: v}) for v in values]).T
    print(f"scaling {name}: epsilon {np.round(eps, 5)}")
    print(f"   |v1|        {v1}  slope {slope(eps, v1):.3f}")
    print(f"   smile part  {smile}  slope {slope(eps, smile):.3f}")
