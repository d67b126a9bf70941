"""Threshold estimates from crossings of logical-rate curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NoCrossingInGrid
from .sim import SimResult

__all__ = ["ThresholdEstimate", "estimate_threshold", "pairwise_crossings"]


@dataclass(frozen=True)
class ThresholdEstimate:
    p_star: float
    ci: tuple[float, float]
    crossings: tuple[float, ...]
    method: dict = field(default_factory=dict)


def _logit(f, n):
    r = (np.asarray(f, dtype=float) + 0.5) / (np.asarray(n, dtype=float) + 1.0)
    return np.log(r / (1.0 - r))


def _crossing(p, ya, yb):
    """First upward sign change of ``yb - ya``, interpolated linearly."""
    d = yb - ya
    for i in range(len(p) - 1):
        if d[i] <= 0.0 < d[i + 1] or d[i] < 0.0 <= d[i + 1]:
            t = -d[i] / (d[i + 1] - d[i])
            return p[i] + t * (p[i + 1] - p[i])
    return None


def _curves(result: SimResult):
    by_L: dict = {}
    for r in result.rows:
        by_L.setdefault(r.L, {})[r.p] = (r.failures, r.trials)
    Ls = sorted(by_L)
    if len(Ls) < 2:
        raise NoCrossingInGrid("need at least two sizes")
    common = sorted(set.intersection(*(set(by_L[L]) for L in Ls)))
    if len(common) < 2:
        raise NoCrossingInGrid("sizes share fewer than two p values")
    f = np.array([[by_L[L][p][0] for p in common] for L in Ls], dtype=float)
    n = np.array([[by_L[L][p][1] for p in common] for L in Ls], dtype=float)
    return Ls, np.array(common), f, n


def pairwise_crossings(p, f, n):
    y = _logit(f, n)
    out = []
    for a in range(len(y) - 1):
        x = _crossing(p, y[a], y[a + 1])
        if x is None:
            return None
        out.append(x)
    return out


def estimate_threshold(result: SimResult, resamples: int = 1000, seed: int = 0) -> ThresholdEstimate:
    """Mean of consecutive-size crossings with a parametric bootstrap CI.

    Curves are compared in log-odds of the logical rate and interpolated
    linearly between grid points.  The bootstrap redraws every point's
    failure count from a binomial at its observed rate.
    """
    Ls, p, f, n = _curves(result)
    xs = pairwise_crossings(p, f, n)
    if xs is None:
        raise NoCrossingInGrid(
            f"curves for L={Ls} do not cross inside p in [{p[0]:g}, {p[-1]:g}]"
        )
    est = float(np.mean(xs))
    rng = np.random.default_rng(seed)
    boots = []
    rate = f / n
    for _ in range(resamples):
        fb = rng.binomial(n.astype(np.int64), rate)
        xb = pairwise_crossings(p, fb, n)
        if xb is not None:
            boots.append(np.mean(xb))
    if boots:
        lo, hi = np.percentile(boots, [2.5, 97.5])
    else:
        lo = hi = est
    return ThresholdEstimate(
        p_star=est,
        ci=(float(lo), float(hi)),
        crossings=tuple(float(x) for x in xs),
        method={
            "estimator": "mean of consecutive-L crossings, linear in log-odds",
            "sizes": list(Ls),
            "bootstrap": {"resamples": resamples, "used": len(boots), "seed": seed},
        },
    )
