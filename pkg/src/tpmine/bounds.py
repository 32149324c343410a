"""Analytic support and confidence bounds driven by normalised mutual information.

Each bound maps an NMI level to a guaranteed support or confidence of a
target event pair; each ``mu_*`` function inverts one bound to the NMI
level that meets a mining threshold. A bound whose Lambert argument falls
below ``-1/e`` carries no information and is reported as vacuous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .core import MiningConfig, Mode
from .measures import PairStats, stats_from_joint

__all__ = [
    "lambert_w0",
    "support_lower_bound",
    "mu_min_for_support",
    "confidence_lower_bound",
    "mu_min_for_confidence",
    "support_upper_bound",
    "mu_max_for_support",
    "MuThresholds",
    "select_mu",
    "combine_thresholds",
    "support_lower_bound_applies",
    "confidence_bound_applies",
    "support_upper_bound_applies",
]

_INV_E = math.exp(-1.0)
_LN2 = math.log(2.0)
# inverses evaluated at the knee land within round-off of -1/e
_KNEE_TOL = 1e-12


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function (``w * exp(w) = x``, ``w >= -1``).

    Halley iteration from a branch-point series, a Taylor guess or an
    asymptotic guess depending on ``x``.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("lambert_w0 of NaN")
    if x < -_INV_E:
        # tolerate round-off in a computed -1/e
        if x < -_INV_E - _KNEE_TOL:
            raise ValueError(f"lambert_w0 domain is x >= -1/e, got {x}")
        x = -_INV_E
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    q = 2.0 * (math.e * x + 1.0)
    if q <= 0.0:
        return -1.0
    if x < -0.25:
        p = math.sqrt(q)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x < 3.0:
        w = math.log1p(x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        step = f / denom
        w -= step
        if abs(step) <= 1e-14 * (1.0 + abs(w)):
            break
    return max(w, -1.0)


def _check_unit(name: str, value: float, closed_high: bool = False):
    ok = 0.0 < value <= 1.0 if closed_high else 0.0 < value < 1.0
    if not ok:
        raise ValueError(f"{name} must lie in (0, 1{']' if closed_high else ')'}, got {value}")


def support_lower_bound(min_px: float, py_target: float, mu_min: float) -> float:
    """Guaranteed support of the target pair when NMI >= ``mu_min``.

    ``min_px`` is the smallest x marginal, ``py_target`` the marginal of
    the target y symbol. Returns 0 when the bound is vacuous.
    """
    _check_unit("min_px", min_px)
    _check_unit("py_target", py_target, closed_high=True)
    if not 0.0 <= mu_min <= 1.0:
        raise ValueError("mu_min must lie in [0, 1]")
    arg = math.log2(min_px ** (1.0 - mu_min)) * _LN2 / py_target
    if arg < -_INV_E - _KNEE_TOL:
        return 0.0
    return py_target * math.exp(lambert_w0(arg))


def mu_min_for_support(sigma_min: float, min_px: float, py_target: float) -> float:
    """Smallest NMI level at which :func:`support_lower_bound` reaches ``sigma_min``.

    May exceed 1, meaning no dependence level can guarantee the support.
    """
    _check_unit("min_px", min_px)
    _check_unit("py_target", py_target, closed_high=True)
    if sigma_min < 0:
        raise ValueError("sigma_min must be non-negative")
    ratio = sigma_min / py_target
    if ratio <= _INV_E:
        return 1.0 - py_target / (math.e * _LN2 * math.log2(1.0 / min_px))
    return 1.0 - sigma_min * math.log(ratio) / (_LN2 * math.log2(min_px))


def _check_sigma(sigma: float):
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie strictly inside (0, 1), got {sigma}")


def confidence_lower_bound(sigma_min: float, mu_min: float, min_px: float, cond_mass: float, n_x: int) -> float:
    """Guaranteed confidence of a target pair with support >= ``sigma_min`` and NMI >= ``mu_min``.

    ``cond_mass`` is the joint mass of the smallest non-target conditional
    and ``n_x`` the x alphabet size.
    """
    _check_sigma(sigma_min)
    _check_unit("min_px", min_px)
    if n_x < 2:
        raise ValueError("n_x must be at least 2")
    return (sigma_min * min_px ** ((1.0 - mu_min) / sigma_min)
            * ((n_x - 1) / (1.0 - sigma_min)) ** (cond_mass / sigma_min))


def mu_min_for_confidence(delta: float, sigma_min: float, min_px: float, cond_mass: float, n_x: int) -> float:
    """NMI level at which :func:`confidence_lower_bound` reaches ``delta``; may exceed 1."""
    _check_sigma(sigma_min)
    _check_unit("min_px", min_px)
    if n_x < 2:
        raise ValueError("n_x must be at least 2")
    if delta <= 0:
        return -math.inf
    inner = (delta / sigma_min) * ((1.0 - sigma_min) / (n_x - 1)) ** (cond_mass / sigma_min)
    return 1.0 - sigma_min * math.log(inner) / math.log(min_px)


def support_upper_bound(sigma_min: float, mu_max: float, py_target: float, min_cond: float,
                        max_px: float, vartheta: float) -> float:
    """Largest possible support of the target pair when NMI <= ``mu_max``.

    ``math.inf`` marks a vacuous bound.
    """
    _check_unit("py_target", py_target, closed_high=True)
    _check_unit("min_cond", min_cond)
    _check_unit("max_px", max_px)
    arg = math.log2(max_px ** (1.0 - mu_max) / min_cond ** (1.0 - sigma_min)) * _LN2 / py_target
    if arg < -_INV_E - _KNEE_TOL:
        return math.inf
    return py_target * math.exp(lambert_w0(arg)) + vartheta


def mu_max_for_support(sigma_max: float, sigma_min: float, py_target: float, min_cond: float,
                       max_px: float, vartheta: float) -> Optional[float]:
    """Largest NMI level keeping :func:`support_upper_bound` at or below ``sigma_max``.

    ``None`` means unbounded: the bound cannot be brought down to
    ``sigma_max`` on the principal branch.
    """
    _check_unit("py_target", py_target, closed_high=True)
    _check_unit("min_cond", min_cond)
    _check_unit("max_px", max_px)
    s = sigma_max - vartheta
    if s <= 0.0 or s / py_target < _INV_E:
        return None
    num = s * math.log(s / py_target) + (1.0 - sigma_min) * math.log(min_cond)
    return 1.0 - num / math.log(max_px)


@dataclass(frozen=True)
class MuThresholds:
    """NMI thresholds for one series pair.

    ``mu_max is None`` means no upper limit. Sources name the bound that
    set each value (``"support"``, ``"confidence"``, ``"upper-support"``
    or ``"none"`` when nothing could be certified).
    """

    mu_min: float
    mu_max: Optional[float]
    mu_min_source: str = "none"
    mu_max_source: str = "none"

    @property
    def prunable(self) -> bool:
        return self.mu_min > 0.0 or self.mu_max is not None

    def keeps(self, score: float) -> bool:
        if score < self.mu_min:
            return False
        return self.mu_max is None or score <= self.mu_max


UNPRUNABLE = MuThresholds(0.0, None)


def _oriented(stats: PairStats) -> PairStats:
    # bounds assume the target y symbol is at least as frequent as the target x symbol
    i = stats.alphabet_x.index(stats.target[0])
    j = stats.alphabet_y.index(stats.target[1])
    px_t = stats.joint[i, :].sum()
    py_t = stats.joint[:, j].sum()
    if py_t >= px_t:
        return stats
    flipped = stats_from_joint(stats.joint.T, j, i, series_x=stats.series_y, series_y=stats.series_x,
                               alphabet_x=stats.alphabet_y, alphabet_y=stats.alphabet_x)
    # the co-occurrence indicator is symmetric, so the windowed terms carry over
    return replace(flipped, vartheta=stats.vartheta, supp_seq=stats.supp_seq)


def _valid(mu: float) -> bool:
    return mu <= 1.0 and not math.isnan(mu)


def select_mu(cfg: MiningConfig, stats: PairStats) -> MuThresholds:
    """Thresholds for one target event pair.

    A derived level above 1 cannot be met by any pair and is treated as
    uninformative rather than as a reason to prune; negative levels clamp
    to 0. Degenerate parameters, including a side with a single observed
    symbol, fall back to no pruning.
    """
    if min(stats.joint.shape) < 2:
        # a single observed symbol has no entropy, so NMI says nothing
        return UNPRUNABLE
    st = _oriented(stats)
    sigma = cfg.sigma_min
    l1, l2, l3, l4, l5 = st.lambda_min_x, st.lambda_target_y, st.lambda_min_cond_mass, st.lambda_min_cond, st.lambda_max_x

    mu_min, source = 0.0, "none"
    if 0.0 < l1 < 1.0 and 0.0 < l2 <= 1.0:
        cands = []
        if sigma > 0.0:
            cands.append((mu_min_for_support(sigma, l1, l2), "support"))
        if 0.0 < sigma < 1.0 and l3 is not None and st.n_x >= 2 and cfg.delta > 0.0:
            cands.append((mu_min_for_confidence(cfg.delta, sigma, l1, l3, st.n_x), "confidence"))
        cands = [(m, s) for m, s in cands if _valid(m)]
        if cands:
            mu_min, source = max(cands)
            mu_min = max(mu_min, 0.0)

    mu_max, max_source = None, "none"
    if cfg.mode is Mode.RARE and cfg.sigma_max is not None:
        if l4 is not None and 0.0 < l4 < 1.0 and 0.0 < l5 < 1.0 and 0.0 < l2 <= 1.0:
            m = mu_max_for_support(cfg.sigma_max, sigma, l2, l4, l5, st.vartheta)
            if m is not None and m < 1.0:
                mu_max, max_source = max(m, 0.0), "upper-support"
    return MuThresholds(mu_min, mu_max, source, max_source)


def combine_thresholds(per_target: Iterable[MuThresholds]) -> MuThresholds:
    """Most permissive thresholds over all target pairs of one series pair."""
    items = list(per_target)
    if not items:
        return UNPRUNABLE
    low = min(items, key=lambda t: t.mu_min)
    if any(t.mu_max is None for t in items):
        high = MuThresholds(0.0, None)
    else:
        high = max(items, key=lambda t: t.mu_max)
    return MuThresholds(low.mu_min, high.mu_max, low.mu_min_source, high.mu_max_source)


# Conditions under which the bounds are claimed to hold. Random joints that
# violate them do produce counterexamples, so soundness is checked under them.

def support_lower_bound_applies(stats: PairStats) -> bool:
    """The target conditional ``p(x1 | y1)`` is at least ``1/e``."""
    return stats.lambda_target_y > 0 and stats.p_target / stats.lambda_target_y >= _INV_E


def confidence_bound_applies(stats: PairStats, sigma: float, px_target: Optional[float] = None) -> bool:
    """Support at ``sigma`` in both bases, ``p(y1) >= p(x1)`` and a small enough minimum conditional."""
    if not 0.0 < sigma < 1.0 or stats.n_x < 2 or stats.lambda_min_cond is None:
        return False
    if px_target is None:
        px_target = float(stats.px[stats.alphabet_x.index(stats.target[0])])
    return (stats.supp_seq >= sigma and stats.p_target >= sigma
            and stats.lambda_target_y >= px_target
            and stats.lambda_min_cond <= (1.0 - sigma) / (stats.n_x - 1))


def support_upper_bound_applies(stats: PairStats, sigma_min: float) -> bool:
    """Target support at ``sigma_min`` and the non-target conditional minimum attained off the target row and column."""
    if stats.lambda_min_cond is None or not 0.0 < stats.lambda_min_cond < 1.0 or not stats.lambda_max_x < 1.0:
        return False
    if stats.p_target < sigma_min:
        return False
    joint = stats.joint
    i = stats.alphabet_x.index(stats.target[0])
    j = stats.alphabet_y.index(stats.target[1])
    py = joint.sum(axis=0)
    mask = joint > 0
    mask[i, j] = False
    if not mask.any():
        return False
    cond = joint / np.where(py > 0, py, 1.0)
    return float(cond[mask].min()) >= stats.lambda_min_cond - 1e-15
