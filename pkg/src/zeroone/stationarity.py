"""Certification of first-order optimality for the zero-one hinge-loss SVM.

Two certificates are offered for a quadruple ``(c, b, u, lam)``:

* a KKT check: stationarity, dual balance, feasibility, and membership of
  ``-lam/C`` in the subdifferential of the zero-one hinge loss at ``u``;
* a prox-stationarity check: the same three residuals plus the fixed-point
  identity ``prox(u - gamma*lam) == u`` for a given step ``gamma``.

A KKT point admits a step size making it prox-stationary and vice versa;
:func:`construct_gamma` builds that step constructively and
:func:`equivalence_roundtrip` exercises the equivalence in both directions.

Residual scaling: each condition is reported in the same normalization the
solver's stopping rule uses (see :func:`zeroone.admm.betas`):
``||c + diag(y) lam|| / (1 + ||c|| + ||lam||)`` for stationarity,
``|<y, lam>| / m``, ``||u + diag(y) K c + b y - 1|| / sqrt(m)`` and
``||u - prox(u - gamma*lam)|| / (1 + ||u||)``.  The stationarity residual
uses the kernel-free strong form; it vanishing implies the kernel-weighted
form does too, so certification is conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .prox import ProxParams, prox_l01

# Shrink factors keeping the constructed step strictly inside the region
# where the single-valued prox reproduces the point.  The positive-slack
# branch needs a real margin (the exact value puts a kept coordinate on the
# zeroing threshold); the multiplier branch only needs to absorb float
# rounding of the threshold comparison.
_POS_BRANCH_SHRINK = 1.0 - 1e-6
_MULT_BRANCH_SHRINK = 1.0 - 1e-9


@dataclass(frozen=True)
class StationarityReport:
    """Per-condition residuals and the verdicts of one certification call.

    ``is_kkt`` / ``is_prox_stationary`` is ``None`` when the corresponding
    check was not evaluated; the one that was is true iff every evaluated
    block is within ``tol``.
    """

    is_kkt: Optional[bool]
    is_prox_stationary: Optional[bool]
    gamma_used: Optional[float]
    res_stationary: float
    res_dual_balance: float
    res_feasibility: float
    res_prox: Optional[float]
    subdiff_ok: Optional[bool]
    tol: float

    def to_dict(self) -> dict:
        return {
            "is_kkt": self.is_kkt,
            "is_prox_stationary": self.is_prox_stationary,
            "gamma_used": self.gamma_used,
            "res_stationary": self.res_stationary,
            "res_dual_balance": self.res_dual_balance,
            "res_feasibility": self.res_feasibility,
            "res_prox": self.res_prox,
            "subdiff_ok": self.subdiff_ok,
            "tol": self.tol,
        }


def subdiff_l01_contains(u, v, tol: float = 1e-9) -> bool:
    """Membership of ``v`` in the limiting subdifferential of
    ``count(u_i > 0)`` at ``u``.

    True iff every coordinate satisfies ``u_i == 0 and v_i >= 0`` or
    ``u_i != 0 and v_i == 0``, with equalities tested within ``tol``.
    The set is a cone on the zero coordinates, so membership of ``-lam/C``
    does not depend on the loss weight ``C``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise InputError(f"shape mismatch: {u.shape} vs {v.shape}")
    zero = np.abs(u) <= tol
    if not np.all(v[zero] >= -tol):
        return False
    return bool(np.all(np.abs(v[~zero]) <= tol))


def _scaled_residuals(c, b, u, lam, K, y) -> tuple[float, float, float]:
    m = len(y)
    r_stat = float(np.linalg.norm(c + y * lam)) / (
        1.0 + float(np.linalg.norm(c)) + float(np.linalg.norm(lam))
    )
    r_dual = abs(float(y @ lam)) / m
    r_feas = float(np.linalg.norm(u + y * (K @ c) + b * y - 1.0)) / math.sqrt(m)
    return r_stat, r_dual, r_feas


def check_kkt(c, b, u, lam, K, y, C, tol: float = 1e-8) -> StationarityReport:
    """KKT certificate at tolerance ``tol``.

    The subdifferential condition is evaluated through the multiplier sign
    pattern it is equivalent to: ``lam_i <= tol`` wherever ``|u_i| <= tol``
    and ``|lam_i| <= tol`` elsewhere (the inclusion of ``-lam/C`` is
    invariant to ``C``, see :func:`subdiff_l01_contains`).
    """
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    r_stat, r_dual, r_feas = _scaled_residuals(c, b, u, lam, K, y)
    zero = np.abs(u) <= tol
    subdiff_ok = bool(np.all(lam[zero] <= tol) and np.all(np.abs(lam[~zero]) <= tol))
    ok = r_stat <= tol and r_dual <= tol and r_feas <= tol and subdiff_ok
    return StationarityReport(
        is_kkt=ok, is_prox_stationary=None, gamma_used=None,
        res_stationary=r_stat, res_dual_balance=r_dual, res_feasibility=r_feas,
        res_prox=None, subdiff_ok=subdiff_ok, tol=tol,
    )


def construct_gamma(u, lam, C, tol: float = 1e-9) -> float:
    """Build a prox step size certifying a multiplier with a valid KKT sign
    pattern.

    With ``P = {i : u_i > 0}`` and ``Z = {i : u_i == 0}`` (classified
    within ``tol``), the step is the minimum of ``2C / max_Z(lam_i^2)``
    (present when some multiplier on ``Z`` is negative) and
    ``min_P(u_i^2) / (2C)``, each shrunk slightly so the single-valued
    prox keeps every positive slack and zeroes every multiplier image
    strictly inside its threshold; 1.0 when neither set constrains.

    Raises
    ------
    InputError
        If ``(u, lam)`` violates the KKT sign pattern (nonzero multiplier
        on a nonzero slack, or a positive multiplier beyond ``tol``).
    """
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if u.shape != lam.shape:
        raise InputError(f"shape mismatch: {u.shape} vs {lam.shape}")
    if C <= 0:
        raise InputError("C must be > 0")
    zero = np.abs(u) <= tol
    if not (np.all(lam[zero] <= tol) and np.all(np.abs(lam[~zero]) <= tol)):
        raise InputError("(u, lam) violates the KKT multiplier sign pattern")
    positive = u > tol
    neg_mult = zero & (lam < -tol)
    candidates = []
    if np.any(neg_mult):
        candidates.append(
            _MULT_BRANCH_SHRINK * 2.0 * C / float(np.max(lam[zero] ** 2))
        )
    if np.any(positive):
        candidates.append(
            _POS_BRANCH_SHRINK * float(np.min(u[positive] ** 2)) / (2.0 * C)
        )
    return min(candidates) if candidates else 1.0


def check_prox_stationary(c, b, u, lam, K, y, C, gamma,
                          tol: float = 1e-8) -> StationarityReport:
    """Prox-stationarity certificate at step ``gamma`` and tolerance ``tol``.

    Evaluates the stationarity, dual-balance and feasibility residuals plus
    the fixed-point gap ``||u - prox(u - gamma*lam)|| / (1 + ||u||)``; all
    four within ``tol`` certifies the point.
    """
    if not gamma > 0:
        raise InputError("gamma must be > 0")
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    r_stat, r_dual, r_feas = _scaled_residuals(c, b, u, lam, K, y)
    p = ProxParams(gamma=float(gamma), C=float(C))
    r_prox = float(np.linalg.norm(u - prox_l01(u - gamma * lam, p))) / (
        1.0 + float(np.linalg.norm(u))
    )
    ok = r_stat <= tol and r_dual <= tol and r_feas <= tol and r_prox <= tol
    return StationarityReport(
        is_kkt=None, is_prox_stationary=ok, gamma_used=float(gamma),
        res_stationary=r_stat, res_dual_balance=r_dual, res_feasibility=r_feas,
        res_prox=r_prox, subdiff_ok=None, tol=tol,
    )


def equivalence_roundtrip(c, b, u, lam, K, y, C, tol: float = 1e-8) -> bool:
    """True when the KKT verdict agrees with prox-stationarity under the
    constructed step size.

    A sign-pattern violation inside :func:`construct_gamma` counts as a
    failed prox witness rather than an error, so a quadruple failing both
    checks agrees vacuously.
    """
    kkt = check_kkt(c, b, u, lam, K, y, C, tol=tol).is_kkt
    try:
        gamma = construct_gamma(u, lam, C, tol=tol)
    except InputError:
        prox_ok = False
    else:
        prox_ok = check_prox_stationary(
            c, b, u, lam, K, y, C, gamma, tol=tol
        ).is_prox_stationary
    return bool(kkt) == bool(prox_ok)
