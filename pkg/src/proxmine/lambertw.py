"""Real branches of the Lambert W function via Halley iteration.

``lambert_w("principal", x)`` solves w*e^w = x for x >= -1/e on the branch
with w >= -1; ``lambert_w("lower", x)`` solves it for -1/e <= x < 0 on the
branch with w <= -1.  Residuals satisfy |w e^w - x| <= 1e-12 * max(1, |x|).

``lw_lower_logarg`` evaluates the lower branch at x = -e^y directly from
``y = log(-x)``, staying accurate when x would underflow to zero.
"""

from __future__ import annotations

import numpy as np

BRANCH_POINT = -1.0 / np.e

_RESID_TOL = 1e-13
_MAX_ITER = 64


def _halley(w: np.ndarray, x: np.ndarray, active: np.ndarray, lo: float, hi: float) -> None:
    """Polish roots of w*e^w = x in place, keeping iterates in [lo, hi]."""
    for _ in range(_MAX_ITER):
        if not active.any():
            return
        wa, xa = w[active], x[active]
        ew = np.exp(wa)
        f = wa * ew - xa
        wp1 = wa + 1.0
        wp1 = np.where(np.abs(wp1) < 1e-300, 1e-300, wp1)
        denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
        denom = np.where(denom == 0.0, 1.0, denom)
        w2 = np.clip(wa - f / denom, lo, hi)
        w[active] = w2
        resid = np.abs(w2 * np.exp(w2) - xa)
        conv = resid <= _RESID_TOL * np.maximum(1.0, np.abs(xa))
        idx = np.flatnonzero(active)
        active[idx[conv]] = False


def _initial_principal(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    near = x < -0.2
    # Series around the branch point: w = -1 + p - p^2/3, p = sqrt(2(e x + 1)).
    p = np.sqrt(np.maximum(2.0 * (np.e * x[near] + 1.0), 0.0))
    w[near] = -1.0 + p - p * p / 3.0
    mid = (~near) & (x < np.e)
    xm = x[mid]
    w[mid] = xm * (1.0 - xm + 1.5 * xm * xm) / (1.0 + 0.5 * np.abs(xm))
    far = x >= np.e
    lx = np.log(x[far])
    llx = np.log(lx)
    w[far] = lx - llx + llx / lx
    return w


def _initial_lower(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    near = x < -0.27
    p = np.sqrt(np.maximum(2.0 * (np.e * x[near] + 1.0), 0.0))
    w[near] = -1.0 - p - p * p / 3.0
    far = ~near
    l1 = np.log(-x[far])
    l2 = np.log(-l1)
    w[far] = l1 - l2 + l2 / l1
    return w


def lambert_w(branch: str, x):
    """Evaluate a real branch of the Lambert W function.

    ``branch`` is ``"principal"`` (domain x >= -1/e) or ``"lower"``
    (domain -1/e <= x < 0).  Scalar input returns a float; array input
    returns an array.  Raises ValueError outside the branch domain.
    """
    scalar = np.isscalar(x)
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64)).copy()
    if branch == "principal":
        if (xv < BRANCH_POINT).any():
            raise ValueError("principal branch requires x >= -1/e")
        w = _initial_principal(xv)
        lo, hi = -1.0, np.inf
    elif branch == "lower":
        if ((xv < BRANCH_POINT) | (xv >= 0.0)).any():
            raise ValueError("lower branch requires -1/e <= x < 0")
        w = _initial_lower(xv)
        lo, hi = -np.inf, -1.0
    else:
        raise ValueError(f"branch must be 'principal' or 'lower', got {branch!r}")

    exact = xv <= BRANCH_POINT
    w[exact] = -1.0
    if branch == "principal":
        at_zero = xv == 0.0
        w[at_zero] = 0.0
        exact |= at_zero
    else:
        # Underflowed arguments: the branch diverges to -inf as x -> 0-.
        tiny = xv == 0.0
        w[tiny] = -np.inf
        exact |= tiny

    _halley(w, xv, ~exact, lo, hi)
    return float(w[0]) if scalar else w


def lw_lower_logarg(y):
    """Lower-branch W at x = -e^y, given y = log(-x) <= -1.

    Solves w + log(-w) = y by Newton iteration entirely in log space, so
    arguments far below the underflow threshold of ``exp`` stay exact.
    """
    scalar = np.isscalar(y)
    yv = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if (yv > -1.0).any():
        raise ValueError("lw_lower_logarg requires y <= -1")
    w = np.empty_like(yv)
    near = yv > -2.0
    # Close to the branch point use the series in p = sqrt(-2 expm1(y+1)).
    p = np.sqrt(np.maximum(-2.0 * np.expm1(np.minimum(yv[near] + 1.0, 0.0)), 0.0))
    w[near] = -1.0 - p - p * p / 3.0
    yf = yv[~near]
    w[~near] = yf - np.log(-yf)
    active = np.abs(w + np.log(-w) - yv) > 1e-14 * np.maximum(1.0, np.abs(yv))
    for _ in range(_MAX_ITER):
        if not active.any():
            break
        wa, ya = w[active], yv[active]
        f = wa + np.log(-wa) - ya
        # h'(w) = (w+1)/w vanishes at the branch point; the series above
        # already leaves near-branch entries converged.
        denom = wa + 1.0
        denom = np.where(np.abs(denom) < 1e-12, -1e-12, denom)
        w2 = np.minimum(wa - f * wa / denom, -1.0)
        w[active] = w2
        conv = np.abs(w2 + np.log(-w2) - ya) <= 1e-14 * np.maximum(1.0, np.abs(ya))
        idx = np.flatnonzero(active)
        active[idx[conv]] = False
    return float(w[0]) if scalar else w
