"""Ensemble weight spectral shape G(omega) and typical relative minimum distance.

For a protograph ensemble, the expected number of weight-(omega n) codewords
grows like 2^(n G(omega)). G is evaluated by splitting the codeword weight
over VN types, scoring each split with per-CN-type even-weight enumerator
exponents (a convex Legendre-type inner minimization) and per-VN-type entropy
corrections, and maximizing the split numerically with multistart ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import expit

from .core import BaseMatrix, validate_base_matrix

_LN2 = math.log(2.0)
_DELTA_CLIP = 1e-12


class GrowthRateError(RuntimeError):
    """Inner or outer optimization failed to converge for a growth-rate evaluation."""


def binary_entropy(x) -> np.ndarray:
    """h(x) in bits, with h(0) = h(1) = 0."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0) & (x < 1)
    xi = x[inner]
    out[inner] = -(xi * np.log2(xi) + (1 - xi) * np.log2(1 - xi))
    return out if out.ndim else float(out)


def random_code_growth_rate(omega: float, rate: float) -> float:
    """Spectral shape h(omega) - (1 - R) of the random linear code reference."""
    return float(binary_entropy(omega)) - (1.0 - rate)


def gilbert_varshamov_distance(rate: float) -> float:
    """Relative distance where the random-code spectral shape crosses zero."""
    return brentq(lambda w: random_code_growth_rate(w, rate), 1e-12, 0.5 - 1e-12,
                  xtol=1e-14)


class _CheckExponent:
    """Asymptotic exponent of one CN type's even-weight enumerator.

    For socket multiplicities b_j (one entry per participating VN type) the
    single-check enumerator is E(y) = [prod (1+y_j)^b_j + prod (1-y_j)^b_j]/2
    and the exponent is inf_y [log2 E(y) - sum_j b_j delta_j log2 y_j],
    a smooth convex problem in u = ln y.
    """

    def __init__(self, mults: np.ndarray):
        self.b = np.asarray(mults, dtype=float)

    def _log2e_and_grad(self, u: np.ndarray):
        u = np.asarray(u, dtype=float)
        pos = u > 0.0
        lp_terms = np.logaddexp(0.0, u)  # log(1 + e^u), overflow safe
        lp = float(self.b @ lp_terms)
        # log|1 - e^u| per socket group, -inf exactly at u == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            l1m = np.where(pos, u, 0.0) + np.log1p(-np.exp(-np.abs(u)))
        sign = -1.0 if np.count_nonzero(pos & (self.b % 2 == 1)) % 2 else 1.0
        finite = np.isfinite(l1m)
        if finite.all():
            s_fin = float(self.b @ l1m)
            ratio = s_fin - lp  # log |P-/P+| <= 0
            lm_excl = s_fin - l1m
        else:
            s_fin = float(self.b[finite] @ l1m[finite])
            inf_mult = float(self.b[~finite].sum())
            ratio = -math.inf
            residual_inf = inf_mult - np.where(finite, 0.0, 1.0)
            lm_excl = np.where(residual_inf > 0.0, -math.inf,
                               s_fin - np.where(finite, l1m, 0.0))
        r = sign * math.exp(min(ratio, 0.0)) if ratio > -math.inf else 0.0
        r = min(max(r, -1.0 + 1e-16), 1.0 - 1e-16)
        ln_e = math.log(0.5) + lp + math.log1p(r)

        # d lnE/du_j = b_j [sigmoid(u_j) - s_j exp(e_j)] / (1 + r) where e_j is
        # log of y_j |P-| / (|1 - y_j| P+), a quantity <= 1 by construction.
        with np.errstate(invalid="ignore"):
            e = u + lm_excl - lp
        term = np.where(np.isfinite(e), np.exp(np.minimum(e, 0.0)), 0.0)
        sign_excl = np.where(pos, -sign, sign)
        grad = self.b * (expit(u) - sign_excl * term) / (1.0 + r)
        return ln_e / _LN2, grad / _LN2

    # ln y is boxed: the lower end only matters for vanishing socket weights,
    # and above e^12 the two enumerator halves cancel beyond double precision
    # while no optimum with delta < 1 - 6e-6 can sit there.
    _U_LO = -60.0
    _U_HI = 12.0

    def exponent_and_point(self, deltas: np.ndarray, u_start=None):
        """(inf value in bits, minimizing ln y) for socket weights ``deltas``."""
        d = np.clip(deltas, _DELTA_CLIP, 1.0 - _DELTA_CLIP)
        c = self.b * d
        bounds = [(self._U_LO, self._U_HI)] * self.b.size

        def fun(u):
            v, g = self._log2e_and_grad(u)
            return v - float(np.dot(c, u)) / _LN2, g - c / _LN2

        def solve(u0):
            return minimize(fun, np.clip(u0, self._U_LO, self._U_HI), jac=True,
                            method="L-BFGS-B", bounds=bounds,
                            options={"gtol": 1e-9, "ftol": 1e-15, "maxiter": 200})

        default_u0 = np.minimum(np.log(d / (1.0 - d)), self._U_HI)
        res = solve(default_u0 if u_start is None else u_start)
        if u_start is not None and (not res.success or not np.isfinite(res.fun)):
            fresh = solve(default_u0)
            if np.isfinite(fresh.fun) and (not np.isfinite(res.fun)
                                           or fresh.fun < res.fun):
                res = fresh
        if not np.isfinite(res.fun) or not np.all(np.isfinite(res.x)):
            raise GrowthRateError(f"inner minimization diverged: {res.message}")
        return float(res.fun), res.x


def _prepare(base: BaseMatrix):
    # Structural validity is all the enumerators need; rate-degenerate test
    # ensembles (e.g. a single length-2 cycle type) are legitimate here.
    if np.any(base.entries.sum(axis=0) == 0) or np.any(base.entries.sum(axis=1) == 0):
        raise ValueError("base matrix has an empty row or column")
    checks = []
    for i in range(base.m0):
        cols = np.nonzero(base.entries[i])[0]
        checks.append((cols, _CheckExponent(base.entries[i, cols])))
    transmitted = np.array([j for j in range(base.n0) if j not in base.punctured])
    col_deg = base.column_sums().astype(float)
    return checks, transmitted, col_deg


@dataclass
class GrowthRatePoint:
    omega: float
    value: float
    allocation: np.ndarray


def _maximize_split(base, omega, starts, checks, transmitted, col_deg):
    n_t = transmitted.size
    target = omega * n_t

    warm_u: dict[int, np.ndarray] = {}

    def neg_objective(deltas):
        d = np.clip(deltas, _DELTA_CLIP, 1.0 - _DELTA_CLIP)
        val = float(np.dot(1.0 - col_deg, binary_entropy(d)))
        grad = (1.0 - col_deg) * np.log2((1.0 - d) / d)
        for i, (cols, chk) in enumerate(checks):
            a, u_star = chk.exponent_and_point(d[cols], warm_u.get(i))
            warm_u[i] = u_star
            val += a
            grad[cols] -= base.entries[i, cols] * u_star / _LN2
        return -val, -grad

    constraints = [{
        "type": "eq",
        "fun": lambda d: d[transmitted].sum() - target,
        "jac": lambda d: np.isin(np.arange(base.n0), transmitted).astype(float),
    }]
    bounds = [(0.0, 1.0)] * base.n0
    best = None
    for x0 in starts:
        x0 = np.clip(x0, 0.0, 1.0)
        res = minimize(neg_objective, x0, jac=True, method="SLSQP",
                       bounds=bounds, constraints=constraints,
                       options={"maxiter": 150, "ftol": 1e-12})
        if not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise GrowthRateError(f"all starts failed at omega = {omega}")
    return -best.fun, best.x


def _default_starts(base, omega, transmitted, n_random, seed):
    n_t = transmitted.size
    target = omega * n_t
    uniform = np.full(base.n0, min(omega, 1.0))
    starts = [uniform]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        alloc = rng.dirichlet(np.ones(n_t)) * target
        x0 = np.full(base.n0, min(omega, 1.0))
        x0[transmitted] = np.minimum(alloc, 1.0)
        starts.append(x0)
    return starts


def growth_rate(base: BaseMatrix, omega: float, n_random_starts: int = 6,
                seed: int = 12345, warm_start: Optional[np.ndarray] = None) -> float:
    """Ensemble-average spectral growth rate at relative weight ``omega``.

    Weight is normalized per transmitted bit; punctured types carry free
    (state) weight that does not enter the normalization.
    """
    return growth_rate_point(base, omega, n_random_starts, seed, warm_start).value


def growth_rate_point(base: BaseMatrix, omega: float, n_random_starts: int = 6,
                      seed: int = 12345,
                      warm_start: Optional[np.ndarray] = None) -> GrowthRatePoint:
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    checks, transmitted, col_deg = _prepare(base)
    starts = _default_starts(base, omega, transmitted, n_random_starts, seed)
    if warm_start is not None:
        scaled = np.asarray(warm_start, dtype=float).copy()
        have = scaled[transmitted].sum()
        if have > 0:
            scaled[transmitted] *= omega * transmitted.size / have
            starts.insert(0, scaled)
    val, alloc = _maximize_split(base, omega, starts, checks, transmitted, col_deg)
    return GrowthRatePoint(omega, val / transmitted.size, alloc)


@dataclass
class SpectralShape:
    samples: list  # (omega, G) pairs, omega strictly increasing
    omega_star: Optional[float]


def spectral_shape(base: BaseMatrix, omega_max: float = 0.5, n_log: int = 30,
                   n_lin: int = 25, n_random_starts: int = 4) -> SpectralShape:
    """Sample G on a grid that is logarithmic near 0 (where the typical distance
    lives) and linear up to ``omega_max``, with warm starts chained along the grid."""
    grid = np.unique(np.concatenate([
        np.logspace(-4, math.log10(0.02), n_log),
        np.linspace(0.02, omega_max, n_lin),
    ]))
    samples = []
    warm = None
    for w in grid:
        starts = n_random_starts if warm is None else 2
        pt = growth_rate_point(base, float(w), starts, warm_start=warm)
        warm = pt.allocation
        samples.append((float(w), pt.value))
    return SpectralShape(samples, typical_min_distance(base))


def typical_min_distance(base: BaseMatrix, omega_lo: float = 1e-4,
                         omega_hi: float = 0.45,
                         n_random_starts: int = 6) -> Optional[float]:
    """Smallest positive root of G, provided G < 0 on the left of it.

    Returns None when G is already nonnegative in a right-neighborhood of 0
    (no typical minimum distance, e.g. with degree-1 VN types).
    """
    grid = np.logspace(math.log10(omega_lo), math.log10(omega_hi), 28)
    warm = None
    prev = None
    for w in grid:
        starts = n_random_starts if warm is None else 2
        pt = growth_rate_point(base, float(w), starts, warm_start=warm)
        warm = pt.allocation
        g = pt.value
        if prev is None:
            if g >= 0.0:
                return None
        elif prev[1] < 0.0 <= g:
            lo, hi = prev[0], float(w)
            root = brentq(lambda x: growth_rate(base, x, 2, warm_start=warm),
                          lo, hi, xtol=1e-9, rtol=8.9e-16)
            val = growth_rate(base, root, 2, warm_start=warm)
            if abs(val) > 1e-7:
                raise GrowthRateError(
                    f"root refinement left |G({root})| = {abs(val)} > 1e-7")
            return float(root)
        prev = (float(w), g)
    return None


def export_shape_csv(shape: SpectralShape, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("omega,growth_rate\n")
        for w, g in shape.samples:
            fh.write(f"{w!r},{g!r}\n")
        if shape.omega_star is not None:
            fh.write(f"# omega_star,{shape.omega_star!r}\n")
