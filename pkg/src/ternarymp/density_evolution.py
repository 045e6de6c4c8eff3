"""Exact density evolution for ternary message passing decoding.

Messages live on {-1, 0, +1}; a density is the (erasure, error) probability
pair of a message population. The recursions here track those pairs exactly,
for unstructured ensembles (scalar densities mixed over degree distributions)
and protograph ensembles (one density per nonzero base-matrix entry, with the
incoming-LLR sum enumerated on an exact lattice). Binary message passing is
the deadzone = 0 special case of every function in this module.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.special import erfc

from .core import BaseMatrix, DegreeDistribution, design_rate, validate_base_matrix
from .channel import channel_from_ebn0
from .decoders import WeightSchedule

DEFAULT_WEIGHT_CAP = 25.0
_LATTICE_DECIMALS = 9
_BOUNDARY_TOL = 1e-12


class TernaryDensity(NamedTuple):
    """(erasure, error) probability pair of one ternary message population."""

    erasure: float
    error: float

    def total(self) -> float:
        return self.erasure + self.error

    def validate(self) -> "TernaryDensity":
        if self.erasure < 0 or self.error < 0 or self.erasure + self.error > 1 + 1e-12:
            raise ValueError(f"invalid ternary density {self}")
        return self


@dataclass
class EdgeTypeDensities:
    """One TernaryDensity per nonzero base-matrix entry, stored as dense arrays.

    Entries at zero base positions are kept at 0 and carry no meaning.
    """

    erasure: np.ndarray
    error: np.ndarray

    @classmethod
    def uniform(cls, base: BaseMatrix, density: TernaryDensity) -> "EdgeTypeDensities":
        mask = base.entries > 0
        return cls(np.where(mask, density.erasure, 0.0), np.where(mask, density.error, 0.0))

    def at(self, i: int, j: int) -> TernaryDensity:
        return TernaryDensity(float(self.erasure[i, j]), float(self.error[i, j]))

    def max_total(self, base: BaseMatrix) -> float:
        mask = base.entries > 0
        return float((self.erasure + self.error)[mask].max())

    def aggregate(self, base: BaseMatrix) -> TernaryDensity:
        """Edge-count weighted average density over all types."""
        wts = base.entries / base.entries.sum()
        return TernaryDensity(float((self.erasure * wts).sum()), float((self.error * wts).sum()))

    def copy(self) -> "EdgeTypeDensities":
        return EdgeTypeDensities(self.erasure.copy(), self.error.copy())


@dataclass
class LlrLattice:
    """Exact discrete distribution of a weighted incoming-message sum."""

    values: np.ndarray
    probabilities: np.ndarray

    def validate(self, tol: float = 1e-9) -> "LlrLattice":
        if np.any(self.probabilities < -tol):
            raise ValueError("negative lattice probability")
        if abs(self.probabilities.sum() - 1.0) > tol:
            raise ValueError(f"lattice mass {self.probabilities.sum()} != 1")
        if np.any(np.diff(self.values) <= 0):
            raise ValueError("lattice values not strictly increasing")
        return self


@dataclass
class DEReport:
    converged: bool
    iterations: int
    trajectory: list
    weights: WeightSchedule
    final_p_app: Optional[np.ndarray] = None
    clip_events: int = 0
    msg_converged_at: Optional[int] = None
    app_converged_at: Optional[int] = None


def q_function(x):
    """Upper-tail probability of the standard normal, via the complementary error function."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def de_init(llr_mean: float, llr_std: float, deadzone: float) -> TernaryDensity:
    """Iteration-0 density of quantized channel LLRs (mean llr_mean, std llr_std)."""
    if deadzone < 0:
        raise ValueError("deadzone must be >= 0")
    if llr_std <= 0:
        raise ValueError("llr_std must be positive")
    hi = float(q_function((deadzone + llr_mean) / llr_std))
    lo = float(q_function((-deadzone + llr_mean) / llr_std))
    return TernaryDensity(lo - hi, hi)


def alpha_beta(deadzone: float, llr_mean: float, llr_std: float) -> tuple[float, float]:
    """Channel summary for the stability condition: (Pr{|L| <= deadzone}, Pr{L < -deadzone})."""
    d = de_init(llr_mean, llr_std, deadzone)
    return d.erasure, d.error


def reliability_weight(q: TernaryDensity, cap: float = DEFAULT_WEIGHT_CAP) -> tuple[float, bool]:
    """ln((1 - q0 - q-1) / q-1) capped at ``cap``; returns (weight, was_clipped).

    The raw expression diverges as the error probability vanishes; the cap
    keeps downstream lattices finite. Clipping triggers exactly when
    q-1 <= exp(-cap) * (1 - q0 - q-1), which also covers q-1 == 0.
    """
    good = 1.0 - q.erasure - q.error
    if q.error <= math.exp(-cap) * good:
        return cap, True
    return math.log(good / q.error), False


def cn_update_unstructured(p: TernaryDensity, dd: DegreeDistribution) -> TernaryDensity:
    """Check-side density update averaged over the CN degree distribution."""
    keep = dd.rho_at(1.0 - p.erasure)
    flip = dd.rho_at(1.0 - 2.0 * p.error - p.erasure)
    q0 = 1.0 - keep
    qm1 = 0.5 * (keep - flip)
    return TernaryDensity(min(max(q0, 0.0), 1.0), min(max(qm1, 0.0), 1.0))


@lru_cache(maxsize=None)
def _trinomial_table(k: int):
    """All (u, v) splits of k incoming messages with their multinomial coefficients."""
    us, vs, coefs = [], [], []
    for u in range(k + 1):
        for v in range(k + 1 - u):
            us.append(u)
            vs.append(v)
            coefs.append(math.comb(k, u) * math.comb(k - u, v))
    return np.array(us), np.array(vs), np.array(coefs, dtype=float)


def _sum_pmf(k: int, q: TernaryDensity) -> np.ndarray:
    """PMF of the sum of k iid ternary messages with density q, over m = -k..k."""
    if k == 0:
        return np.ones(1)
    u, v, coef = _trinomial_table(k)
    good = 1.0 - q.erasure - q.error
    probs = coef * good ** u * q.error ** v * q.erasure ** (k - u - v)
    return np.bincount(u - v + k, weights=probs, minlength=2 * k + 1)


def incoming_sum_pmf(q: TernaryDensity, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of the sum of ``degree - 1`` incoming CN messages.

    Returns (values m, probabilities) with m running over -(d-1)..(d-1).
    """
    k = degree - 1
    return np.arange(-k, k + 1), _sum_pmf(k, q)


def _mix_gaussian_tails(z, probs, llr_mean, llr_std, deadzone):
    """(p_erasure, p_error) of quantize(L_ch + z) mixed over a discrete z."""
    hi = q_function((deadzone + z + llr_mean) / llr_std)
    lo = q_function((-deadzone + z + llr_mean) / llr_std)
    p0 = float(np.dot(probs, lo - hi))
    pm1 = float(np.dot(probs, hi))
    return p0, pm1


def _lattice_tail_probs(z, probs, deadzone):
    """(p_erasure, p_error) of quantize(z) for a punctured VN (no channel term)."""
    tol = _BOUNDARY_TOL * max(1.0, deadzone)
    inside = (z >= -deadzone - tol) & (z <= deadzone + tol)
    below = z < -deadzone - tol
    return float(probs[inside].sum()), float(probs[below].sum())


def vn_update_unstructured(
    q: TernaryDensity,
    dd: DegreeDistribution,
    llr_mean: float,
    llr_std: float,
    deadzone: float,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> TernaryDensity:
    """Variable-side density update mixed over the VN degree distribution."""
    weight, _ = reliability_weight(q, weight_cap)
    p0 = 0.0
    pm1 = 0.0
    for d, frac in dd.lambda_coeffs:
        m, pmf = incoming_sum_pmf(q, d)
        a0, a1 = _mix_gaussian_tails(weight * m, pmf, llr_mean, llr_std, deadzone)
        p0 += frac * a0
        pm1 += frac * a1
    return TernaryDensity(min(max(p0, 0.0), 1.0), min(max(pm1, 0.0), 1.0))


def de_run_unstructured(
    dd: DegreeDistribution,
    ebn0_db: float,
    deadzone: float,
    l_max: int = 200,
    eps_target: float = 1e-10,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
    record: bool = True,
) -> DEReport:
    """Run unstructured DE; converged means erasure + error falls below eps_target."""
    rate = unstructured_design_rate(dd)
    ch = channel_from_ebn0(ebn0_db, rate)
    p = de_init(ch.llr_mean, ch.llr_std, deadzone)
    trajectory = []
    weight_rows = []
    clip_events = 0
    converged_at = None
    iterations = 0
    prev_total = p.total()
    for it in range(1, l_max + 1):
        q = cn_update_unstructured(p, dd)
        weight, clipped = reliability_weight(q, weight_cap)
        clip_events += int(clipped)
        p = vn_update_unstructured(q, dd, ch.llr_mean, ch.llr_std, deadzone, weight_cap)
        iterations = it
        weight_rows.append(weight)
        if record:
            trajectory.append({"p": p, "q": q, "weight": weight})
        total = p.total()
        if total < eps_target:
            converged_at = it
            break
        if abs(total - prev_total) < 1e-17:
            break  # numerical fixed point above target: no progress possible
        prev_total = total
    values = np.array(weight_rows, dtype=float).reshape(-1, 1, 1)
    schedule = WeightSchedule(values, base=None)
    return DEReport(
        converged=converged_at is not None,
        iterations=iterations,
        trajectory=trajectory,
        weights=schedule,
        clip_events=clip_events,
        msg_converged_at=converged_at,
    )


def unstructured_design_rate(dd: DegreeDistribution) -> float:
    """1 - (sum rho_i / i) / (sum lambda_j / j), the unstructured ensemble rate."""
    inv_c = sum(f / d for d, f in dd.rho_coeffs)
    inv_v = sum(f / d for d, f in dd.lambda_coeffs)
    return 1.0 - inv_c / inv_v


# ---------------------------------------------------------------------------
# protograph ensembles


@lru_cache(maxsize=32)
def _proto_tables(entries_bytes: bytes, m0: int, n0: int):
    """Per-column enumeration tables for the incoming-sum lattice of a base matrix."""
    entries = np.frombuffer(entries_bytes, dtype=np.int64).reshape(m0, n0)
    columns = []
    for j in range(n0):
        rows = [i for i in range(m0) if entries[i, j] > 0]
        full = {i: int(entries[i, j]) for i in rows}
        columns.append({"rows": rows, "mult": full})
    return columns


def _column_info(base: BaseMatrix):
    return _proto_tables(base.entries.tobytes(), base.m0, base.n0)


def _combine_lattice(parts) -> tuple[np.ndarray, np.ndarray]:
    """Join per-row sum PMFs into the lattice of the weighted total.

    ``parts`` is a list of (weight, pmf) with pmf over m = -k..k. Values are
    merged when they coincide within 1e-9 (weights are generic reals, so
    collisions are coincidental, but merging bounds lattice growth).
    """
    z = np.zeros(1)
    pr = np.ones(1)
    for weight, pmf in parts:
        k = (pmf.size - 1) // 2
        mvals = weight * np.arange(-k, k + 1)
        z = (z[:, None] + mvals[None, :]).ravel()
        pr = (pr[:, None] * pmf[None, :]).ravel()
    zr = np.round(z, _LATTICE_DECIMALS)
    values, inverse = np.unique(zr, return_inverse=True)
    probs = np.bincount(inverse, weights=pr)
    return values, probs


def _edge_weights(q: EdgeTypeDensities, base: BaseMatrix, weight_cap: float):
    """Per-type reliability weights with clip accounting. Zero where the base is zero."""
    weights = np.zeros((base.m0, base.n0))
    clips = 0
    for i, j in base.nonzero_pairs():
        w, clipped = reliability_weight(q.at(i, j), weight_cap)
        weights[i, j] = w
        clips += int(clipped)
    return weights, clips


def incoming_llr_lattice(
    q: EdgeTypeDensities,
    base: BaseMatrix,
    column: int,
    exclude_row: Optional[int] = None,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> LlrLattice:
    """Exact lattice of the weighted CN-message sum entering one VN type.

    ``exclude_row`` drops one edge toward that CN type (the extrinsic case);
    None keeps the full neighborhood (the a-posteriori case).
    """
    info = _column_info(base)[column]
    parts = []
    for s in info["rows"]:
        mult = info["mult"][s] - (1 if s == exclude_row else 0)
        w, _ = reliability_weight(q.at(s, column), weight_cap)
        parts.append((w, _sum_pmf(mult, q.at(s, column))))
    values, probs = _combine_lattice(parts)
    return LlrLattice(values, probs)


def proto_cn_update(p: EdgeTypeDensities, base: BaseMatrix) -> EdgeTypeDensities:
    """Check-side update per edge type with extrinsic exponents."""
    ent = base.entries
    q0 = np.zeros_like(p.erasure)
    qm1 = np.zeros_like(p.error)
    for i in range(base.m0):
        nz = np.nonzero(ent[i])[0]
        keep_f = 1.0 - p.erasure[i, nz]
        flip_f = 1.0 - 2.0 * p.error[i, nz] - p.erasure[i, nz]
        mult = ent[i, nz]
        for j in nz:
            exps = mult - (nz == j)
            keep = float(np.prod(keep_f ** exps))
            flip = float(np.prod(flip_f ** exps))
            q0[i, j] = min(max(1.0 - keep, 0.0), 1.0)
            qm1[i, j] = min(max(0.5 * (keep - flip), 0.0), 1.0)
    return EdgeTypeDensities(q0, qm1)


def proto_vn_update(
    q: EdgeTypeDensities,
    base: BaseMatrix,
    llr_mean: float,
    llr_std: float,
    deadzone: float,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> EdgeTypeDensities:
    """Variable-side update per edge type via the exact incoming-LLR lattice.

    Punctured columns have no channel contribution: their outgoing density is
    the quantizer applied to the lattice alone.
    """
    p0 = np.zeros_like(q.erasure)
    pm1 = np.zeros_like(q.error)
    info = _column_info(base)
    for j in range(base.n0):
        rows = info[j]["rows"]
        pmf_full = {}
        w_col = {}
        for s in rows:
            w_col[s], _ = reliability_weight(q.at(s, j), weight_cap)
            pmf_full[s] = _sum_pmf(info[j]["mult"][s], q.at(s, j))
        punct = j in base.punctured
        for i in rows:
            parts = []
            for s in rows:
                if s == i:
                    parts.append((w_col[s], _sum_pmf(info[j]["mult"][s] - 1, q.at(s, j))))
                else:
                    parts.append((w_col[s], pmf_full[s]))
            z, pr = _combine_lattice(parts)
            if punct:
                a0, a1 = _lattice_tail_probs(z, pr, deadzone)
            else:
                a0, a1 = _mix_gaussian_tails(z, pr, llr_mean, llr_std, deadzone)
            p0[i, j] = min(max(a0, 0.0), 1.0)
            pm1[i, j] = min(max(a1, 0.0), 1.0)
    return EdgeTypeDensities(p0, pm1)


def proto_app_update(
    q: EdgeTypeDensities,
    base: BaseMatrix,
    llr_mean: float,
    llr_std: float,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> np.ndarray:
    """Per-VN-type error probability of the hard decision (full neighborhood)."""
    info = _column_info(base)
    p_app = np.zeros(base.n0)
    for j in range(base.n0):
        parts = []
        for s in info[j]["rows"]:
            w, _ = reliability_weight(q.at(s, j), weight_cap)
            parts.append((w, _sum_pmf(info[j]["mult"][s], q.at(s, j))))
        z, pr = _combine_lattice(parts)
        if j in base.punctured:
            p_app[j] = float(pr[z <= _BOUNDARY_TOL].sum())
        else:
            p_app[j] = float(np.dot(pr, q_function((z + llr_mean) / llr_std)))
    return p_app


def de_run_protograph(
    base: BaseMatrix,
    ebn0_db: float,
    deadzone: float,
    l_max: int = 200,
    eps_target: float = 1e-10,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
    record: bool = True,
) -> DEReport:
    """Run protograph DE; converged means every per-type decision error falls below eps_target.

    The message-probability criterion (all per-type erasure + error below
    eps_target) is tracked alongside; a disagreement between the two at exit
    is reported via ``msg_converged_at``/``app_converged_at``, never resolved
    silently.
    """
    validate_base_matrix(base)
    rate = design_rate(base)
    ch = channel_from_ebn0(ebn0_db, rate)
    init = de_init(ch.llr_mean, ch.llr_std, deadzone)
    p = EdgeTypeDensities.uniform(base, init)
    for j in base.punctured:
        nz = base.entries[:, j] > 0
        p.erasure[nz, j] = 1.0
        p.error[nz, j] = 0.0

    trajectory = []
    weight_rows = []
    clip_events = 0
    msg_at = None
    app_at = None
    iterations = 0
    prev_metric = math.inf
    for it in range(1, l_max + 1):
        q = proto_cn_update(p, base)
        weights, clips = _edge_weights(q, base, weight_cap)
        clip_events += clips
        p = proto_vn_update(q, base, ch.llr_mean, ch.llr_std, deadzone, weight_cap)
        p_app = proto_app_update(q, base, ch.llr_mean, ch.llr_std, weight_cap)
        iterations = it
        weight_rows.append(weights)
        if record:
            trajectory.append({"p": p.copy(), "q": q, "weights": weights, "p_app": p_app})
        if msg_at is None and p.max_total(base) < eps_target:
            msg_at = it
        app_metric = float(p_app.max())
        if app_at is None and app_metric < eps_target:
            app_at = it
        if app_at is not None and msg_at is not None:
            break
        if app_at is None and msg_at is None and abs(app_metric - prev_metric) < 1e-17:
            break  # numerical fixed point above target
        prev_metric = app_metric
    values = np.stack(weight_rows) if weight_rows else np.zeros((0, base.m0, base.n0))
    schedule = WeightSchedule(values, base=base)
    return DEReport(
        converged=app_at is not None,
        iterations=iterations,
        trajectory=trajectory,
        weights=schedule,
        final_p_app=p_app,
        clip_events=clip_events,
        msg_converged_at=msg_at,
        app_converged_at=app_at,
    )


def export_trajectory_csv(report: DEReport, base: Optional[BaseMatrix], path) -> None:
    """Write the DE trajectory as CSV: iteration, per-type p0/p-1/q0/q-1, decision error."""
    with open(path, "w", encoding="utf-8") as fh:
        if base is None:
            fh.write("iter,p0,p_minus,q0,q_minus,weight\n")
            for it, step in enumerate(report.trajectory, start=1):
                p, q = step["p"], step["q"]
                fh.write(f"{it},{p.erasure!r},{p.error!r},{q.erasure!r},{q.error!r},"
                         f"{step['weight']!r}\n")
            return
        pairs = base.nonzero_pairs()
        cols = [f"{name}_{i}_{j}" for name in ("p0", "p_minus", "q0", "q_minus") for i, j in pairs]
        cols += [f"p_app_{j}" for j in range(base.n0)]
        fh.write("iter," + ",".join(cols) + "\n")
        for it, step in enumerate(report.trajectory, start=1):
            vals = [step["p"].erasure[i, j] for i, j in pairs]
            vals += [step["p"].error[i, j] for i, j in pairs]
            vals += [step["q"].erasure[i, j] for i, j in pairs]
            vals += [step["q"].error[i, j] for i, j in pairs]
            vals += list(step["p_app"])
            fh.write(f"{it}," + ",".join(repr(float(v)) for v in vals) + "\n")


# ---------------------------------------------------------------------------
# threshold search and quantizer optimization

DEModel = Union[DegreeDistribution, BaseMatrix]


class ThresholdNotFoundError(RuntimeError):
    """No converging Eb/N0 at or below the upper scan limit."""


class NonMonotoneConvergenceError(RuntimeError):
    """DE convergence was not a step function of Eb/N0 over the evaluated points."""


@dataclass
class ThresholdResult:
    threshold_db: float
    evaluations: list = field(default_factory=list)
    criterion_conflicts: list = field(default_factory=list)

    def __float__(self):
        return self.threshold_db


def _de_converges(model: DEModel, ebn0_db, deadzone, l_max, eps_target, weight_cap, conflicts):
    if isinstance(model, BaseMatrix):
        rep = de_run_protograph(model, ebn0_db, deadzone, l_max, eps_target, weight_cap,
                                record=False)
        if (rep.app_converged_at is None) != (rep.msg_converged_at is None):
            conflicts.append({
                "ebn0_db": ebn0_db,
                "app_converged_at": rep.app_converged_at,
                "msg_converged_at": rep.msg_converged_at,
            })
        return rep.converged
    rep = de_run_unstructured(model, ebn0_db, deadzone, l_max, eps_target, weight_cap,
                              record=False)
    return rep.converged


def threshold_search(
    model: DEModel,
    deadzone: float,
    l_max: int = 200,
    eps_target: float = 1e-10,
    tol_db: float = 0.01,
    scan_lo: float = -1.5,
    scan_hi: float = 12.0,
    scan_step: float = 0.25,
    hint: Optional[float] = None,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> ThresholdResult:
    """Bisect for the smallest converging Eb/N0 (dB) of a DE model.

    A coarse scan brackets the transition; ``hint`` (e.g. a neighboring
    quantizer's threshold) short-circuits the scan. Every evaluation is kept
    and the converged indicator is asserted to be a step function of Eb/N0;
    a violation raises instead of returning a bogus threshold.
    """
    conflicts = []
    evals = []

    def check(x):
        ok = _de_converges(model, x, deadzone, l_max, eps_target, weight_cap, conflicts)
        evals.append((x, ok))
        return ok

    lo = hi = None
    if hint is not None and scan_lo < hint < scan_hi:
        x = hint
        if check(x):
            hi = x
            while hi - scan_step > scan_lo:
                x = hi - scan_step
                if check(x):
                    hi = x
                else:
                    lo = x
                    break
            else:
                lo = scan_lo
                if check(lo):
                    raise ThresholdNotFoundError(
                        f"model converges at the lower scan limit {scan_lo} dB; "
                        "extend the scan range downward")
        else:
            lo = x
            while lo + scan_step < scan_hi:
                x = lo + scan_step
                if check(x):
                    hi = x
                    break
                lo = x
    if hi is None:
        x = scan_lo if lo is None else lo
        if lo is None:
            if check(x):
                raise ThresholdNotFoundError(
                    f"model converges at the lower scan limit {scan_lo} dB; "
                    "extend the scan range downward")
            lo = x
        while True:
            x = min(x + scan_step, scan_hi)
            if check(x):
                hi = x
                break
            lo = x
            if x >= scan_hi:
                raise ThresholdNotFoundError(
                    f"no convergence up to the scan limit {scan_hi} dB")

    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if check(mid):
            hi = mid
        else:
            lo = mid

    ordered = sorted(evals)
    flags = [ok for _, ok in ordered]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        raise NonMonotoneConvergenceError(
            f"convergence not monotone in Eb/N0: {ordered}")
    if conflicts and isinstance(model, BaseMatrix):
        # The two convergence definitions usually agree to within an
        # iteration; a conflict exactly at the bisection boundary is within
        # tolerance. Only a disagreement persisting tol_db above the returned
        # threshold is worth reporting.
        probe = de_run_protograph(model, hi + tol_db, deadzone, l_max, eps_target,
                                  weight_cap, record=False)
        if (probe.app_converged_at is None) != (probe.msg_converged_at is None):
            warnings.warn(
                f"decision-error and message-probability thresholds disagree by "
                f"more than {tol_db} dB near {hi} dB", RuntimeWarning)
    return ThresholdResult(hi, ordered, conflicts)


@dataclass
class QuantizerOptimum:
    deadzone: float
    threshold_db: float
    grid: list  # (deadzone, threshold_db or None) per grid point


def optimize_quantizer(
    model: DEModel,
    deadzone_grid,
    l_max: int = 200,
    eps_target: float = 1e-10,
    tol_db: float = 0.01,
    scan_lo: float = -1.5,
    scan_hi: float = 12.0,
    scan_step: float = 0.25,
    weight_cap: float = DEFAULT_WEIGHT_CAP,
) -> QuantizerOptimum:
    """Grid-minimize the DE threshold over the quantizer deadzone.

    Ties (within half the bisection tolerance) break toward the smaller
    deadzone. Grid points where no threshold exists inside the scan window
    are recorded with None and skipped.
    """
    grid = sorted(float(a) for a in deadzone_grid)
    if not grid:
        raise ValueError("empty deadzone grid")
    best_a = None
    best_thr = math.inf
    results = []
    hint = None
    for a in grid:
        try:
            res = threshold_search(model, a, l_max, eps_target, tol_db,
                                   scan_lo, scan_hi, scan_step, hint=hint,
                                   weight_cap=weight_cap)
            thr = res.threshold_db
            hint = thr
        except ThresholdNotFoundError:
            results.append((a, None))
            continue
        results.append((a, thr))
        if thr < best_thr - 0.5 * tol_db:
            best_thr = thr
            best_a = a
    if best_a is None:
        raise ThresholdNotFoundError("no deadzone on the grid produced a threshold")
    return QuantizerOptimum(best_a, best_thr, results)


# ---------------------------------------------------------------------------
# stability condition (unstructured ensembles)


@dataclass(frozen=True)
class StabilityInputs:
    """Channel summary (alpha, beta) plus the ensemble fractions entering the Jacobian."""

    alpha: float
    beta: float
    lambda2: float
    lambda3: float
    rho_prime_1: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta > 1 + 1e-12:
            raise ValueError("need alpha, beta >= 0 and alpha + beta <= 1")
        if self.lambda2 < 0 or self.lambda3 < 0 or self.lambda2 + self.lambda3 > 1 + 1e-12:
            raise ValueError("need lambda2, lambda3 >= 0 and lambda2 + lambda3 <= 1")
        if self.rho_prime_1 < 0:
            raise ValueError("rho'(1) must be >= 0")


def stability_jacobian(s: StabilityInputs) -> np.ndarray:
    """Small-probability Jacobian of the DE map at the zero fixed point."""
    return s.rho_prime_1 * np.array([
        [s.alpha * s.lambda2, 2.0 * s.alpha * s.lambda3],
        [s.beta * s.lambda2, s.lambda2 + 2.0 * s.beta * s.lambda3],
    ])


def stability_gamma(s: StabilityInputs) -> float:
    """Spectral radius of the stability Jacobian, in closed form.

    The zero fixed point is locally attractive iff the result is < 1.
    """
    l2, l3 = s.lambda2, s.lambda3
    a, b = s.alpha, s.beta
    disc = (a - 1.0) ** 2 * l2 ** 2 + 4.0 * b ** 2 * l3 ** 2 + 4.0 * b * l2 * l3 * (a + 1.0)
    return 0.5 * s.rho_prime_1 * ((a + 1.0) * l2 + 2.0 * b * l3 + math.sqrt(disc))


def is_stable(s: StabilityInputs) -> bool:
    return stability_gamma(s) < 1.0


def stability_from_ensemble(dd: DegreeDistribution, deadzone: float,
                            ebn0_db: float) -> StabilityInputs:
    """Stability inputs of an unstructured ensemble at a channel operating point."""
    ch = channel_from_ebn0(ebn0_db, unstructured_design_rate(dd))
    a, b = alpha_beta(deadzone, ch.llr_mean, ch.llr_std)
    return StabilityInputs(a, b, dd.lambda_fraction(2), dd.lambda_fraction(3),
                           dd.rho_prime_at_one())
