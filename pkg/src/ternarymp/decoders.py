"""Finite-length decoders: ternary message passing, its binary restriction, and sum-product.

All three decoders run a flooding schedule over a :class:`~ternarymp.core.TannerGraph`
with messages held in flat edge-indexed arrays. A decoder call owns its
message arrays; graphs and weight schedules are shared read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import BaseMatrix, TannerGraph, ValidationError, ternary_product


class WeightSchedule:
    """Per-iteration, per-edge-type reliability weights consumed by the decoders.

    ``values`` has shape (iterations, m0, n0). A scalar schedule (one weight
    per iteration, base None) is the degenerate form used with unstructured
    graphs and broadcasts over all edge types.

    Text format: one row per iteration, each row m0*n0 reals where column
    (j-1)*n0 + i holds the weight for CN type j and VN type i (1-based), i.e.
    the row-major flattening of the (m0, n0) weight matrix. Entries at zero
    base-matrix positions must be exactly zero.
    """

    def __init__(self, values: np.ndarray, base: Optional[BaseMatrix] = None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1, 1)
        if values.ndim != 3:
            raise ValidationError("weight schedule values must be (iters, m0, n0)")
        self.values = values
        self.base = base
        self._validate()

    def _validate(self):
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("weights must be finite")
        if np.any(self.values < 0):
            raise ValidationError("weights must be nonnegative")
        if self.base is not None:
            if self.values.shape[1:] != (self.base.m0, self.base.n0):
                raise ValidationError(
                    f"schedule shape {self.values.shape[1:]} does not match base "
                    f"{(self.base.m0, self.base.n0)}")
            zero_mask = self.base.entries == 0
            if self.values.size and np.any(self.values[:, zero_mask] != 0.0):
                raise ValidationError("nonzero weight at a zero base-matrix entry")
            if self.values.size and np.any(self.values[:, ~zero_mask] == 0.0):
                raise ValidationError("zero weight at a nonzero base-matrix entry")
        elif self.values.shape[1:] != (1, 1):
            raise ValidationError("scalar schedule must have shape (iters, 1, 1)")

    @property
    def n_iters(self) -> int:
        return self.values.shape[0]

    def flat_row(self, iteration: int, base_shape: tuple[int, int]) -> np.ndarray:
        """Weights of one iteration as a flat per-type array for a graph's base shape."""
        row = self.values[iteration - 1]
        if self.base is None:
            return np.full(base_shape[0] * base_shape[1], float(row[0, 0]))
        return row.ravel()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.values:
                fh.write(" ".join(f"{v:.6f}" for v in row.ravel()) + "\n")

    @classmethod
    def load(cls, path, base: BaseMatrix) -> "WeightSchedule":
        """Parse a schedule file, validating width and zero pattern against ``base``.

        Files whose rows do not have exactly m0*n0 columns are rejected
        outright rather than reinterpreted under another layout.
        """
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                stripped = raw.split("#", 1)[0].strip()
                if not stripped:
                    continue
                vals = [float(tok) for tok in stripped.split()]
                if len(vals) != base.m0 * base.n0:
                    raise ValidationError(
                        f"line {lineno}: {len(vals)} columns, expected m0*n0 = "
                        f"{base.m0 * base.n0}; refusing to guess another layout")
                rows.append(vals)
        if not rows:
            raise ValidationError("empty weight-schedule file")
        values = np.array(rows).reshape(len(rows), base.m0, base.n0)
        return cls(values, base)


@dataclass
class DecoderConfig:
    """Quantizer deadzone, iteration budget, and weight schedule for TMP/BMP decoding."""

    deadzone: float
    max_iters: int
    weights: WeightSchedule
    early_stop: bool = True
    collect_message_stats: bool = False

    def __post_init__(self):
        if self.deadzone < 0:
            raise ValidationError("deadzone must be >= 0")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")

    def check_against(self, graph: TannerGraph) -> None:
        if self.weights.n_iters < self.max_iters:
            raise ValidationError(
                f"weight schedule has {self.weights.n_iters} rows but max_iters is "
                f"{self.max_iters}; refusing to reuse rows")
        if self.weights.base is not None:
            if graph.base is None:
                raise ValidationError("typed schedule used with an untyped graph")
            if graph.base != self.weights.base:
                raise ValidationError("schedule base matrix differs from the graph's")


@dataclass
class DecodeResult:
    hard_decision: np.ndarray
    iterations_used: int
    converged: bool
    message_stats: Optional[list] = field(default=None, repr=False)


def quantize(x, deadzone: float):
    """Deadzone quantizer to {-1, 0, +1}: 0 on [-deadzone, deadzone], boundaries inclusive."""
    x = np.asarray(x)
    out = np.where(x > deadzone, 1, np.where(x < -deadzone, -1, 0))
    return out if out.ndim else int(out)

def binary_quantize(x):
    """Sign to {-1, +1} with the deterministic tie rule sign(0) = -1."""
    x = np.asarray(x)
    out = np.where(x > 0, 1, -1)
    return out if out.ndim else int(out)


def cn_update(incoming) -> int:
    """Extrinsic check-node output: product of the incoming ternary messages."""
    return ternary_product(incoming)


def vn_update(l_ch: float, incoming, deadzone: float) -> int:
    """Extrinsic variable-node output: quantize(l_ch + sum of weighted messages).

    ``incoming`` is a sequence of (message, weight) pairs. State VNs pass
    l_ch = 0.
    """
    total = l_ch + sum(w * m for m, w in incoming)
    return quantize(total, deadzone)


def app_decision(l_ch: float, incoming) -> int:
    """Hard bit from the full (non-extrinsic) weighted sum; a zero total decides bit 1."""
    total = l_ch + sum(w * m for m, w in incoming)
    return 1 if total <= 0 else 0


def syndrome_check(bits, graph: TannerGraph) -> bool:
    """True iff every check node's neighborhood has even parity."""
    bits = np.asarray(bits, dtype=np.int64)
    per_edge = bits[graph.edge_vn][graph.cn_order]
    parity = np.add.reduceat(per_edge, graph.cn_ptr[:-1]) % 2
    return bool(np.all(parity == 0))


def _cn_product_step(msg_v, graph):
    """Vectorized extrinsic ternary product at every check node."""
    mv = msg_v[graph.cn_order]
    iszero = mv == 0
    nonzero = np.where(iszero, 1, mv)
    zero_counts = np.add.reduceat(iszero.astype(np.int64), graph.cn_ptr[:-1])
    sign_prod = np.multiply.reduceat(nonzero, graph.cn_ptr[:-1])
    cn_of = graph.edge_cn[graph.cn_order]
    others_zero = zero_counts[cn_of] - iszero
    out = np.where(others_zero > 0, 0, sign_prod[cn_of] * nonzero)
    msg_c = np.empty_like(msg_v)
    msg_c[graph.cn_order] = out
    return msg_c


def _collect_stats(msg_v, graph, n_types):
    zeros = np.bincount(graph.edge_type, weights=(msg_v == 0), minlength=n_types)
    minus = np.bincount(graph.edge_type, weights=(msg_v == -1), minlength=n_types)
    return zeros.astype(np.int64), minus.astype(np.int64)


def _quantized_decode(llrs, graph: TannerGraph, cfg: DecoderConfig, binary: bool) -> DecodeResult:
    llrs = np.asarray(llrs, dtype=float)
    if llrs.shape != (graph.n,):
        raise ValidationError(f"llrs length {llrs.shape} does not match n = {graph.n}")
    cfg.check_against(graph)
    m0, n0 = graph.base_shape
    n_types = m0 * n0

    bits = (llrs <= 0).astype(np.uint8)
    if cfg.early_stop and syndrome_check(bits, graph):
        return DecodeResult(bits, 0, True, [] if cfg.collect_message_stats else None)

    llr_e = llrs[graph.edge_vn]
    msg_v = binary_quantize(llr_e) if binary else quantize(llr_e, cfg.deadzone)
    stats = [] if cfg.collect_message_stats else None
    iterations = 0
    converged = False
    for it in range(1, cfg.max_iters + 1):
        iterations = it
        msg_c = _cn_product_step(msg_v, graph)
        w_edge = cfg.weights.flat_row(it, graph.base_shape)[graph.edge_type]
        contrib = w_edge * msg_c
        totals = llrs + np.add.reduceat(contrib, graph.vn_ptr[:-1])
        bits = (totals <= 0).astype(np.uint8)
        ext = totals[graph.edge_vn] - contrib
        msg_v = binary_quantize(ext) if binary else quantize(ext, cfg.deadzone)
        if stats is not None:
            stats.append(_collect_stats(msg_v, graph, n_types))
        if cfg.early_stop and syndrome_check(bits, graph):
            converged = True
            break
    return DecodeResult(bits, iterations, converged, stats)


def tmp_decode(llrs, graph: TannerGraph, cfg: DecoderConfig) -> DecodeResult:
    """Ternary message passing with per-iteration, per-edge-type reliability weights."""
    return _quantized_decode(llrs, graph, cfg, binary=False)


def bmp_decode(llrs, graph: TannerGraph, cfg: DecoderConfig) -> DecodeResult:
    """Binary message passing: the quantizer replaced by sign. cfg.deadzone is ignored."""
    return _quantized_decode(llrs, graph, cfg, binary=True)


_BP_TANH_CLIP = 1.0 - 1e-15


def bp_decode(llrs, graph: TannerGraph, max_iters: int, early_stop: bool = True) -> DecodeResult:
    """Reference unquantized sum-product decoder (tanh-rule CNs, flooding)."""
    llrs = np.asarray(llrs, dtype=float)
    if llrs.shape != (graph.n,):
        raise ValidationError(f"llrs length {llrs.shape} does not match n = {graph.n}")
    if max_iters < 1:
        raise ValidationError("max_iters must be >= 1")

    bits = (llrs <= 0).astype(np.uint8)
    if early_stop and syndrome_check(bits, graph):
        return DecodeResult(bits, 0, True)

    msg_v = llrs[graph.edge_vn].astype(float)
    cn_of = graph.edge_cn[graph.cn_order]
    iterations = 0
    converged = False
    for it in range(1, max_iters + 1):
        iterations = it
        t = np.tanh(0.5 * msg_v[graph.cn_order])
        mag = np.clip(np.abs(t), 1e-300, _BP_TANH_CLIP)
        logs = np.log(mag)
        sgn = np.where(t < 0, -1.0, 1.0)
        log_sums = np.add.reduceat(logs, graph.cn_ptr[:-1])
        sign_prods = np.multiply.reduceat(sgn, graph.cn_ptr[:-1])
        ext_mag = np.clip(np.exp(log_sums[cn_of] - logs), 0.0, _BP_TANH_CLIP)
        out = 2.0 * np.arctanh(ext_mag) * sign_prods[cn_of] * sgn
        msg_c = np.empty_like(msg_v)
        msg_c[graph.cn_order] = out
        totals = llrs + np.add.reduceat(msg_c, graph.vn_ptr[:-1])
        bits = (totals <= 0).astype(np.uint8)
        msg_v = totals[graph.edge_vn] - msg_c
        if early_stop and syndrome_check(bits, graph):
            converged = True
            break
    return DecodeResult(bits, iterations, converged)


def bp_marginals(llrs, graph: TannerGraph, iters: int) -> np.ndarray:
    """Posterior LLR totals after a fixed number of sum-product iterations (no early stop)."""
    llrs = np.asarray(llrs, dtype=float)
    msg_v = llrs[graph.edge_vn].astype(float)
    cn_of = graph.edge_cn[graph.cn_order]
    totals = llrs.copy()
    for _ in range(iters):
        t = np.tanh(0.5 * msg_v[graph.cn_order])
        mag = np.clip(np.abs(t), 1e-300, _BP_TANH_CLIP)
        logs = np.log(mag)
        sgn = np.where(t < 0, -1.0, 1.0)
        log_sums = np.add.reduceat(logs, graph.cn_ptr[:-1])
        sign_prods = np.multiply.reduceat(sgn, graph.cn_ptr[:-1])
        ext_mag = np.clip(np.exp(log_sums[cn_of] - logs), 0.0, _BP_TANH_CLIP)
        out = 2.0 * np.arctanh(ext_mag) * sign_prods[cn_of] * sgn
        msg_c = np.empty_like(msg_v)
        msg_c[graph.cn_order] = out
        totals = llrs + np.add.reduceat(msg_c, graph.vn_ptr[:-1])
        msg_v = totals[graph.edge_vn] - msg_c
    return totals
