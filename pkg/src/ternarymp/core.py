"""Shared domain types: degree distributions, base matrices, Tanner graphs, ternary symbols."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

TERNARY = (-1, 0, 1)


def ternary_product(values) -> int:
    """Product over a sequence of ternary symbols. Empty product is +1; 0 absorbs."""
    out = 1
    for v in values:
        if v not in (-1, 0, 1):
            raise ValueError(f"not a ternary symbol: {v!r}")
        out *= v
    return out


class ValidationError(ValueError):
    """Raised when a domain object violates its invariants."""


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution pair (lambda for VNs, rho for CNs).

    Coefficients are stored sparsely as (degree, fraction) pairs so that large
    maximum degrees do not require dense arrays. Fractions on each side must
    sum to one.
    """

    lambda_coeffs: tuple[tuple[int, float], ...]
    rho_coeffs: tuple[tuple[int, float], ...]

    def __post_init__(self):
        for name, coeffs in (("lambda", self.lambda_coeffs), ("rho", self.rho_coeffs)):
            degrees = [d for d, _ in coeffs]
            if any(int(d) != d or d < 1 for d in degrees):
                raise ValidationError(f"{name}: degrees must be positive integers")
            if len(set(degrees)) != len(degrees):
                raise ValidationError(f"{name}: duplicate degrees")
            fracs = np.array([f for _, f in coeffs], dtype=float)
            if np.any(fracs < 0) or np.any(fracs > 1):
                raise ValidationError(f"{name}: fractions must lie in [0, 1]")
            if abs(fracs.sum() - 1.0) > 1e-12:
                raise ValidationError(f"{name}: fractions sum to {fracs.sum()}, not 1")

    @classmethod
    def from_regular(cls, dv: int, dc: int) -> "DegreeDistribution":
        """Regular ensemble shorthand: lambda(x) = x^(dv-1), rho(x) = x^(dc-1)."""
        if dv < 2 or dc < 2:
            raise ValidationError("regular ensemble needs dv >= 2 and dc >= 2")
        return cls(((dv, 1.0),), ((dc, 1.0),))

    def lambda_at(self, x: float) -> float:
        return float(sum(f * x ** (d - 1) for d, f in self.lambda_coeffs))

    def rho_at(self, x: float) -> float:
        return float(sum(f * x ** (d - 1) for d, f in self.rho_coeffs))

    def rho_prime_at_one(self) -> float:
        """Derivative rho'(1) = sum_i rho_i (i - 1)."""
        return float(sum(f * (d - 1) for d, f in self.rho_coeffs))

    def lambda_fraction(self, degree: int) -> float:
        return next((f for d, f in self.lambda_coeffs if d == degree), 0.0)


def unstructured_from_regular(dv: int, dc: int) -> DegreeDistribution:
    return DegreeDistribution.from_regular(dv, dc)


@dataclass(frozen=True)
class BaseMatrix:
    """Protograph base matrix: nonnegative integer entries, optional punctured columns.

    Entry (i, j) counts the parallel edges between CN type i and VN type j.
    Punctured (state) columns describe VNs that are never transmitted; their
    lifted copies inherit the flag.
    """

    entries: np.ndarray
    punctured: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "punctured", frozenset(int(j) for j in self.punctured))

    @property
    def m0(self) -> int:
        return self.entries.shape[0]

    @property
    def n0(self) -> int:
        return self.entries.shape[1]

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def nonzero_pairs(self) -> list[tuple[int, int]]:
        """(i, j) pairs with entries[i, j] != 0, row-major order."""
        ii, jj = np.nonzero(self.entries)
        return list(zip(ii.tolist(), jj.tolist()))

    def __eq__(self, other):
        if not isinstance(other, BaseMatrix):
            return NotImplemented
        return (
            self.entries.shape == other.entries.shape
            and bool(np.all(self.entries == other.entries))
            and self.punctured == other.punctured
        )

    def __hash__(self):
        return hash((self.entries.tobytes(), self.entries.shape, self.punctured))


def validate_base_matrix(b: BaseMatrix) -> BaseMatrix:
    """Return ``b`` unchanged iff all base-matrix invariants hold."""
    ent = b.entries
    if ent.ndim != 2:
        raise ValidationError("base matrix must be two-dimensional")
    if np.any(ent < 0):
        raise ValidationError("base matrix has negative entries")
    zero_rows = np.where(ent.sum(axis=1) == 0)[0]
    if zero_rows.size:
        raise ValidationError(f"all-zero row(s): {zero_rows.tolist()}")
    zero_cols = np.where(ent.sum(axis=0) == 0)[0]
    if zero_cols.size:
        raise ValidationError(f"all-zero column(s): {zero_cols.tolist()}")
    bad_punct = [j for j in b.punctured if not 0 <= j < b.n0]
    if bad_punct:
        raise ValidationError(f"punctured column indices out of range: {bad_punct}")
    transmitted = b.n0 - len(b.punctured)
    if transmitted <= 0:
        raise ValidationError("every column is punctured")
    rate = (b.n0 - b.m0) / transmitted
    if not 0.0 < rate < 1.0:
        raise ValidationError(f"design rate {rate} outside (0, 1)")
    return b


def design_rate(b: BaseMatrix) -> float:
    """(n0 - m0) / (n0 - #punctured); raises if outside (0, 1)."""
    validate_base_matrix(b)
    return (b.n0 - b.m0) / (b.n0 - len(b.punctured))


def parse_base_matrix(text: str) -> BaseMatrix:
    """Parse the base-matrix text format.

    First non-comment line is ``m0 n0``, followed by m0 rows of n0 integers,
    then an optional ``punctured: j1 j2 ...`` line with 0-based column
    indices. ``#`` starts a comment; blank lines are ignored.
    """
    lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    if not lines:
        raise ValidationError("empty base-matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValidationError(f"expected 'm0 n0' header, got {lines[0]!r}")
    m0, n0 = int(header[0]), int(header[1])
    if len(lines) < 1 + m0:
        raise ValidationError(f"expected {m0} matrix rows, found {len(lines) - 1}")
    rows = []
    for k in range(m0):
        row = [int(tok) for tok in lines[1 + k].split()]
        if len(row) != n0:
            raise ValidationError(f"row {k} has {len(row)} entries, expected {n0}")
        rows.append(row)
    punctured: frozenset[int] = frozenset()
    extra = lines[1 + m0:]
    if extra:
        if len(extra) != 1 or not extra[0].startswith("punctured:"):
            raise ValidationError(f"unexpected trailing content: {extra!r}")
        punctured = frozenset(int(tok) for tok in extra[0].split(":", 1)[1].split())
    return validate_base_matrix(BaseMatrix(np.array(rows, dtype=np.int64), punctured))


def load_base_matrix(path) -> BaseMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_base_matrix(fh.read())


def format_base_matrix(b: BaseMatrix) -> str:
    buf = io.StringIO()
    buf.write(f"{b.m0} {b.n0}\n")
    for row in b.entries:
        buf.write(" ".join(str(int(v)) for v in row) + "\n")
    if b.punctured:
        buf.write("punctured: " + " ".join(str(j) for j in sorted(b.punctured)) + "\n")
    return buf.getvalue()


def save_base_matrix(b: BaseMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_base_matrix(b))


class TannerGraph:
    """Sparse bipartite graph of a lifted code with per-edge protograph types.

    Edges are stored in a flat array in VN-major order. ``vn_ptr`` delimits
    each VN's slice; ``cn_order``/``cn_ptr`` provide the CN-major view as a
    permutation of edge ids, so decoders can reduce over either side with
    ``np.add.reduceat`` style operations. Instances are immutable after
    construction and safe to share across threads.
    """

    def __init__(self, n, m, edge_vn, edge_cn, edge_type=None, base=None, punctured_vn=None):
        self.n = int(n)
        self.m = int(m)
        self.edge_vn = np.asarray(edge_vn, dtype=np.int64)
        self.edge_cn = np.asarray(edge_cn, dtype=np.int64)
        self.num_edges = self.edge_vn.size
        if self.edge_cn.size != self.num_edges:
            raise ValidationError("edge arrays disagree in length")
        if edge_type is None:
            edge_type = np.zeros(self.num_edges, dtype=np.int64)
        self.edge_type = np.asarray(edge_type, dtype=np.int64)
        self.base = base
        self.base_shape = (base.m0, base.n0) if base is not None else (1, 1)
        if punctured_vn is None:
            punctured_vn = np.zeros(self.n, dtype=bool)
        self.punctured_vn = np.asarray(punctured_vn, dtype=bool)

        order = np.lexsort((self.edge_cn, self.edge_vn))
        self.edge_vn = self.edge_vn[order]
        self.edge_cn = self.edge_cn[order]
        self.edge_type = self.edge_type[order]
        self.vn_ptr = np.searchsorted(self.edge_vn, np.arange(self.n + 1))
        self.cn_order = np.argsort(self.edge_cn, kind="stable")
        cn_sorted = self.edge_cn[self.cn_order]
        self.cn_ptr = np.searchsorted(cn_sorted, np.arange(self.m + 1))
        self._check_consistency()

    def _check_consistency(self):
        if self.num_edges == 0:
            raise ValidationError("graph has no edges")
        if np.any(self.edge_vn < 0) or np.any(self.edge_vn >= self.n):
            raise ValidationError("edge VN index out of range")
        if np.any(self.edge_cn < 0) or np.any(self.edge_cn >= self.m):
            raise ValidationError("edge CN index out of range")
        if np.any(np.diff(self.vn_ptr) == 0):
            raise ValidationError("isolated VN (degree 0)")
        if np.any(np.diff(self.cn_ptr) == 0):
            raise ValidationError("isolated CN (degree 0)")

    @classmethod
    def from_biadjacency(cls, h, base=None, edge_type=None, punctured_vn=None) -> "TannerGraph":
        """Build from a dense 0/1 parity-check style matrix (rows are CNs)."""
        h = np.asarray(h)
        cn_idx, vn_idx = np.nonzero(h)
        return cls(h.shape[1], h.shape[0], vn_idx, cn_idx, edge_type=edge_type,
                   base=base, punctured_vn=punctured_vn)

    def vn_degrees(self) -> np.ndarray:
        return np.diff(self.vn_ptr)

    def cn_degrees(self) -> np.ndarray:
        return np.diff(self.cn_ptr)

    def type_edge_counts(self) -> np.ndarray:
        """Edge count per flat protograph type id (i * n0 + j)."""
        m0, n0 = self.base_shape
        return np.bincount(self.edge_type, minlength=m0 * n0)

    def to_biadjacency(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.int8)
        h[self.edge_cn, self.edge_vn] = 1
        return h
