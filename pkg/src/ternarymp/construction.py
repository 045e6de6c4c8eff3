"""Quasi-cyclic code construction: circulant PEG lifting, random lifts, girth analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .core import BaseMatrix, TannerGraph, ValidationError, validate_base_matrix


@dataclass(frozen=True)
class CirculantLift:
    """Cyclic-shift assignment of a base matrix: one shift in [0, Q) per parallel edge."""

    q: int
    shifts: dict  # (i, j) -> tuple of shifts, len == base.entries[i, j]

    def validate_against(self, base: BaseMatrix) -> "CirculantLift":
        for (i, j), ss in self.shifts.items():
            if len(ss) != base.entries[i, j]:
                raise ValidationError(f"({i},{j}): {len(ss)} shifts for entry "
                                      f"{base.entries[i, j]}")
            if len(set(ss)) != len(ss):
                raise ValidationError(f"({i},{j}): duplicate shifts create parallel edges")
            if any(not 0 <= s < self.q for s in ss):
                raise ValidationError(f"({i},{j}): shift outside [0, {self.q})")
        if set(self.shifts) != {(i, j) for i, j in base.nonzero_pairs()}:
            raise ValidationError("shift assignment does not cover the base support")
        return self


def lift_to_graph(base: BaseMatrix, lift: CirculantLift) -> TannerGraph:
    """Expand a circulant lift into the lifted Tanner graph (VN copy q of column j
    meets CN copy (q + shift) mod Q of row i)."""
    lift.validate_against(base)
    q = lift.q
    vn_idx, cn_idx, types = [], [], []
    copies = np.arange(q)
    for (i, j), shifts in sorted(lift.shifts.items()):
        for s in shifts:
            vn_idx.append(j * q + copies)
            cn_idx.append(i * q + (copies + s) % q)
            types.append(np.full(q, i * base.n0 + j))
    punctured = np.zeros(base.n0 * q, dtype=bool)
    for j in base.punctured:
        punctured[j * q:(j + 1) * q] = True
    return TannerGraph(base.n0 * q, base.m0 * q,
                       np.concatenate(vn_idx), np.concatenate(cn_idx),
                       edge_type=np.concatenate(types), base=base,
                       punctured_vn=punctured)


def _bfs_distances(start_vn: int, vn_adj, cn_adj, n: int, m: int):
    """Distances from one VN to all CNs in the (partial) bipartite graph."""
    dist_vn = np.full(n, -1, dtype=np.int64)
    dist_cn = np.full(m, -1, dtype=np.int64)
    dist_vn[start_vn] = 0
    vn_side = True
    depth = 0
    current = [start_vn]
    while current:
        nxt = []
        depth += 1
        if vn_side:
            for v in current:
                for c in vn_adj[v]:
                    if dist_cn[c] < 0:
                        dist_cn[c] = depth
                        nxt.append(c)
        else:
            for c in current:
                for v in cn_adj[c]:
                    if dist_vn[v] < 0:
                        dist_vn[v] = depth
                        nxt.append(v)
        vn_side = not vn_side
        current = nxt
    return dist_cn


def _new_cycle_lengths(dist_row: np.ndarray, q: int) -> np.ndarray:
    """Shortest cycle each candidate shift would create, given BFS distances.

    ``dist_row[r]`` is the partial-graph distance from VN copy 0 of the column
    to CN copy r of the target row (-1 if unreached). A shift s creates, per
    circulant invariance, cycles of length 1 + dist[s] through one new edge
    and 2 + dist[s - d] + dist[s + d] through two new edges of the same
    bundle (copy offset d); the minimum over both families scores s.
    """
    dist = np.where(dist_row < 0, np.inf, dist_row.astype(float))
    best_pair = np.full(q, np.inf)
    for delta in range(1, q // 2 + 1):
        best_pair = np.minimum(best_pair, np.roll(dist, delta) + np.roll(dist, -delta))
    return np.minimum(1.0 + dist, 2.0 + best_pair)


def peg_lift(base: BaseMatrix, q: int, seed: int = 0) -> tuple[TannerGraph, CirculantLift]:
    """Greedy circulant progressive-edge-growth lift of a base matrix.

    Columns are processed in decreasing degree order (equal degrees shuffled
    by ``seed``); each parallel edge gets the cyclic shift creating the
    longest possible new cycle in the partially built lifted graph, judged by
    BFS from copy 0 of the column and accounting for cycles closed between
    copies of the new bundle itself. Ties break toward the smallest shift.
    Deterministic given (base, q, seed).
    """
    validate_base_matrix(base)
    if q < int(base.entries.max()):
        raise ValidationError(
            f"Q = {q} < max entry {int(base.entries.max())}: parallel edges unavoidable")
    rng = np.random.default_rng(seed)
    order = rng.permutation(base.n0)
    degrees = base.column_sums()
    order = sorted(order.tolist(), key=lambda j: -int(degrees[j]))

    n, m = base.n0 * q, base.m0 * q
    vn_adj = [[] for _ in range(n)]
    cn_adj = [[] for _ in range(m)]
    shifts: dict[tuple[int, int], list[int]] = {}
    copies = np.arange(q)
    for j in order:
        for i in range(base.m0):
            for _ in range(int(base.entries[i, j])):
                used = shifts.setdefault((i, j), [])
                dist = _bfs_distances(j * q, vn_adj, cn_adj, n, m)[i * q:(i + 1) * q]
                scores = _new_cycle_lengths(dist, q)
                scores[np.asarray(used, dtype=np.int64)] = -1.0
                best = scores.max()
                s = int(np.nonzero(scores == best)[0].min())
                used.append(s)
                for copy in copies:
                    v = j * q + copy
                    c = i * q + (copy + s) % q
                    vn_adj[v].append(c)
                    cn_adj[c].append(v)
    lift = CirculantLift(q, {k: tuple(v) for k, v in shifts.items()})
    return lift_to_graph(base, lift), lift


def random_lift(base: BaseMatrix, q: int, seed: int = 0) -> TannerGraph:
    """Uniform permutation lift: each parallel edge carries an independent random
    permutation, resampled whenever it would duplicate an edge of the same pair."""
    validate_base_matrix(base)
    if q < int(base.entries.max()):
        raise ValidationError(f"Q = {q} < max entry {int(base.entries.max())}")
    rng = np.random.default_rng(seed)
    vn_idx, cn_idx, types = [], [], []
    copies = np.arange(q)
    for i, j in base.nonzero_pairs():
        chosen: list[np.ndarray] = []
        for _ in range(int(base.entries[i, j])):
            while True:
                perm = rng.permutation(q)
                if all(not np.any(perm == prev) for prev in chosen):
                    break
            chosen.append(perm)
            vn_idx.append(j * q + copies)
            cn_idx.append(i * q + perm)
            types.append(np.full(q, i * base.n0 + j))
    punctured = np.zeros(base.n0 * q, dtype=bool)
    for j in base.punctured:
        punctured[j * q:(j + 1) * q] = True
    return TannerGraph(base.n0 * q, base.m0 * q,
                       np.concatenate(vn_idx), np.concatenate(cn_idx),
                       edge_type=np.concatenate(types), base=base,
                       punctured_vn=punctured)


@dataclass(frozen=True)
class GirthReport:
    """Shortest cycle length (None if no cycle within max_len) and, for girths
    4 and 6, the exact count of minimal cycles."""

    girth: Optional[int]
    count: Optional[int]


def _bfs_girth(graph: TannerGraph, max_len: int, min_len: int = 4) -> Optional[int]:
    vn_adj = [graph.edge_cn[graph.vn_ptr[v]:graph.vn_ptr[v + 1]] for v in range(graph.n)]
    by_cn = graph.edge_vn[graph.cn_order]
    cn_adj = [by_cn[graph.cn_ptr[c]:graph.cn_ptr[c + 1]] for c in range(graph.m)]
    best = max_len + 2
    half = max_len // 2
    for start in range(graph.n):
        dist_vn = {start: 0}
        dist_cn = {}
        parent = {("v", start): None}
        frontier = [("v", start)]
        depth = 0
        found = None
        while frontier and depth < best // 2 and depth <= half:
            depth += 1
            nxt = []
            for side, node in frontier:
                neigh = vn_adj[node] if side == "v" else cn_adj[node]
                dmap, omap = (dist_cn, dist_vn) if side == "v" else (dist_vn, dist_cn)
                oside = "c" if side == "v" else "v"
                for nb in neigh:
                    nb = int(nb)
                    if parent[(side, node)] == nb:
                        # one edge back to the BFS parent is the tree edge;
                        # further parallel hits would be real 2-cycles, which
                        # simple graphs exclude
                        continue
                    if nb in dmap:
                        cyc = depth + dmap[nb]
                        if found is None or cyc < found:
                            found = cyc
                    else:
                        dmap[nb] = depth
                        parent[(oside, nb)] = node
                        nxt.append((oside, nb))
            if found is not None:
                break
            frontier = nxt
        if found is not None and found < best:
            best = found
            if best <= min_len:
                break
    return best if best <= max_len else None


def _count_cycles(graph: TannerGraph, length: int) -> Optional[int]:
    """Exact minimal-cycle counts for lengths 4 and 6 via neighborhood overlaps."""
    h = sp.csr_matrix((np.ones(graph.num_edges), (graph.edge_cn, graph.edge_vn)),
                      shape=(graph.m, graph.n))
    t = (h @ h.T).tocsr()
    t_off = t - sp.diags(t.diagonal())
    if length == 4:
        vals = t_off.data
        return int(round((vals * (vals - 1)).sum() / 4))
    if length == 6:
        tr3 = float((t_off @ t_off @ t_off).diagonal().sum())
        d = np.asarray(h.sum(axis=0)).ravel().astype(np.int64)
        hc = h.T.tocsr()  # VN-major neighbor lists
        s_term = 0.0
        r_term = 0.0
        for j in range(graph.n):
            rows = hc.indices[hc.indptr[j]:hc.indptr[j + 1]]
            sub = t_off[rows][:, rows]
            s_term += (d[j] - 2) * float(sub.sum())
            r_term += d[j] * (d[j] - 1) * (d[j] - 2)
        return int(round((tr3 - 3.0 * s_term + 2.0 * r_term) / 6.0))
    return None


def girth_report(graph: TannerGraph, max_len: int = 12) -> GirthReport:
    """Shortest-cycle detection up to ``max_len`` (even, >= 4).

    Girths 4 and 6 are resolved through exact neighborhood-overlap counts
    (which also yield the number of minimal cycles); longer girths fall back
    to BFS closure search and report the length only (count None).
    """
    if max_len < 4 or max_len % 2:
        raise ValidationError("max_len must be even and >= 4")
    for short in (4, 6):
        if short > max_len:
            return GirthReport(None, None)
        cnt = _count_cycles(graph, short)
        if cnt:
            return GirthReport(short, cnt)
    g = _bfs_girth(graph, max_len, min_len=8)
    if g is None:
        return GirthReport(None, None)
    return GirthReport(g, None)


# ---------------------------------------------------------------------------
# lift / parity-check file formats


def save_lift(lift: CirculantLift, base: BaseMatrix, path) -> None:
    """Text format: header ``Q m0 n0``, then one ``i j s1 s2 ...`` line per
    nonzero base entry (0-based indices)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{lift.q} {base.m0} {base.n0}\n")
        for (i, j), ss in sorted(lift.shifts.items()):
            fh.write(f"{i} {j} " + " ".join(str(s) for s in ss) + "\n")


def load_lift(path, base: BaseMatrix) -> CirculantLift:
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                lines.append(stripped)
    if not lines:
        raise ValidationError("empty lift file")
    header = lines[0].split()
    if len(header) != 3:
        raise ValidationError(f"expected 'Q m0 n0' header, got {lines[0]!r}")
    q, m0, n0 = map(int, header)
    if (m0, n0) != (base.m0, base.n0):
        raise ValidationError(f"lift is for a {m0}x{n0} base, not {base.m0}x{base.n0}")
    shifts = {}
    for line in lines[1:]:
        toks = [int(t) for t in line.split()]
        shifts[(toks[0], toks[1])] = tuple(toks[2:])
    return CirculantLift(q, shifts).validate_against(base)


def export_alist(graph: TannerGraph, path) -> None:
    """Sparse coordinate export in the usual alist layout (1-based, zero padded)."""
    vn_lists = [np.sort(graph.edge_cn[graph.vn_ptr[v]:graph.vn_ptr[v + 1]]) + 1
                for v in range(graph.n)]
    by_cn = graph.edge_vn[graph.cn_order]
    cn_lists = [np.sort(by_cn[graph.cn_ptr[c]:graph.cn_ptr[c + 1]]) + 1
                for c in range(graph.m)]
    dv = max(len(x) for x in vn_lists)
    dc = max(len(x) for x in cn_lists)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.m}\n{dv} {dc}\n")
        fh.write(" ".join(str(len(x)) for x in vn_lists) + "\n")
        fh.write(" ".join(str(len(x)) for x in cn_lists) + "\n")
        for lst in vn_lists:
            padded = list(lst) + [0] * (dv - len(lst))
            fh.write(" ".join(map(str, padded)) + "\n")
        for lst in cn_lists:
            padded = list(lst) + [0] * (dc - len(lst))
            fh.write(" ".join(map(str, padded)) + "\n")


# ---------------------------------------------------------------------------
# GF(2) helpers for small-instance validation


def gf2_nullspace(h: np.ndarray) -> np.ndarray:
    """Basis of the GF(2) null space of ``h`` (rows are basis codewords).

    Dense elimination; intended for small validation instances only.
    """
    h = np.array(h, dtype=np.uint8) % 2
    m, n = h.shape
    pivots = []
    row = 0
    for col in range(n):
        sel = np.nonzero(h[row:, col])[0]
        if sel.size == 0:
            continue
        pivot = row + sel[0]
        h[[row, pivot]] = h[[pivot, row]]
        mask = h[:, col].astype(bool)
        mask[row] = False
        h[mask] ^= h[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = h[r, fc]
    return basis


def random_codeword(h: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform random codeword of a small code given its parity-check matrix."""
    basis = gf2_nullspace(h)
    if basis.shape[0] == 0:
        return np.zeros(h.shape[1], dtype=np.uint8)
    coefs = rng.integers(0, 2, size=basis.shape[0]).astype(np.uint8)
    return (coefs @ basis) % 2
