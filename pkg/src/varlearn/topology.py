"""Vietoris-Rips persistence over Z/2 and the NSW sample-size bound.

The filtration parameter is the ball radius: an edge ``{i, j}`` enters at
``d_ij / 2``, and a simplex enters when its longest edge does.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import CapacityError, InvalidInputError
from .pointcloud import DistanceMatrix

__all__ = [
    "DEFAULT_SIMPLEX_CAP",
    "Filtration",
    "Barcode",
    "NswParameters",
    "rips_filtration",
    "boundary_persistence_pairs",
    "vietoris_rips_barcode",
    "nsw_bound",
]

DEFAULT_SIMPLEX_CAP = 50_000_000
INF = math.inf


def simplex_cap() -> int:
    raw = os.environ.get("VARLEARN_SIMPLEX_CAP")
    if raw is None:
        return DEFAULT_SIMPLEX_CAP
    try:
        return int(float(raw))
    except ValueError:
        raise InvalidInputError(f"VARLEARN_SIMPLEX_CAP must be an integer, got {raw!r}") from None


@dataclass
class Filtration:
    """Simplices per dimension in filtration order.

    ``simplices[p]`` is a ``(count, p + 1)`` array of sorted vertex indices and
    ``values[p]`` the matching filtration values. Within a dimension the order
    is by value, then lexicographic on vertices; across dimensions faces come
    first at equal value.
    """

    simplices: list[np.ndarray]
    values: list[np.ndarray]
    max_dim: int
    max_scale: float

    @property
    def size(self) -> int:
        return int(sum(len(v) for v in self.values))

    def __iter__(self):
        """Yield ``(vertices, value)`` in global filtration order."""
        items = []
        for p, (s, v) in enumerate(zip(self.simplices, self.values)):
            items.extend((float(val), p, tuple(int(x) for x in row)) for row, val in zip(s, v))
        items.sort()
        for val, _, verts in items:
            yield verts, val


def _order(simplices: np.ndarray, values: np.ndarray) -> np.ndarray:
    keys = [simplices[:, c] for c in range(simplices.shape[1] - 1, -1, -1)]
    return np.lexsort(keys + [values])


SCALES = ("radius", "distance")
ALGORITHMS = ("coboundary", "boundary")


def _edge_setup(D: DistanceMatrix, max_dim: int, max_scale: float, scale: str):
    if max_dim < 0:
        raise InvalidInputError("max_dim must be nonnegative")
    if not 0 < max_scale <= 1:
        raise InvalidInputError("max_scale must lie in (0, 1]")
    if scale not in SCALES:
        raise InvalidInputError(f"scale must be one of {SCALES}, got {scale!r}")
    E = D.entries / 2.0 if scale == "radius" else np.array(D.entries, dtype=float)
    adj = E <= max_scale
    np.fill_diagonal(adj, False)
    return E, adj


def _check_cap(adj: np.ndarray, top: int, cap: int) -> None:
    """Raise before enumeration if the complex up to ``top`` exceeds ``cap``."""
    m = adj.shape[0]
    upper = np.triu(adj, 1)
    total = m + (int(upper.sum()) if top >= 1 else 0)
    if total <= cap and top >= 2:
        for a in range(m):
            nb = np.flatnonzero(upper[a])
            if nb.size > 1:
                total += int(np.triu(adj[np.ix_(nb, nb)], 1).sum())
    for p in range(3, top + 1):
        if total > cap:
            break
        total += len(_cliques(upper, adj, p + 1))
    if total > cap:
        raise CapacityError(f"filtration exceeds the simplex cap of {cap}")


def rips_filtration(
    D: DistanceMatrix,
    max_dim: int = 1,
    max_scale: float = 1.0,
    cap: int | None = None,
    *,
    scale: str = "radius",
) -> Filtration:
    """Flag filtration up to dimension ``max_dim + 1`` with values ``<= max_scale``."""
    E, adj = _edge_setup(D, max_dim, max_scale, scale)
    cap = simplex_cap() if cap is None else cap
    m = D.m
    top = max_dim + 1
    _check_cap(adj, top, cap)
    upper = np.triu(adj, 1)
    simplices = [np.arange(m).reshape(m, 1)]
    values = [np.zeros(m)]
    if top >= 1:
        i, j = np.nonzero(upper)
        simplices.append(np.column_stack([i, j]).astype(np.int64))
        values.append(E[i, j])
    for p in range(2, top + 1):
        cl = _cliques(upper, adj, p + 1)
        simplices.append(cl)
        values.append(_clique_values(E, cl))
    for p in range(1, top + 1):
        o = _order(simplices[p], values[p])
        simplices[p] = simplices[p][o]
        values[p] = values[p][o]
    return Filtration(simplices, values, max_dim, float(max_scale))


def _cliques(upper: np.ndarray, adj: np.ndarray, size: int) -> np.ndarray:
    """All cliques of ``size`` vertices as sorted index rows."""
    m = upper.shape[0]
    out = []
    for a in range(m):
        nb = np.flatnonzero(upper[a])
        if nb.size < size - 1:
            continue
        for rest in _cliques_within(nb, adj, size - 1):
            out.append(np.column_stack([np.full(len(rest), a), rest]))
    if not out:
        return np.zeros((0, size), dtype=np.int64)
    return np.concatenate(out).astype(np.int64)


def _cliques_within(nodes: np.ndarray, adj: np.ndarray, size: int) -> list[np.ndarray]:
    if size == 1:
        return [nodes.reshape(-1, 1)]
    sub = np.triu(adj[np.ix_(nodes, nodes)], 1)
    if size == 2:
        r, c = np.nonzero(sub)
        return [np.column_stack([nodes[r], nodes[c]])]
    found = []
    for t, a in enumerate(nodes):
        nb = nodes[np.flatnonzero(sub[t])]
        if nb.size >= size - 1:
            for rest in _cliques_within(nb, adj, size - 1):
                found.append(np.column_stack([np.full(len(rest), a), rest]))
    return found


def _clique_values(E: np.ndarray, cl: np.ndarray) -> np.ndarray:
    if cl.shape[0] == 0:
        return np.zeros(0)
    k = cl.shape[1]
    vals = np.zeros(cl.shape[0])
    for a in range(k):
        for b in range(a + 1, k):
            vals = np.maximum(vals, E[cl[:, a], cl[:, b]])
    return vals


def _union_find_h0(edges: np.ndarray, values: np.ndarray, m: int):
    """Degree-0 intervals and the set of edges that merge two components."""
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    bars = []
    merging = set()
    for (a, b), v in zip(edges.tolist(), values.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            bars.append((0.0, float(v)))
            merging.add((a, b))
    roots = sum(1 for x in range(m) if find(x) == x)
    bars.extend([(0.0, INF)] * roots)
    return bars, merging


class _KeyedComplex:
    """Integer keys for flag simplices that sort in filtration order.

    A ``q``-vertex simplex with value rank ``r`` and sorted vertices
    ``v_1 < ... < v_q`` gets ``r * m^q + sum v_c m^(q - c)``; ranks index the
    distinct edge values, so comparing keys compares ``(value, vertices)``.
    """

    def __init__(self, E: np.ndarray, adj: np.ndarray):
        self.adj = adj
        self.m = adj.shape[0]
        self.levels = np.unique(E[np.triu(adj, 1)])
        self.rank = np.searchsorted(self.levels, E).astype(np.int64)

    def encode(self, verts: np.ndarray, ranks: np.ndarray) -> np.ndarray:
        q = verts.shape[1]
        if (len(self.levels) + 1) * float(self.m) ** q >= 2**62:
            verts = verts.astype(object)
            ranks = ranks.astype(object)
        out = ranks * self.m**q
        for c in range(q):
            out = out + verts[:, c] * self.m ** (q - 1 - c)
        return out

    def value(self, key, q: int) -> float:
        return float(self.levels[int(key // self.m**q)])

    def coboundary(self, verts: np.ndarray, rank: int) -> np.ndarray:
        """Sorted keys of all cofaces of one simplex."""
        common = self.adj[verts[0]]
        for v in verts[1:]:
            common = common & self.adj[v]
        ks = np.flatnonzero(common)
        if ks.size == 0:
            return ks
        ranks = np.maximum(rank, self.rank[np.ix_(verts, ks)].max(axis=0))
        rows = np.sort(np.column_stack([np.broadcast_to(verts, (ks.size, verts.size)), ks]), axis=1)
        return np.sort(self.encode(rows, ranks))


def _cohomology_degree(simplices, cleared, cx: _KeyedComplex):
    """Reduce the coboundary matrix of one degree; returns bars and new pivots.

    Columns are taken in decreasing filtration order and the pivot of a column
    is its earliest coface. This is the anti-transpose of the boundary
    reduction, so the pairs coincide with those of homology.
    """
    q = simplices.shape[1]
    ranks = _simplex_ranks(simplices, cx)
    keys = cx.encode(simplices, ranks)
    order = np.argsort(keys, kind="stable")[::-1]
    owner: dict = {}
    bars = []
    pivots = set()
    for idx in order.tolist():
        if keys[idx] in cleared:
            continue
        value = float(cx.levels[ranks[idx]])
        col = cx.coboundary(simplices[idx], int(ranks[idx]))
        apparent = True
        while col.size:
            piv = col[0]
            other = owner.get(piv)
            if other is None:
                break
            if isinstance(other, int):
                # an apparent column stored by simplex index
                other = cx.coboundary(simplices[other], int(ranks[other]))
                owner[piv] = other
            col = np.setxor1d(col, other, assume_unique=True)
            apparent = False
        if col.size:
            piv = col[0]
            owner[piv] = idx if apparent else col
            pivots.add(piv)
            bars.append((value, cx.value(piv, q + 1)))
        else:
            bars.append((value, INF))
    return bars, pivots


def _simplex_ranks(simplices: np.ndarray, cx: _KeyedComplex) -> np.ndarray:
    q = simplices.shape[1]
    r = np.zeros(simplices.shape[0], dtype=np.int64)
    for a in range(q):
        for b in range(a + 1, q):
            r = np.maximum(r, cx.rank[simplices[:, a], simplices[:, b]])
    return r


@dataclass
class Barcode:
    """Intervals ``(birth, death)`` per homology degree; ``death`` may be ``inf``."""

    dims: dict[int, list[tuple[float, float]]] = field(default_factory=dict)

    def __getitem__(self, p: int) -> list[tuple[float, float]]:
        return self.dims.get(p, [])

    def lengths(self, p: int) -> np.ndarray:
        return np.array([d - b for b, d in self[p]])

    def longest(self, k: int, p: int | None = None) -> "Barcode":
        """Keep the ``k`` longest intervals of each degree (or only of degree ``p``)."""
        out = {}
        for q, bars in self.dims.items():
            if p is not None and q != p:
                out[q] = list(bars)
                continue
            order = sorted(range(len(bars)), key=lambda i: (-(bars[i][1] - bars[i][0]), bars[i][0], i))
            out[q] = [bars[i] for i in sorted(order[:k], key=lambda i: (bars[i][0], bars[i][1]))]
        return Barcode(out)

    def to_json(self) -> dict:
        return {
            "dims": {
                str(p): [[b, "inf" if math.isinf(d) else d] for b, d in bars]
                for p, bars in sorted(self.dims.items())
            }
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: Mapping) -> "Barcode":
        dims = {}
        for p, bars in obj["dims"].items():
            dims[int(p)] = [(float(b), INF if d == "inf" else float(d)) for b, d in bars]
        return cls(dims)

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        keys = set(self.dims) | set(other.dims)
        return all(sorted(self[p]) == sorted(other[p]) for p in keys)


def _facet_indices(filt: Filtration, p: int) -> np.ndarray:
    """Within-dimension indices of the facets of every ``p``-simplex."""
    lookup = {tuple(row): idx for idx, row in enumerate(filt.simplices[p - 1].tolist())}
    rows = filt.simplices[p].tolist()
    out = np.empty((len(rows), p + 1), dtype=np.int64)
    for r, row in enumerate(rows):
        for drop in range(p + 1):
            out[r, drop] = lookup[tuple(row[:drop] + row[drop + 1 :])]
    return out


def _reduce_boundary(facets: np.ndarray, skip: set[int]) -> dict[int, int]:
    """Column reduction over Z/2; returns ``{low face index: column index}``.

    Columns are Python integers used as bitsets, so the lowest entry is the
    highest set bit.
    """
    pivot_of: dict[int, int] = {}
    reduced: dict[int, int] = {}
    for j, faces in enumerate(facets.tolist()):
        if j in skip:
            continue
        col = 0
        for f in faces:
            col ^= 1 << f
        while col:
            other = pivot_of.get(col.bit_length() - 1)
            if other is None:
                break
            col ^= reduced[other]
        if col:
            pivot_of[col.bit_length() - 1] = j
            reduced[j] = col
    return pivot_of


def boundary_persistence_pairs(filt: Filtration) -> dict[int, list[tuple[int, int | None]]]:
    """Birth/death index pairs per degree from the boundary matrix (``None``: never dies).

    Degrees are reduced from the top down with clearing.
    """
    top = len(filt.simplices) - 1
    pivots: dict[int, dict[int, int]] = {}
    negative: dict[int, set[int]] = {0: set()}
    cleared: set[int] = set()
    for p in range(top, 0, -1):
        pivots[p] = _reduce_boundary(_facet_indices(filt, p), cleared)
        negative[p] = set(pivots[p].values())
        cleared = set(pivots[p])
    pairs = {}
    for q in range(filt.max_dim + 1):
        killer = pivots.get(q + 1, {})
        pairs[q] = [(s, killer.get(s)) for s in range(filt.simplices[q].shape[0]) if s not in negative[q]]
    return pairs


def _boundary_barcode(filt: Filtration) -> Barcode:
    pairs = boundary_persistence_pairs(filt)
    dims = {}
    for p in range(filt.max_dim + 1):
        births = filt.values[p]
        deaths = filt.values[p + 1] if p + 1 < len(filt.values) else None
        bars = []
        for b, d in pairs[p]:
            birth = float(births[b])
            death = INF if d is None else float(deaths[d])
            if p == 0 or death != birth:
                bars.append((birth, death))
        dims[p] = sorted(bars)
    return Barcode(dims)


def vietoris_rips_barcode(
    D: DistanceMatrix,
    max_dim: int = 1,
    max_scale: float = 1.0,
    *,
    cap: int | None = None,
    scale: str = "radius",
    algorithm: str = "coboundary",
) -> Barcode:
    """Persistent homology of the Rips filtration of ``D`` in degrees ``0..max_dim``.

    Zero-length intervals are dropped in degrees ``>= 1``; degree 0 keeps one
    interval per point. Classes alive at ``max_scale`` die at ``inf``.
    ``scale="distance"`` puts edges at ``d_ij`` instead of ``d_ij / 2``.

    ``algorithm="coboundary"`` reduces the anti-transposed boundary matrix with
    cofaces generated on demand; ``"boundary"`` materializes the filtration
    and reduces the boundary matrix itself. Both give the same pairs.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidInputError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if algorithm == "boundary":
        return _boundary_barcode(rips_filtration(D, max_dim, max_scale, cap, scale=scale))
    E, adj = _edge_setup(D, max_dim, max_scale, scale)
    cap = simplex_cap() if cap is None else cap
    m = D.m
    _check_cap(adj, max_dim + 1, cap)
    upper = np.triu(adj, 1)
    i, j = np.nonzero(upper)
    edges = np.column_stack([i, j]).astype(np.int64)
    ev = E[i, j]
    o = _order(edges, ev)
    edges, ev = edges[o], ev[o]
    h0, merging = _union_find_h0(edges, ev, m)
    dims: dict[int, list[tuple[float, float]]] = {0: sorted(h0)}
    cx = _KeyedComplex(E, adj)
    simp = edges
    tree = np.array(sorted(merging), dtype=np.int64).reshape(-1, 2)
    cleared = set(cx.encode(tree, _simplex_ranks(tree, cx)).tolist())
    for p in range(1, max_dim + 1):
        if p > 1:
            simp = _cliques(upper, adj, p + 1)
        bars, cleared = _cohomology_degree(simp, cleared, cx)
        dims[p] = sorted((b, d) for b, d in bars if d != b)
    return Barcode(dims)


@dataclass(frozen=True)
class NswParameters:
    d: int
    tau: float
    nu: float
    delta: float

    def __post_init__(self):
        if self.d < 1 or not self.tau > 0 or not self.nu > 0 or not 0 < self.delta < 1:
            raise InvalidInputError("need d >= 1, tau > 0, nu > 0 and 0 < delta < 1")


def nsw_bound(p: NswParameters | None = None, **kwargs) -> int:
    """Smallest sample size ``m > beta (ln beta + d + ln(1/delta))``, ``beta = 16^d tau^-d nu``."""
    p = NswParameters(**kwargs) if p is None else p
    if p.d > 17:
        warnings.warn("the sample-size bound assumes dimension at most 17", UserWarning, stacklevel=2)
    log_beta = p.d * math.log(16.0) - p.d * math.log(p.tau) + math.log(p.nu)
    beta = math.exp(log_beta)
    bound = beta * (log_beta + p.d + math.log(1.0 / p.delta))
    return int(math.floor(bound)) + 1
