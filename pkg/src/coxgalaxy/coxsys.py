"""
Coxeter matrices, complete Coxeter graphs and their canonical forms.

A Coxeter system is stored as a symmetric matrix of pairwise orders.  Finite
labels are plain ints; the order of an infinite dihedral pair is the singleton
``INF``, which deliberately refuses ordering comparisons with integers.  On the
wire (JSON) infinity is written as ``0``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "INF",
    "ONE",
    "CoxeterError",
    "MalformedInput",
    "InvalidMatrix",
    "CoxeterMatrix",
    "GalaxyVertex",
    "is_finite",
    "label_key",
    "parse_system",
    "dump_system",
    "canonical_form",
    "canonical_labeling",
    "canonical_matrix",
    "are_graph_isomorphic",
    "irreducible_components",
    "subsystem",
    "abelianization_rank",
    "triangle",
    "dihedral",
]


class CoxeterError(Exception):
    """Base class for errors raised by this package."""


class MalformedInput(CoxeterError):
    pass


class InvalidMatrix(CoxeterError):
    pass


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "∞"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ONE = 1


def is_finite(label) -> bool:
    return label is not INF


def label_key(label) -> int:
    """Integer key for sorting/encoding labels; infinity maps to 0."""
    return 0 if label is INF else int(label)


def _coerce_label(x):
    if x is INF or x == 0 or (isinstance(x, float) and math.isinf(x)):
        return INF
    if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
        raise InvalidMatrix(f"label {x!r} is not an integer")
    return int(x)


@dataclass(frozen=True)
class CoxeterMatrix:
    """A Coxeter matrix together with (opaque) generator names.

    ``m[i][j]`` is the order of ``s_i s_j``: ``1`` on the diagonal, an int
    ``>= 2`` or ``INF`` elsewhere.  Instances are immutable and hashable.
    """

    generators: tuple
    m: tuple

    def __post_init__(self):
        gens = tuple(str(g) for g in self.generators)
        rows = tuple(tuple(_coerce_label(x) for x in row) for row in self.m)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "m", rows)
        n = len(gens)
        if len(set(gens)) != n:
            raise InvalidMatrix("generator names must be distinct")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InvalidMatrix(f"matrix shape does not match {n} generators")
        for i in range(n):
            if rows[i][i] is INF or rows[i][i] != 1:
                raise InvalidMatrix(f"diagonal entry ({i},{i}) must be 1")
            for j in range(i + 1, n):
                a, b = rows[i][j], rows[j][i]
                if a is not b and (a is INF or b is INF or a != b):
                    raise InvalidMatrix(f"matrix not symmetric at ({i},{j})")
                if a is not INF and a < 2:
                    raise InvalidMatrix(f"off-diagonal label at ({i},{j}) must be >= 2")

    @classmethod
    def from_rows(cls, rows, generators=None) -> "CoxeterMatrix":
        """Build from integer rows; ``0`` (or ``INF``/``math.inf``) means infinity."""
        rows = [list(r) for r in rows]
        if generators is None:
            generators = [f"s{i}" for i in range(len(rows))]
        return cls(tuple(generators), tuple(tuple(r) for r in rows))

    @classmethod
    def from_edges(cls, n: int, edges: dict, default=2, generators=None) -> "CoxeterMatrix":
        """Build a rank-``n`` matrix; unspecified off-diagonal pairs get ``default``."""
        rows = [[1 if i == j else default for j in range(n)] for i in range(n)]
        for (i, j), lab in edges.items():
            rows[i][j] = rows[j][i] = lab
        return cls.from_rows(rows, generators)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def __getitem__(self, ij):
        i, j = ij
        return self.m[i][j]

    def __repr__(self):
        rows = ", ".join("[" + " ".join(str(x) for x in r) + "]" for r in self.m)
        return f"CoxeterMatrix({list(self.generators)}, {rows})"

    def index(self, name: str) -> int:
        return self.generators.index(name)

    def indices(self, names: Iterable[str]) -> frozenset:
        return frozenset(self.index(g) for g in names)

    def names(self, idx: Iterable[int]) -> list:
        return [self.generators[i] for i in sorted(idx)]

    def labels(self) -> list:
        """Off-diagonal labels in row-major upper-triangle order."""
        n = self.rank
        return [self.m[i][j] for i in range(n) for j in range(i + 1, n)]

    def label_multiset(self) -> tuple:
        return tuple(sorted(label_key(x) for x in self.labels()))

    def permute(self, order: Sequence[int]) -> "CoxeterMatrix":
        """Return the matrix whose i-th generator is ``self``'s ``order[i]``-th."""
        order = list(order)
        if sorted(order) != list(range(self.rank)):
            raise ValueError("order must be a permutation")
        gens = tuple(self.generators[k] for k in order)
        rows = tuple(tuple(self.m[a][b] for b in order) for a in order)
        return CoxeterMatrix(gens, rows)

    def rename(self, generators) -> "CoxeterMatrix":
        return CoxeterMatrix(tuple(generators), self.m)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "matrix": [[label_key(x) for x in row] for row in self.m],
        }


@dataclass(frozen=True, order=True)
class GalaxyVertex:
    """Canonical form of a complete Coxeter graph; ``rank`` is its layer."""

    canon: bytes
    rank: int = field(compare=False)

    @property
    def hex(self) -> str:
        return self.canon.hex()

    def __repr__(self):
        return f"GalaxyVertex(rank={self.rank}, canon={self.hex[:16]}...)"


# ---------------------------------------------------------------------------
# serialization


def parse_system(text) -> CoxeterMatrix:
    """Parse the JSON system format ``{"generators": [...], "matrix": [[...]]}``."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(str(exc)) from exc
    else:
        data = text
    if not isinstance(data, dict) or "matrix" not in data:
        raise MalformedInput("expected an object with a 'matrix' field")
    rows = data["matrix"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise MalformedInput("'matrix' must be a list of lists")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                raise MalformedInput(f"matrix entries must be integers, got {x!r}")
            if x < 0:
                raise InvalidMatrix(f"negative label {x}")
    gens = data.get("generators")
    if gens is None:
        gens = [f"s{i}" for i in range(len(rows))]
    if not isinstance(gens, list) or any(not isinstance(g, str) for g in gens):
        raise MalformedInput("'generators' must be a list of strings")
    if len(gens) != len(rows):
        raise InvalidMatrix(f"{len(gens)} generators but {len(rows)} matrix rows")
    return CoxeterMatrix.from_rows(rows, gens)


def dump_system(m: CoxeterMatrix, **kw) -> str:
    return json.dumps(m.to_dict(), **kw)


# ---------------------------------------------------------------------------
# canonical labeling (individualization/refinement with automorphism pruning)


def _refine(keys, colors):
    n = len(keys)
    ncls = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[u], keys[v][u]) for u in range(n) if u != v)))
            for v in range(n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [rank[s] for s in sigs]
        if len(rank) == ncls:
            return colors
        ncls = len(rank)


def _encode(keys, order):
    n = len(order)
    return tuple(keys[order[i]][order[j]] for i in range(n) for j in range(i + 1, n))


class _Orbits:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


@lru_cache(maxsize=200_000)
def _canonical_order(keys: tuple) -> tuple:
    n = len(keys)
    if n <= 1:
        return tuple(range(n))
    best = [None, None]  # encoding, order
    autos = []

    def leaf(colors):
        order = tuple(sorted(range(n), key=colors.__getitem__))
        enc = _encode(keys, order)
        if best[0] is None or enc < best[0]:
            best[0], best[1] = enc, order
        elif enc == best[0]:
            gamma = [0] * n
            for a, b in zip(best[1], order):
                gamma[a] = b
            autos.append(gamma)

    def search(colors, prefix):
        colors = _refine(keys, colors)
        if len(set(colors)) == n:
            leaf(colors)
            return
        cells = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = min(c for c, vs in cells.items() if len(vs) > 1)
        tried = []
        for v in cells[target]:
            if tried:
                orb = _Orbits(n)
                for g in autos:
                    if all(g[p] == p for p in prefix):
                        for x in range(n):
                            orb.union(x, g[x])
                if any(orb.find(v) == orb.find(u) for u in tried):
                    continue
            tried.append(v)
            new = [2 * c + 1 for c in colors]
            new[v] = 2 * colors[v]
            search(new, prefix + (v,))

    search([0] * n, ())
    return best[1]


def _keys(m: CoxeterMatrix) -> tuple:
    return tuple(tuple(label_key(x) for x in row) for row in m.m)


def canonical_labeling(m: CoxeterMatrix):
    """Return ``(vertex, order)``; ``m.permute(order)`` is the canonical representative."""
    keys = _keys(m)
    order = _canonical_order(keys)
    enc = _encode(keys, order)
    canon = struct.pack(f">I{len(enc)}I", m.rank, *enc)
    return GalaxyVertex(canon, m.rank), order


def canonical_form(m: CoxeterMatrix) -> GalaxyVertex:
    return canonical_labeling(m)[0]


def canonical_matrix(m: CoxeterMatrix) -> CoxeterMatrix:
    return m.permute(canonical_labeling(m)[1])


def vertex_from_hex(h: str) -> GalaxyVertex:
    canon = bytes.fromhex(h)
    return GalaxyVertex(canon, struct.unpack(">I", canon[:4])[0])


def are_graph_isomorphic(m1: CoxeterMatrix, m2: CoxeterMatrix):
    """Label-preserving bijection ``f`` (as a tuple, ``f[i]`` indexes ``m2``) or None."""
    if m1.rank != m2.rank:
        return None
    v1, o1 = canonical_labeling(m1)
    v2, o2 = canonical_labeling(m2)
    if v1.canon != v2.canon:
        return None
    f = [0] * m1.rank
    for a, b in zip(o1, o2):
        f[a] = b
    return tuple(f)


# ---------------------------------------------------------------------------
# sub-systems and simple invariants


def _components(n, adjacent) -> list:
    seen, comps = set(), []
    for start in range(n):
        if start in seen:
            continue
        comp, stack = {start}, [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            for y in range(n):
                if y not in seen and adjacent(x, y):
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


def irreducible_components(m: CoxeterMatrix, within=None) -> list:
    """Connected components of the Coxeter-Dynkin diagram (edges: label != 2)."""
    if within is None:
        return _components(m.rank, lambda i, j: i != j and m.m[i][j] != 2)
    verts = sorted(within)
    comps = _components(len(verts), lambda a, b: a != b and m.m[verts[a]][verts[b]] != 2)
    return [frozenset(verts[a] for a in c) for c in comps]


def subsystem(m: CoxeterMatrix, t) -> CoxeterMatrix:
    idx = sorted(t)
    for i in idx:
        if not 0 <= i < m.rank:
            raise IndexError(f"generator index {i} out of range")
    return CoxeterMatrix(
        tuple(m.generators[i] for i in idx),
        tuple(tuple(m.m[i][j] for j in idx) for i in idx),
    )


def abelianization_rank(m: CoxeterMatrix) -> int:
    """``r`` with ``W^ab = C_2^r``: components of the graph of odd finite labels."""
    def odd(i, j):
        x = m.m[i][j]
        return i != j and x is not INF and x % 2 == 1

    return len(_components(m.rank, odd))


# ---------------------------------------------------------------------------
# small constructors


def triangle(p, q, r, generators=("a", "b", "c")) -> CoxeterMatrix:
    """Triangle system: m(a,b)=p, m(b,c)=q, m(c,a)=r."""
    return CoxeterMatrix.from_edges(3, {(0, 1): p, (1, 2): q, (0, 2): r}, generators=generators)


def dihedral(k, generators=("a", "b")) -> CoxeterMatrix:
    return CoxeterMatrix.from_edges(2, {(0, 1): k}, generators=generators)
