"""
Spherical type recognition, basic subsets, visible splittings and the
basic-matching compatibility filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .coxsys import (
    INF,
    CoxeterError,
    CoxeterMatrix,
    irreducible_components,
)

__all__ = [
    "NotIrreducible",
    "SphericalType",
    "BasicSubset",
    "Compatible",
    "Incompatible",
    "spherical_type",
    "is_spherical",
    "group_order",
    "type_multiset",
    "irreducible_spherical_subsets",
    "basic_subsets",
    "is_directly_decomposable_irreducible",
    "visible_splittings",
    "matching_filter",
    "types_match",
    "expanded_label_filter",
]


class NotIrreducible(CoxeterError):
    pass


_EXCEPTIONAL_ORDERS = {
    "E6": 51840,
    "E7": 2903040,
    "E8": 696729600,
    "F4": 1152,
    "H3": 120,
    "H4": 14400,
}


@dataclass(frozen=True, order=True)
class SphericalType:
    family: str  # A, B, D, E6, E7, E8, F4, H3, H4, I2
    rank: int
    param: int = 0  # dihedral order parameter, I2 only

    def __post_init__(self):
        f, n = self.family, self.rank
        ok = (
            (f == "A" and n >= 1)
            or (f == "B" and n >= 2)
            or (f == "D" and n >= 4)
            or (f in _EXCEPTIONAL_ORDERS and n == int(f[1]))
            or (f == "I2" and n == 2 and self.param >= 5)
        )
        if not ok:
            raise ValueError(f"not a spherical type: {self.family} {self.rank} {self.param}")

    @classmethod
    def dihedral(cls, k: int) -> "SphericalType":
        if k == 3:
            return cls("A", 2)
        if k == 4:
            return cls("B", 2)
        return cls("I2", 2, k)

    @property
    def name(self) -> str:
        if self.family == "I2":
            return f"I2({self.param})"
        if self.family in _EXCEPTIONAL_ORDERS:
            return self.family
        return f"{self.family}{self.rank}"

    def __str__(self):
        return self.name

    @property
    def order(self) -> int:
        f, n = self.family, self.rank
        if f == "A":
            return math.factorial(n + 1)
        if f == "B":
            return 2**n * math.factorial(n)
        if f == "D":
            return 2 ** (n - 1) * math.factorial(n)
        if f == "I2":
            return 2 * self.param
        return _EXCEPTIONAL_ORDERS[f]

    # The matching theorem pairs D_{2k+1} with B_{2k+1} and I2(2k+1) with
    # I2(4k+2); D3 and I2(3) are stored under their A names.
    @property
    def dihedral_param(self):
        if self.family == "I2":
            return self.param
        if self.family == "A" and self.rank == 2:
            return 3
        if self.family == "B" and self.rank == 2:
            return 4
        return None

    @property
    def d_rank(self):
        if self.family == "D":
            return self.rank
        if self.family == "A" and self.rank == 3:
            return 3
        return None

    @property
    def longest_central(self) -> bool:
        """Whether the longest element is central (diagram involution trivial)."""
        if self.family == "A":
            return self.rank == 1
        if self.family == "D":
            return self.rank % 2 == 0
        if self.family == "E6":
            return False
        if self.family == "I2":
            return self.param % 2 == 0
        return True


@dataclass(frozen=True)
class BasicSubset:
    members: frozenset
    type: SphericalType


# ---------------------------------------------------------------------------
# recognition by diagram shape


def _recognize(m: CoxeterMatrix, verts) -> SphericalType | None:
    verts = sorted(verts)
    n = len(verts)
    if n == 1:
        return SphericalType("A", 1)
    edges = []
    for a, b in combinations(verts, 2):
        lab = m.m[a][b]
        if lab is INF:
            return None
        if lab != 2:
            edges.append((a, b, lab))
    if n == 2:
        return SphericalType.dihedral(edges[0][2])
    if len(edges) != n - 1 or any(lab >= 6 for _, _, lab in edges):
        return None
    nbrs = {v: {} for v in verts}
    for a, b, lab in edges:
        nbrs[a][b] = lab
        nbrs[b][a] = lab
    degs = {v: len(nbrs[v]) for v in verts}
    if max(degs.values()) > 3:
        return None
    branch = [v for v in verts if degs[v] == 3]
    if len(branch) > 1:
        return None
    if branch:
        if any(lab != 3 for _, _, lab in edges):
            return None
        c = branch[0]
        arms = []
        for start in nbrs[c]:
            length, prev, cur = 1, c, start
            while degs[cur] == 2:
                prev, cur = cur, next(x for x in nbrs[cur] if x != prev)
                length += 1
            arms.append(length)
        arms = tuple(sorted(arms))
        if arms[:2] == (1, 1):
            return SphericalType("D", n)
        return {
            (1, 2, 2): SphericalType("E6", 6),
            (1, 2, 3): SphericalType("E7", 7),
            (1, 2, 4): SphericalType("E8", 8),
        }.get(arms)
    path = _path_order(nbrs, verts)
    labs = [nbrs[path[i]][path[i + 1]] for i in range(n - 1)]
    odd = [(i, x) for i, x in enumerate(labs) if x != 3]
    if not odd:
        return SphericalType("A", n)
    if len(odd) > 1:
        return None
    pos, lab = odd[0]
    at_end = pos in (0, n - 2)
    if lab == 4:
        if at_end:
            return SphericalType("B", n)
        if n == 4:
            return SphericalType("F4", 4)
        return None
    if lab == 5 and at_end and n in (3, 4):
        return SphericalType(f"H{n}", n)
    return None


def _path_order(nbrs, verts):
    start = next(v for v in verts if len(nbrs[v]) == 1)
    path = [start]
    while len(path) < len(verts):
        nxt = [x for x in nbrs[path[-1]] if x not in path]
        path.append(nxt[0])
    return path


@lru_cache(maxsize=100_000)
def _type_of(m: CoxeterMatrix, comp: frozenset):
    return _recognize(m, comp)


def spherical_type(m: CoxeterMatrix, component) -> SphericalType | None:
    """Classical type of one irreducible component, or None if it is infinite."""
    comp = frozenset(component)
    if not comp:
        raise NotIrreducible("empty generator set")
    if len(irreducible_components(m, comp)) != 1:
        raise NotIrreducible(f"{m.names(comp)} spans several Dynkin components")
    return _type_of(m, comp)


def type_multiset(m: CoxeterMatrix, within=None):
    """Sorted tuple of component types, or None if some component is infinite."""
    out = []
    for comp in irreducible_components(m, within):
        t = _type_of(m, comp)
        if t is None:
            return None
        out.append(t)
    return tuple(sorted(out))


def is_spherical(m: CoxeterMatrix, within=None) -> bool:
    return type_multiset(m, within) is not None


def group_order(m: CoxeterMatrix, within=None):
    types = type_multiset(m, within)
    if types is None:
        return None
    return math.prod(t.order for t in types)


# ---------------------------------------------------------------------------
# basic subsets


@lru_cache(maxsize=20_000)
def irreducible_spherical_subsets(m: CoxeterMatrix) -> dict:
    """All Dynkin-connected spherical subsets of size >= 2, mapped to their type."""
    n = m.rank
    found = {}
    frontier = []
    for i in range(n):
        for j in range(i + 1, n):
            if m.m[i][j] != 2 and m.m[i][j] is not INF:
                s = frozenset((i, j))
                found[s] = _type_of(m, s)
                frontier.append(s)
    while frontier:
        nxt = []
        for s in frontier:
            for y in range(n):
                if y in s or all(m.m[y][x] == 2 for x in s):
                    continue
                t = s | {y}
                if t in found:
                    continue
                ty = _type_of(m, t)
                if ty is not None:
                    found[t] = ty
                    nxt.append(t)
        frontier = nxt
    return found


def basic_subsets(m: CoxeterMatrix) -> list:
    """Maximal irreducible noncyclic spherical subsets, sorted by members."""
    cand = irreducible_spherical_subsets(m)
    out = [
        BasicSubset(s, t)
        for s, t in cand.items()
        if not any(s < other for other in cand)
    ]
    return sorted(out, key=lambda b: sorted(b.members))


def is_directly_decomposable_irreducible(m: CoxeterMatrix) -> bool:
    comps = irreducible_components(m)
    if len(comps) != 1:
        raise NotIrreducible("system is reducible")
    t = _type_of(m, comps[0])
    if t is None:
        return False
    if t.family == "B":
        return t.rank % 2 == 1
    if t.family == "I2":
        return t.param % 4 == 2
    return t.family in ("E7", "H3")


# ---------------------------------------------------------------------------
# splittings


def visible_splittings(m: CoxeterMatrix) -> list:
    """All ``(S1, S2, T)`` giving an amalgam ``W_S1 *_{W_T} W_S2`` with T spherical.

    Each unordered pair {S1, S2} is reported once, with ``S1 \\ T`` holding the
    smallest generator outside ``T``.
    """
    n = m.rank
    out = []
    for size in range(n - 1):
        for T in combinations(range(n), size):
            T = frozenset(T)
            if T and not is_spherical(m, T):
                continue
            rest = [x for x in range(n) if x not in T]
            comps = _finite_label_components(m, rest)
            if len(comps) < 2:
                continue
            first, others = comps[0], comps[1:]
            for mask in range(2 ** len(others) - 1):
                side1 = set(first)
                for k, c in enumerate(others):
                    if mask >> k & 1:
                        side1 |= c
                side2 = set(rest) - side1
                out.append((frozenset(side1 | T), frozenset(side2 | T), T))
    return out


def _finite_label_components(m, verts):
    verts = sorted(verts)
    seen, comps = set(), []
    for v in verts:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y in verts:
                if y not in seen and m.m[x][y] is not INF:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


# ---------------------------------------------------------------------------
# basic matching filter


@dataclass(frozen=True)
class Compatible:
    pairs: tuple = ()

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Incompatible:
    witness: SphericalType
    side: int  # 1 or 2: which system the unmatched type belongs to

    def __bool__(self):
        return False


def types_match(t1: SphericalType, t2: SphericalType) -> bool:
    if t1 == t2:
        return True
    d1, d2 = t1.dihedral_param, t2.dihedral_param
    if d1 and d2:
        lo, hi = sorted((d1, d2))
        return lo % 2 == 1 and hi == 2 * lo
    for a, b in ((t1, t2), (t2, t1)):
        if a.d_rank and b.family == "B" and a.d_rank == b.rank and b.rank % 2 == 1:
            return True
    return False


def _max_matching(left, right):
    match_r = [-1] * len(right)

    def augment(i, seen):
        for j, t in enumerate(right):
            if j in seen or not types_match(left[i], t):
                continue
            seen.add(j)
            if match_r[j] == -1 or augment(match_r[j], seen):
                match_r[j] = i
                return True
        return False

    for i in range(len(left)):
        augment(i, set())
    return match_r


def matching_filter(m1: CoxeterMatrix, m2: CoxeterMatrix):
    """Necessary condition for ``W1 ~= W2`` from matchings of basic subsets.

    Compatible iff the basic-subset types can be paired bijectively, each pair
    equal or one of {D_{2k+1}, B_{2k+1}}, {I2(2k+1), I2(4k+2)}.  An
    Incompatible result certifies the groups are not isomorphic.
    """
    left = [b.type for b in basic_subsets(m1)]
    right = [b.type for b in basic_subsets(m2)]
    match_r = _max_matching(left, right)
    matched_left = {i for i in match_r if i != -1}
    if len(matched_left) == len(left) == len(right):
        pairs = tuple(sorted((left[i].name, right[j].name) for j, i in enumerate(match_r)))
        return Compatible(pairs)
    for i, t in enumerate(left):
        if i not in matched_left:
            return Incompatible(t, 1)
    j = next(j for j, i in enumerate(match_r) if i == -1)
    return Incompatible(right[j], 2)


def expanded_label_filter(m1: CoxeterMatrix, m2: CoxeterMatrix, expanded1: bool, expanded2: bool):
    """Necessary condition from maximal-rank systems.

    An expanded system (no pseudo-transposition) has maximal rank for its group,
    and two maximal-rank systems of one group share their multiset of labels.
    Returns a reason string if the pair is ruled out, else None.
    """
    if expanded1 and expanded2:
        if m1.rank != m2.rank:
            return f"both expanded with different ranks {m1.rank} != {m2.rank}"
        if m1.label_multiset() != m2.label_multiset():
            return "both expanded with different label multisets"
    elif expanded1 and m2.rank > m1.rank:
        return f"first system is expanded of rank {m1.rank} < {m2.rank}"
    elif expanded2 and m1.rank > m2.rank:
        return f"second system is expanded of rank {m2.rank} < {m1.rank}"
    return None
