"""
Vertical moves (blow-ups along pseudo-transpositions, blow-downs) and
horizontal moves (elementary twists) on Coxeter matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .classify import (
    SphericalType,
    basic_subsets,
    irreducible_spherical_subsets,
    _type_of,
)
from .coxsys import (
    INF,
    CoxeterError,
    CoxeterMatrix,
    GalaxyVertex,
    canonical_form,
    irreducible_components,
)
from .oracle import longest_word

__all__ = [
    "InvalidMove",
    "PseudoTransposition",
    "BlowDown",
    "TwistDescriptor",
    "MoveRecord",
    "find_pseudo_transpositions",
    "is_pseudo_transposition",
    "blow_up",
    "blow_up_words",
    "find_blow_downs",
    "blow_down",
    "blow_down_conditions",
    "enumerate_twists",
    "twist_permutation",
    "apply_twist",
    "twist_words",
    "is_twist_trivial",
    "is_twist_trivial_fast",
    "statistics",
    "apply_move",
    "all_moves",
]


class InvalidMove(CoxeterError):
    pass


def _perp(m: CoxeterMatrix, X) -> frozenset:
    return frozenset(s for s in range(m.rank) if s not in X and all(m.m[s][x] == 2 for x in X))


# ---------------------------------------------------------------------------
# pseudo-transpositions and blow-ups


@dataclass(frozen=True)
class PseudoTransposition:
    t: int
    J: frozenset
    v: int
    kind: str  # "B_odd" or "I2"

    def describe(self, m: CoxeterMatrix) -> dict:
        return {
            "t": m.generators[self.t],
            "v": m.generators[self.v],
            "J": m.names(self.J),
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, m: CoxeterMatrix, d: dict) -> "PseudoTransposition":
        try:
            return cls(m.index(d["t"]), m.indices(d["J"]), m.index(d["v"]), d["kind"])
        except (KeyError, ValueError) as exc:
            raise InvalidMove(f"bad pseudo-transposition payload: {exc}") from exc


def _outside_ok(m: CoxeterMatrix, t: int, J) -> bool:
    # every s outside J has m(s,t) = inf or commutes with all of J
    for s in range(m.rank):
        if s in J:
            continue
        if m.m[s][t] is INF:
            continue
        if any(m.m[s][u] != 2 for u in J):
            return False
    return True


def _b_paths(m: CoxeterMatrix, t: int, v: int):
    """Vertex sets of paths t-v-x3-...-xk with labels 4,3,3,... inducing type B_k, k odd."""
    n = m.rank
    out = []

    def extend(path):
        if len(path) % 2 == 1 and len(path) >= 3:
            out.append(frozenset(path))
        last = path[-1]
        for y in range(n):
            if y in path or m.m[last][y] != 3:
                continue
            if all(m.m[y][p] == 2 for p in path[:-1]):
                extend(path + [y])

    extend([t, v])
    return out


def is_pseudo_transposition(m: CoxeterMatrix, t: int, J) -> bool:
    """Direct check of the three defining conditions for ``t`` in ``J``."""
    J = frozenset(J)
    if t not in J or len(J) < 2:
        return False
    if not _outside_ok(m, t, J):
        return False
    if len(irreducible_components(m, J)) != 1:
        return False
    ty = _type_of(m, J)
    if ty is None:
        return False
    if ty.family == "I2":
        return ty.param % 2 == 0 and (ty.param // 2) % 2 == 1
    if ty.family == "B" and ty.rank % 2 == 1:
        partners = [u for u in J if u != t and m.m[t][u] != 2]
        return len(partners) == 1 and m.m[t][partners[0]] == 4
    return False


def find_pseudo_transpositions(m: CoxeterMatrix) -> list:
    """One pseudo-transposition per admissible ``J`` (the lowest valid ``t``)."""
    n = m.rank
    found = {}
    for t in range(n):
        for v in range(n):
            if v == t:
                continue
            lab = m.m[t][v]
            if lab is INF or lab == 2:
                continue
            if lab >= 6 and lab % 4 == 2:
                J = frozenset((t, v))
                if J not in found and _outside_ok(m, t, J):
                    found[J] = PseudoTransposition(t, J, v, "I2")
            elif lab == 4:
                for J in _b_paths(m, t, v):
                    if J not in found and _outside_ok(m, t, J):
                        found[J] = PseudoTransposition(t, J, v, "B_odd")
    return sorted(found.values(), key=lambda p: (sorted(p.J), p.t))


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def blow_up(m: CoxeterMatrix, pt: PseudoTransposition) -> CoxeterMatrix:
    """Replace ``t`` by ``tvt`` and append ``w_J``."""
    t, v, J = pt.t, pt.v, pt.J
    if not is_pseudo_transposition(m, t, J) or m.m[t][v] == 2 or v not in J:
        raise InvalidMove(f"{m.generators[t]} is not a pseudo-transposition in {m.names(J)}")
    n = m.rank
    w = n  # index of w_J in the new matrix; tvt keeps index t
    rows = [[None] * (n + 1) for _ in range(n + 1)]
    for a in range(n + 1):
        rows[a][a] = 1
    for a in range(n):
        for b in range(n):
            if a != b and a != t and b != t:
                rows[a][b] = m.m[a][b]

    def put(a, b, lab):
        rows[a][b] = rows[b][a] = lab

    put(t, v, m.m[t][v] // 2)
    for y in J:
        if y not in (t, v):
            put(t, y, m.m[v][y])
    put(w, t, 2)
    for y in J:
        if y != t:
            put(w, y, 2)
    for y in range(n):
        if y in J:
            continue
        lab = INF if m.m[t][y] is INF else 2
        put(t, y, lab)
        put(w, y, lab)
    names = list(m.generators)
    taken = set(names)
    tn, vn = m.generators[t], m.generators[v]
    names[t] = _fresh(f"{tn}{vn}{tn}" if len(tn) == len(vn) == 1 else f"{tn}+{vn}+{tn}", taken)
    taken.add(names[t])
    names.append(_fresh("w_" + "".join(m.names(J)) if all(len(g) == 1 for g in m.generators) else "w_" + "+".join(m.names(J)), taken))
    return CoxeterMatrix.from_rows(rows, names)


def blow_up_words(m: CoxeterMatrix, pt: PseudoTransposition) -> list:
    """Words in ``m``'s generators for the generators of ``blow_up(m, pt)``."""
    words = [(i,) for i in range(m.rank)]
    words[pt.t] = (pt.t, pt.v, pt.t)
    words.append(longest_word(m, pt.J))
    return words


# ---------------------------------------------------------------------------
# blow-downs


@dataclass(frozen=True)
class BlowDown:
    """Merge ``x`` (playing ``tvt``) and ``w`` (playing ``w_J``) into one generator."""

    x: int
    w: int
    v: int

    def describe(self, m: CoxeterMatrix) -> dict:
        return {"x": m.generators[self.x], "w": m.generators[self.w], "v": m.generators[self.v]}

    @classmethod
    def from_dict(cls, m: CoxeterMatrix, d: dict) -> "BlowDown":
        try:
            return cls(m.index(d["x"]), m.index(d["w"]), m.index(d["v"]))
        except (KeyError, ValueError) as exc:
            raise InvalidMove(f"bad blow-down payload: {exc}") from exc


def _merge(m: CoxeterMatrix, bd: BlowDown, Jp) -> tuple:
    """Candidate lower system and the index of the merged generator in it."""
    x, w, v = bd.x, bd.w, bd.v
    keep = [i for i in range(m.rank) if i != w]
    pos = {old: new for new, old in enumerate(keep)}
    n = len(keep)
    rows = [[m.m[a][b] for b in keep] for a in keep]
    t = pos[x]
    xv = m.m[x][v]
    if xv is INF:
        return None
    for y in keep:
        if y == x:
            continue
        if y == v:
            lab = 2 * xv
        elif y in Jp:
            lab = 2
        else:
            lab = m.m[x][y]
        rows[t][pos[y]] = rows[pos[y]][t] = lab
    names = [m.generators[i] for i in keep]
    xn = names[t]
    parts = xn.split("+")
    if len(parts) == 3 and parts[0] == parts[2]:
        base = parts[0]
    elif len(xn) == 3 and xn[0] == xn[2]:
        base = xn[0]
    else:
        base = xn + "~"
    names[t] = _fresh(base, set(names) - {xn})
    return CoxeterMatrix.from_rows(rows, names), t, pos[v]


def _blow_down_candidates(m: CoxeterMatrix):
    n = m.rank
    for w in range(n):
        if any(m.m[w][y] not in (2, INF) for y in range(n) if y != w):
            continue
        P = frozenset(y for y in range(n) if y != w and m.m[w][y] == 2)
        for x in sorted(P):
            if any(m.m[x][y] != m.m[w][y] for y in range(n) if y not in P and y not in (x, w)):
                continue
            comp = next(c for c in irreducible_components(m, P) if x in c)
            if len(comp) < 2:
                continue
            for v in sorted(comp - {x}):
                yield BlowDown(x, w, v), comp


def blow_down(m: CoxeterMatrix, bd: BlowDown) -> CoxeterMatrix:
    """Apply a blow-down; raises InvalidMove unless it inverts a blow-up."""
    P = frozenset(y for y in range(m.rank) if y != bd.w and m.m[bd.w][y] == 2)
    comps = [c for c in irreducible_components(m, P) if bd.x in c]
    if not comps or bd.v not in comps[0]:
        raise InvalidMove("x and v are not in one component of w's commuting set")
    got = _verified_blow_down(m, bd, comps[0], canonical_form(m))
    if got is None:
        raise InvalidMove("merge does not invert any blow-up")
    return got[0]


def _verified_blow_down(m, bd, comp, target_canon):
    cand = _merge(m, bd, comp)
    if cand is None:
        return None
    low, t, v = cand
    for pt in find_pseudo_transpositions(low):
        if pt.t == t and pt.v == v and canonical_form(blow_up(low, pt)) == target_canon:
            return low, pt
    return None


def _chordless_cycle_through(m: CoxeterMatrix, x: int, y: int) -> bool:
    """Induced cycle of length >= 4 through the edge {x, y} of the defining graph."""
    n = m.rank

    def fin(a, b):
        return m.m[a][b] is not INF

    if not fin(x, y):
        return False

    def dfs(path):
        last = path[-1]
        for z in range(n):
            if z in path or z == y or not fin(last, z):
                continue
            if any(fin(z, p) for p in path[:-1]):
                continue
            if fin(z, y):
                # z closes the cycle; it needs at least two predecessors
                if len(path) >= 2:
                    return True
                continue
            if dfs(path + [z]):
                return True
        return False

    return dfs([x])


def blow_down_conditions(m: CoxeterMatrix) -> list:
    """Pairs ``(B, r)`` meeting the three necessary conditions for a smaller generating set."""
    out = []
    n = m.rank
    for basic in basic_subsets(m):
        ty = basic.type
        B = basic.members
        if ty.dihedral_param and ty.dihedral_param % 2 == 1:
            x, y = sorted(B)
        elif ty.d_rank and ty.d_rank % 2 == 1:
            ends = _fork_leaves(m, B)
            if ends is None:
                continue
            x, y = ends
        else:
            continue
        Bp = _perp(m, B)
        for r in sorted(Bp):
            ok = all(
                s in B or s in Bp and m.m[s][r] == 2
                for s in range(n)
                if s != r and m.m[s][r] is not INF
            )
            if not ok:
                continue
            both = {s for s in range(n) if m.m[s][x] is not INF and m.m[s][y] is not INF}
            if both != set(B | Bp):
                continue
            if _chordless_cycle_through(m, x, y):
                continue
            out.append((B, r))
    return out


def _fork_leaves(m, B):
    """The two leaves at the split end of a D_n (or A3 = D3) diagram."""
    B = sorted(B)
    deg = {b: [c for c in B if c != b and m.m[b][c] != 2] for b in B}
    if len(B) == 3:
        mid = next(b for b in B if len(deg[b]) == 2)
        return tuple(sorted(deg[mid]))
    branch = [b for b in B if len(deg[b]) == 3]
    if len(branch) != 1:
        return None
    leaves = [c for c in deg[branch[0]] if len(deg[c]) == 1]
    if len(leaves) < 2:
        return None
    if len(leaves) == 3:  # D4 is excluded by parity
        return None
    return tuple(sorted(leaves))


def find_blow_downs(m: CoxeterMatrix, prefilter: bool = True) -> list:
    """All distinct lower neighbours reached by inverting a blow-up.

    Returns ``MoveRecord`` values (kind ``BlowDown``), one per target canonical
    form, each verified by blowing the target back up.
    """
    if prefilter and not blow_down_conditions(m):
        return []
    src = canonical_form(m)
    seen = {}
    for bd, comp in _blow_down_candidates(m):
        got = _verified_blow_down(m, bd, comp, src)
        if got is None:
            continue
        low, pt = got
        tgt = canonical_form(low)
        if tgt in seen:
            continue
        payload = bd.describe(m)
        payload["inverse"] = pt.describe(low)
        seen[tgt] = MoveRecord("BlowDown", payload, src, tgt)
    return list(seen.values())


# ---------------------------------------------------------------------------
# twists


@dataclass(frozen=True)
class TwistDescriptor:
    J: frozenset
    A: frozenset
    B: frozenset

    def describe(self, m: CoxeterMatrix) -> dict:
        return {"J": m.names(self.J), "A": m.names(self.A), "B": m.names(self.B)}

    @classmethod
    def from_dict(cls, m: CoxeterMatrix, d: dict) -> "TwistDescriptor":
        try:
            return cls(m.indices(d["J"]), m.indices(d["A"]), m.indices(d["B"]))
        except (KeyError, ValueError) as exc:
            raise InvalidMove(f"bad twist payload: {exc}") from exc


def _finite_components(m, verts):
    verts = sorted(verts)
    comps, seen = [], set()
    for s in verts:
        if s in seen:
            continue
        comp, stack = {s}, [s]
        seen.add(s)
        while stack:
            a = stack.pop()
            for b in verts:
                if b not in seen and m.m[a][b] is not INF:
                    seen.add(b)
                    comp.add(b)
                    stack.append(b)
        comps.append(frozenset(comp))
    return comps


def _spherical_irreducible(m):
    out = [frozenset((i,)) for i in range(m.rank)]
    out.extend(irreducible_spherical_subsets(m))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def enumerate_twists(m: CoxeterMatrix, include_trivial: bool = False) -> list:
    """Elementary twist descriptors ``(J, A, B)``.

    By default descriptors that are trivial for structural reasons (``|J| = 1``,
    ``w_J`` central, ``A`` or ``B`` empty) are left out.
    """
    out = []
    for J in _spherical_irreducible(m):
        if not include_trivial:
            if len(J) == 1 or _type_of(m, J).longest_central:
                continue
        rest = [s for s in range(m.rank) if s not in J and s not in _perp(m, J)]
        comps = _finite_components(m, rest)
        for bits in product((0, 1), repeat=len(comps)):
            A = frozenset().union(*[c for c, b in zip(comps, bits) if b == 0])
            B = frozenset().union(*[c for c, b in zip(comps, bits) if b == 1])
            if not include_trivial and (not A or not B):
                continue
            out.append(TwistDescriptor(J, A, B))
    return out


def _path(m, J):
    J = sorted(J)
    nb = {a: [b for b in J if b != a and m.m[a][b] != 2] for a in J}
    start = min(a for a in J if len(nb[a]) <= 1)
    path = [start]
    while len(path) < len(J):
        path.append(next(b for b in nb[path[-1]] if b not in path))
    return path, nb


def twist_permutation(m: CoxeterMatrix, J) -> dict:
    """Permutation of ``J`` induced by conjugation with ``w_J``."""
    J = frozenset(J)
    ty = _type_of(m, J)
    if ty is None or len(irreducible_components(m, J)) != 1:
        raise InvalidMove(f"{m.names(J)} is not irreducible spherical")
    pi = {j: j for j in J}
    if ty.longest_central:
        return pi
    if ty.family in ("A", "I2"):
        path, _ = _path(m, J)
        for a, b in zip(path, reversed(path)):
            pi[a] = b
        return pi
    nb = {a: [b for b in J if b != a and m.m[a][b] != 2] for a in J}
    branch = next(a for a in J if len(nb[a]) == 3)
    arms = []
    for start in nb[branch]:
        arm, prev, cur = [start], branch, start
        while len(nb[cur]) == 2:
            prev, cur = cur, next(x for x in nb[cur] if x != prev)
            arm.append(cur)
        arms.append(arm)
    if ty.family == "D":
        a, b = [arm for arm in arms if len(arm) == 1]
    else:  # E6: swap the two arms of length 2
        a, b = [arm for arm in arms if len(arm) == 2]
    for p, q in zip(a, b):
        pi[p], pi[q] = q, p
    return pi


def _check_twist(m: CoxeterMatrix, tw: TwistDescriptor):
    J, A, B = tw.J, tw.A, tw.B
    if not J or A & B:
        raise InvalidMove("J must be nonempty and A, B disjoint")
    if len(irreducible_components(m, J)) != 1 or _type_of(m, J) is None:
        raise InvalidMove(f"{m.names(J)} is not irreducible spherical")
    rest = frozenset(range(m.rank)) - J - _perp(m, J)
    if A | B != rest:
        raise InvalidMove("A and B must partition the complement of J and its perp")
    if any(m.m[a][b] is not INF for a in A for b in B):
        raise InvalidMove("edges between A and B must all be infinite")


def apply_twist(m: CoxeterMatrix, tw: TwistDescriptor) -> CoxeterMatrix:
    """Twisted matrix; position ``b`` in ``B`` now holds ``w_J b w_J``."""
    _check_twist(m, tw)
    pi = twist_permutation(m, tw.J)
    rows = [list(r) for r in m.m]
    for b in tw.B:
        for j in tw.J:
            rows[b][j] = rows[j][b] = m.m[b][pi[j]]
    names = list(m.generators)
    taken = set(names)
    for b in sorted(tw.B):
        names[b] = _fresh(names[b] + "^w", taken)
        taken.add(names[b])
    return CoxeterMatrix.from_rows(rows, names)


def twist_words(m: CoxeterMatrix, tw: TwistDescriptor) -> list:
    """Words for the generators of ``apply_twist(m, tw)`` in ``m``'s generators."""
    wj = longest_word(m, tw.J)
    words = []
    for s in range(m.rank):
        if s in tw.B:
            words.append(wj + (s,) + tuple(reversed(wj)))
        else:
            words.append((s,))
    return words


def is_twist_trivial_fast(m: CoxeterMatrix, tw: TwistDescriptor) -> bool:
    """Structural sufficient conditions for triviality."""
    return len(tw.J) == 1 or not tw.A or not tw.B or _type_of(m, tw.J).longest_central


def is_twist_trivial(m: CoxeterMatrix, tw: TwistDescriptor) -> bool:
    if is_twist_trivial_fast(m, tw):
        _check_twist(m, tw)
        return True
    return canonical_form(apply_twist(m, tw)) == canonical_form(m)


# ---------------------------------------------------------------------------
# statistics and move records


def statistics(m: CoxeterMatrix) -> tuple:
    """``(u, d, p)``: blow-ups, blow-downs, and parabolics of the listed types."""
    u = len(find_pseudo_transpositions(m))
    d = len(find_blow_downs(m))
    p = sum(1 for ty in irreducible_spherical_subsets(m).values() if _counts_for_p(ty))
    return u, d, p


def _counts_for_p(ty: SphericalType) -> bool:
    if ty.family == "B":
        return ty.rank % 2 == 1
    if ty.d_rank:
        return ty.d_rank % 2 == 1
    k = ty.dihedral_param
    if k:
        return k % 2 == 1 or k % 4 == 2 and k >= 6
    return False


@dataclass(frozen=True)
class MoveRecord:
    """One move: ``payload`` names generators of the source representative."""

    kind: str  # BlowUp | BlowDown | Twist | Composite
    payload: dict
    source: GalaxyVertex
    target: GalaxyVertex

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "source": self.source.hex,
            "target": self.target.hex,
        }

    def reversed(self) -> "MoveRecord":
        kind = {"BlowUp": "BlowDown", "BlowDown": "BlowUp"}.get(self.kind, self.kind)
        return MoveRecord(kind, {"reverse_of": self.kind, **self.payload}, self.target, self.source)


def apply_move(m: CoxeterMatrix, kind: str, payload: dict) -> CoxeterMatrix:
    """Re-apply a move described by names of ``m``'s generators."""
    if kind == "BlowUp":
        return blow_up(m, PseudoTransposition.from_dict(m, payload))
    if kind == "BlowDown":
        return blow_down(m, BlowDown.from_dict(m, payload))
    if kind == "Twist":
        return apply_twist(m, TwistDescriptor.from_dict(m, payload))
    raise InvalidMove(f"unknown move kind {kind!r}")


def all_moves(m: CoxeterMatrix, include_trivial_twists: bool = False) -> list:
    """``(record, result_matrix)`` for every blow-up, blow-down and twist of ``m``."""
    src = canonical_form(m)
    out = []
    for pt in find_pseudo_transpositions(m):
        up = blow_up(m, pt)
        out.append((MoveRecord("BlowUp", pt.describe(m), src, canonical_form(up)), up))
    for rec in find_blow_downs(m):
        low = blow_down(m, BlowDown.from_dict(m, rec.payload))
        out.append((rec, low))
    for tw in enumerate_twists(m):
        tm = apply_twist(m, tw)
        tgt = canonical_form(tm)
        if tgt != src or include_trivial_twists:
            out.append((MoveRecord("Twist", tw.describe(m), src, tgt), tm))
    return out
