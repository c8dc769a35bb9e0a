"""
Exploration of galaxy fragments, vertical cores and spines, starlets, and the
isomorphism decision pipeline.

A connected component of the galaxy is a simplex: any two vertices in it
describe the same group and are therefore adjacent.  Exploration discovers
vertices through explicit moves; the remaining edges between vertices of one
discovered component are reported as ``Composite`` records whose payload is the
chain of moves realising them.
"""

from __future__ import annotations

import math
import os
import time
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from . import classify, moves, oracle
from .coxsys import (
    INF,
    CoxeterError,
    CoxeterMatrix,
    GalaxyVertex,
    abelianization_rank,
    canonical_form,
)

__all__ = [
    "Budget",
    "BudgetExceeded",
    "DuplicateParameter",
    "RankTooLarge",
    "FragmentVertex",
    "GalaxyFragment",
    "SpineForest",
    "explore",
    "vertical_core",
    "spine",
    "starlet",
    "iso_rank_le3",
    "Isomorphic",
    "NonIsomorphic",
    "Unknown",
    "decide_isomorphic",
    "ALL_MOVES",
]

ALL_MOVES = frozenset({"BlowUp", "BlowDown", "Twist"})


class BudgetExceeded(CoxeterError):
    def __init__(self, msg, fragment=None):
        super().__init__(msg)
        self.fragment = fragment


class DuplicateParameter(CoxeterError):
    pass


class RankTooLarge(CoxeterError):
    pass


def _env_vertices(default=10_000):
    raw = os.environ.get("COXGALAXY_BUDGET_VERTICES")
    if not raw:
        return default
    try:
        val = int(raw)
    except ValueError:
        return default
    return val if val > 0 else default


@dataclass(frozen=True)
class Budget:
    max_vertices: int = field(default_factory=_env_vertices)
    max_rank: int = 16
    time_limit: float = 60.0
    max_moves_per_vertex: int | None = None

    def __post_init__(self):
        for name in ("max_vertices", "max_rank", "time_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_moves_per_vertex is not None and self.max_moves_per_vertex <= 0:
            raise ValueError("max_moves_per_vertex must be positive")


@dataclass
class FragmentVertex:
    vertex: GalaxyVertex
    representative: CoxeterMatrix
    component: int

    @property
    def layer(self) -> int:
        return self.vertex.rank


@dataclass
class GalaxyFragment:
    """Explored vertices (keyed by canonical form) and the moves joining them.

    ``moves`` holds one record per unordered vertex pair joined by an explicit
    move.  ``core`` marks a vertical core, where edges of height > 1 are absent.
    """

    seed: GalaxyVertex
    vertices: dict = field(default_factory=dict)  # GalaxyVertex -> FragmentVertex
    moves: dict = field(default_factory=dict)  # frozenset({u, v}) -> MoveRecord
    truncated: bool = False
    diagnostics: list = field(default_factory=list)
    core: bool = False

    # -- basic queries -------------------------------------------------------

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        if isinstance(v, CoxeterMatrix):
            v = canonical_form(v)
        return v in self.vertices

    def layers(self) -> list:
        return sorted({v.rank for v in self.vertices})

    def layer_counts(self) -> dict:
        out = {}
        for v in self.vertices:
            out[v.rank] = out.get(v.rank, 0) + 1
        return dict(sorted(out.items()))

    def components(self) -> list:
        comps = {}
        for v, fv in self.vertices.items():
            comps.setdefault(fv.component, []).append(v)
        return [sorted(vs) for _, vs in sorted(comps.items())]

    def _adjacent(self, u, v) -> bool:
        if u == v or self.vertices[u].component != self.vertices[v].component:
            return False
        return not self.core or abs(u.rank - v.rank) <= 1

    # -- edges ---------------------------------------------------------------

    def _move_path(self, u, v) -> list:
        """Shortest chain of move records from ``u`` to ``v`` (oriented)."""
        adj = {}
        for pair, rec in self.moves.items():
            a, b = tuple(pair)
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        prev = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y in sorted(adj.get(x, ())):
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        if v not in prev:
            return None
        chain, x = [], v
        while prev[x] is not None:
            p = prev[x]
            rec = self.moves[frozenset((p, x))]
            chain.append(rec if rec.source == p else rec.reversed())
            x = p
        return chain[::-1]

    def path(self, u, v) -> list:
        if isinstance(u, CoxeterMatrix):
            u = canonical_form(u)
        if isinstance(v, CoxeterMatrix):
            v = canonical_form(v)
        return self._move_path(u, v)

    def edge(self, u, v):
        """Record for the edge ``{u, v}``, or None if absent."""
        if not self._adjacent(u, v):
            return None
        rec = self.moves.get(frozenset((u, v)))
        if rec is not None:
            return rec
        chain = self._move_path(u, v)
        payload = {"path": [r.to_dict() for r in chain]}
        return moves.MoveRecord("Composite", payload, u, v)

    def edges(self):
        """All edges as records, sorted by endpoint canons."""
        for comp in self.components():
            for u, v in combinations(comp, 2):
                if self._adjacent(u, v):
                    yield self.edge(u, v)

    def edge_pairs(self) -> list:
        return [
            (u, v)
            for comp in self.components()
            for u, v in combinations(comp, 2)
            if self._adjacent(u, v)
        ]

    def edge_count(self) -> int:
        return self.clique_counts(max_size=2).get(2, 0)

    def clique_counts(self, max_size: int | None = None) -> dict:
        """Number of ``j``-cliques (``(j-1)``-simplices) for each ``j >= 1``."""
        totals = {}
        for comp in self.components():
            counts = {}
            for v in comp:
                counts[v.rank] = counts.get(v.rank, 0) + 1
            if self.core:
                ks = sorted(counts)
                blocks = []
                for k in ks:
                    nxt = counts.get(k + 1, 0)
                    blocks.append((counts[k] + nxt, nxt))
            else:
                blocks = [(len(comp), 0)]
            top = max_size or max(b for b, _ in blocks)
            for j in range(1, top + 1):
                c = sum(math.comb(a, j) - math.comb(b, j) for a, b in blocks)
                if c:
                    totals[j] = totals.get(j, 0) + c
        return totals

    # -- invariants ----------------------------------------------------------

    def check_invariants(self):
        """Layers form an interval inside ``[n0, 2 n0 - 1]`` in each component."""
        for comp in self.components():
            layers = sorted({v.rank for v in comp})
            n0 = layers[0]
            if layers != list(range(n0, layers[-1] + 1)):
                raise AssertionError(f"component skips layers: {layers}")
            if layers[-1] > max(2 * n0 - 1, n0):
                raise AssertionError(f"layer {layers[-1]} above 2*{n0}-1")

    # -- export --------------------------------------------------------------

    def to_dict(self, implied: bool = True) -> dict:
        verts = sorted(self.vertices.values(), key=lambda fv: fv.vertex)
        if implied:
            edges = [e.to_dict() for e in self.edges()]
        else:
            edges = [
                self.moves[p].to_dict()
                for p in sorted(self.moves, key=lambda p: sorted(p))
                if self._adjacent(*tuple(p))
            ]
        return {
            "seed": self.seed.hex,
            "truncated": self.truncated,
            "core": self.core,
            "vertices": [
                {
                    "canon": fv.vertex.hex,
                    "layer": fv.layer,
                    "component": fv.component,
                    "representative": fv.representative.to_dict(),
                }
                for fv in verts
            ],
            "edges": edges,
        }

    def to_dot(self, name: str = "fragment", edges=None, draw_graphs: bool = False) -> str:
        """Fragment as DOT.

        By default one box per vertex, labelled with its non-2 entries.  With
        ``draw_graphs`` every vertex becomes a cluster holding its complete
        Coxeter graph, and fragment edges join the clusters.  ``edges`` is an
        optional list of (u, v, record) overriding the fragment's edge set.
        """
        verts = sorted(self.vertices.values(), key=lambda fv: fv.vertex)
        ids = {fv.vertex: f"v{i}" for i, fv in enumerate(verts)}
        if edges is None:
            edges = [(u, v, self.moves.get(frozenset((u, v)))) for u, v in self.edge_pairs()]
        lines = [f"graph {name} {{"]
        if draw_graphs:
            lines.append("  compound=true;")
            for fv in verts:
                vid = ids[fv.vertex]
                lines.append(f"  subgraph cluster_{vid} {{")
                lines.append(f'    label="L{fv.layer}";')
                lines.append(f"    {vid} [shape=point, style=invis];")
                m = fv.representative
                for g in m.generators:
                    lines.append(f'    "{vid}:{_dot_escape(g)}" [label="{_dot_escape(g)}"];')
                for i, j, attrs in _edge_styles(m):
                    a, b = _dot_escape(m.generators[i]), _dot_escape(m.generators[j])
                    lines.append(f'    "{vid}:{a}" -- "{vid}:{b}" [{attrs}];')
                lines.append("  }")
        else:
            lines.append("  node [shape=box, fontname=monospace];")
            for fv in verts:
                lab = _dot_escape(_describe_graph(fv.representative))
                lines.append(f'  {ids[fv.vertex]} [label="L{fv.layer}\\n{lab}", layer={fv.layer}];')
        for u, v, rec in edges:
            kind = rec.kind if rec else "Composite"
            attrs = f'label="{kind}", style={"solid" if rec else "dotted"}'
            if draw_graphs:
                attrs += f", ltail=cluster_{ids[u]}, lhead=cluster_{ids[v]}"
            lines.append(f"  {ids[u]} -- {ids[v]} [{attrs}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _describe_graph(m: CoxeterMatrix) -> str:
    parts = []
    for i in range(m.rank):
        for j in range(i + 1, m.rank):
            lab = m.m[i][j]
            if lab != 2:
                parts.append(f"{m.generators[i]}-{m.generators[j]}:{lab}")
    return " ".join(parts) if parts else f"rank {m.rank}, all 2"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _edge_styles(m: CoxeterMatrix):
    for i in range(m.rank):
        for j in range(i + 1, m.rank):
            lab = m.m[i][j]
            if lab is INF:
                yield i, j, 'label="∞", style=dashed'
            elif lab == 2:
                yield i, j, 'label="2", color=grey, penwidth=3'
            else:
                yield i, j, f'label="{lab}"'


def system_to_dot(m: CoxeterMatrix, name: str = "coxeter") -> str:
    """Complete Coxeter graph: infinite edges dashed, 2-edges thick grey."""
    lines = [f"graph {name} {{"]
    for g in m.generators:
        lines.append(f'  "{_dot_escape(g)}";')
    for i, j, attrs in _edge_styles(m):
        a, b = _dot_escape(m.generators[i]), _dot_escape(m.generators[j])
        lines.append(f'  "{a}" -- "{b}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class SpineForest:
    edges: list  # (u, v, MoveRecord)
    vertices: frozenset

    def __len__(self):
        return len(self.edges)

    def trees(self) -> int:
        return len(self.vertices) - len(self.edges)


# ---------------------------------------------------------------------------
# exploration


def explore(seed: CoxeterMatrix, budget: Budget | None = None, moves_allowed=ALL_MOVES, strict: bool = False) -> GalaxyFragment:
    """Breadth-first closure of ``seed`` under blow-ups, blow-downs and twists.

    On budget exhaustion the partial fragment is returned with ``truncated``
    set, or :class:`BudgetExceeded` is raised when ``strict``.
    """
    budget = budget or Budget()
    moves_allowed = frozenset(moves_allowed)
    start = time.monotonic()
    sv = canonical_form(seed)
    frag = GalaxyFragment(sv)
    frag.vertices[sv] = FragmentVertex(sv, seed, 0)
    queue = deque([sv])

    def stop(msg):
        frag.truncated = True
        frag.diagnostics.append(msg)

    while queue:
        if time.monotonic() - start > budget.time_limit:
            stop(f"time limit {budget.time_limit}s reached with {len(queue)} vertices unexpanded")
            break
        cur = queue.popleft()
        rep = frag.vertices[cur].representative
        found = [
            (rec, m2) for rec, m2 in moves.all_moves(rep) if rec.kind in moves_allowed and rec.target != cur
        ]
        if budget.max_moves_per_vertex is not None and len(found) > budget.max_moves_per_vertex:
            stop(f"vertex {cur.hex[:16]} has {len(found)} moves; kept {budget.max_moves_per_vertex}")
            found = found[: budget.max_moves_per_vertex]
        for rec, m2 in found:
            tgt = rec.target
            if tgt.rank > budget.max_rank:
                stop(f"skipped a vertex of rank {tgt.rank} > {budget.max_rank}")
                continue
            if tgt not in frag.vertices:
                if len(frag.vertices) >= budget.max_vertices:
                    stop(f"vertex limit {budget.max_vertices} reached")
                    continue
                frag.vertices[tgt] = FragmentVertex(tgt, m2, 0)
                queue.append(tgt)
            frag.moves.setdefault(frozenset((cur, tgt)), rec)
    frag.check_invariants()
    if frag.truncated and strict:
        raise BudgetExceeded("; ".join(frag.diagnostics), frag)
    return frag


def _merge_fragments(frags) -> GalaxyFragment:
    out = GalaxyFragment(frags[0].seed)
    for k, f in enumerate(frags):
        for v, fv in f.vertices.items():
            if v not in out.vertices:
                out.vertices[v] = FragmentVertex(v, fv.representative, k)
        for p, rec in f.moves.items():
            out.moves.setdefault(p, rec)
        out.truncated |= f.truncated
        out.diagnostics.extend(f.diagnostics)
    # fragments sharing a vertex describe one component
    parent = list(range(len(frags)))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for k, f in enumerate(frags):
        for v in f.vertices:
            c = find(out.vertices[v].component)
            if c != find(k):
                parent[max(c, find(k))] = min(c, find(k))
    for fv in out.vertices.values():
        fv.component = find(fv.component)
    return out


def explore_many(seeds, budget: Budget | None = None, moves_allowed=ALL_MOVES) -> GalaxyFragment:
    """Explore several seeds and merge; components are kept apart."""
    return _merge_fragments([explore(s, budget, moves_allowed) for s in seeds])


def vertical_core(f: GalaxyFragment) -> GalaxyFragment:
    """Same vertices; edges of height greater than one removed."""
    return GalaxyFragment(
        f.seed,
        dict(f.vertices),
        {p: r for p, r in f.moves.items() if abs(r.source.rank - r.target.rank) <= 1},
        f.truncated,
        list(f.diagnostics),
        core=True,
    )


def spine(f: GalaxyFragment) -> SpineForest:
    """Spanning forest by Kruskal over edges in lexicographic canon order."""
    parent = {v: v for v in f.vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    chosen = []
    for u, v in sorted(f.edge_pairs()):
        a, b = find(u), find(v)
        if a != b:
            parent[max(a, b)] = min(a, b)
            chosen.append((u, v, f.edge(u, v)))
    return SpineForest(chosen, frozenset(f.vertices))


# ---------------------------------------------------------------------------
# constructors and small-rank decisions


def starlet(ks) -> CoxeterMatrix:
    """Hub ``s0`` joined to spoke ``s_i`` by ``4 k_i + 2``; spokes pairwise infinite."""
    ks = list(ks)
    if not ks:
        raise ValueError("need at least one parameter")
    if any(not isinstance(k, int) or isinstance(k, bool) or k < 1 for k in ks):
        raise ValueError("parameters must be positive integers")
    if len(set(ks)) != len(ks):
        raise DuplicateParameter(f"repeated parameter in {ks}")
    n = len(ks) + 1
    edges = {(0, i): 4 * k + 2 for i, k in enumerate(ks, start=1)}
    for i in range(1, n):
        for j in range(i + 1, n):
            edges[(i, j)] = INF
    return CoxeterMatrix.from_edges(n, edges)


def _dihedral_triangle_pair(lo: CoxeterMatrix, hi: CoxeterMatrix) -> bool:
    lab = lo.m[0][1]
    if lab is INF or lab % 4 != 2 or lab < 6:
        return False
    k = (lab - 2) // 4
    return hi.label_multiset() == tuple(sorted((2, 2, 2 * k + 1)))


def iso_rank_le3(m1: CoxeterMatrix, m2: CoxeterMatrix) -> bool:
    """Group isomorphism for systems of rank at most three."""
    if m1.rank > 3 or m2.rank > 3:
        raise RankTooLarge("both systems must have rank <= 3")
    if m1.rank == m2.rank:
        return m1.label_multiset() == m2.label_multiset()
    lo, hi = sorted((m1, m2), key=lambda m: m.rank)
    if (lo.rank, hi.rank) == (2, 3):
        return _dihedral_triangle_pair(lo, hi)
    return False


@dataclass
class Isomorphic:
    path: list
    certificate: str

    def __bool__(self):
        return True


@dataclass
class NonIsomorphic:
    certificate: str
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return False


@dataclass
class Unknown:
    diagnostics: list = field(default_factory=list)

    def __bool__(self):
        return False


def _certificates(m1: CoxeterMatrix, m2: CoxeterMatrix):
    a1, a2 = abelianization_rank(m1), abelianization_rank(m2)
    if a1 != a2:
        return NonIsomorphic("abelianization", {"ranks": [a1, a2]})
    o1, o2 = classify.group_order(m1), classify.group_order(m2)
    if (o1 is None) != (o2 is None) or o1 != o2:
        return NonIsomorphic("group order", {"orders": [o1, o2]})
    mf = classify.matching_filter(m1, m2)
    if not mf:
        return NonIsomorphic(
            "basic matching", {"unmatched": mf.witness.name, "side": mf.side}
        )
    r1, r2 = m1.rank, m2.rank
    if r2 > 2 * r1 - 1 or r1 > 2 * r2 - 1:
        return NonIsomorphic("layer bound", {"ranks": [r1, r2]})
    e1 = not moves.find_pseudo_transpositions(m1)
    e2 = not moves.find_pseudo_transpositions(m2)
    reason = classify.expanded_label_filter(m1, m2, e1, e2)
    if reason:
        return NonIsomorphic("maximal rank", {"reason": reason})
    return None


def decide_isomorphic(m1: CoxeterMatrix, m2: CoxeterMatrix, budget: Budget | None = None, finite_cap: int = 20_000):
    """Isomorphic(path) | NonIsomorphic(certificate) | Unknown(diagnostics)."""
    budget = budget or Budget()
    v1, v2 = canonical_form(m1), canonical_form(m2)
    if v1 == v2:
        return Isomorphic([], "identical complete Coxeter graphs")
    if m1.rank <= 3 and m2.rank <= 3:
        if iso_rank_le3(m1, m2):
            f = explore(m1, budget)
            return Isomorphic(f.path(v1, v2) or [], "rank<=3 classification")
        return NonIsomorphic(
            "rank<=3 classification",
            {"multisets": [[str(x) if x else "∞" for x in m.label_multiset()] for m in (m1, m2)]},
        )
    cert = _certificates(m1, m2)
    if cert is not None:
        return cert
    diagnostics = []
    f1 = explore(m1, budget)
    if v2 in f1.vertices:
        return Isomorphic(f1.path(v1, v2), "move path")
    if f1.truncated:
        diagnostics.extend(f1.diagnostics)
        f2 = explore(m2, budget)
        common = sorted(set(f1.vertices) & set(f2.vertices))
        if common:
            meet = common[0]
            back = [r.reversed() for r in reversed(f2.path(v2, meet))]
            return Isomorphic(f1.path(v1, meet) + back, "move path")
        diagnostics.extend(f2.diagnostics)
    else:
        diagnostics.append(f"component of first system fully explored by moves ({len(f1)} vertices)")
    if classify.is_spherical(m1) and classify.is_spherical(m2):
        try:
            images = oracle.finite_isomorphic(m1, m2, cap=finite_cap)
        except oracle.CapExceeded as exc:
            diagnostics.append(f"finite isomorphism search: {exc}")
        else:
            if images is None:
                return NonIsomorphic("finite isomorphism search", {"order": classify.group_order(m1)})
            g2 = oracle.finite_group(m2, finite_cap)
            words = [" ".join(m2.generators[s] for s in g2.words[x]) for x in images]
            return Isomorphic([], f"finite generator images {words}")
    return Unknown(diagnostics)
