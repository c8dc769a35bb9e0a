"""
Exact word problem for Coxeter groups, plus enumeration of small finite ones.

Elements are tracked through the geometric representation with coefficients in
the cyclotomic ring Z[zeta_N] (N = 2 * lcm of the finite labels), so every
computation is exact.  A word ``w`` is stored as the matrix whose ``j``-th column
is ``w(alpha_j)``; ``w`` is the identity iff it has no descents, and the sign of
a root is read off from the sum of its coordinates, whose absolute value is at
least 1.

The classical braid-closure rewriting is kept as a second, independent method
(:func:`tits_normal_form`).  It is exponential in the length of the longest
element and only used for cross-checks on short words.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import mpmath
import numpy as np

from .coxsys import INF, CoxeterError, CoxeterMatrix

__all__ = [
    "CapExceeded",
    "Finite",
    "ExceedsCap",
    "GroupWord",
    "Oracle",
    "oracle_for",
    "normal_form",
    "tits_normal_form",
    "element_order",
    "longest_word",
    "enumerate_group",
    "FiniteCoxeterGroup",
    "finite_group",
    "finite_isomorphic",
    "verify_generating_set",
    "PairCheck",
    "VerificationReport",
]

DEFAULT_CAP = 10**6
DEFAULT_WORD_LENGTH = 64


class CapExceeded(CoxeterError):
    pass


@dataclass(frozen=True)
class Finite:
    order: int


@dataclass(frozen=True)
class ExceedsCap:
    cap: int


GroupWord = tuple  # tuple of generator indices


def _as_word(m: CoxeterMatrix, w) -> tuple:
    if isinstance(w, str):
        # one-letter generator names may be run together
        if all(len(g) == 1 for g in m.generators):
            w = list(w)
        else:
            w = w.split()
    out = []
    for x in w:
        i = m.index(x) if isinstance(x, str) else int(x)
        if not 0 <= i < m.rank:
            raise IndexError(f"generator index {i} out of range")
        out.append(i)
    return tuple(out)


# ---------------------------------------------------------------------------
# cyclotomic arithmetic


def _poly_divexact(num, den):
    """Exact division of integer polynomials (lowest degree first, monic den)."""
    num = list(num)
    dq = len(num) - len(den)
    q = [0] * (dq + 1)
    for k in range(dq, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    assert not any(num[: len(den) - 1]), "inexact cyclotomic division"
    return q


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple:
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, _cyclotomic(d))
    return tuple(num)


class _Ring:
    """Z[x]/Phi_N(x) with integer coefficient vectors of length phi(N)."""

    def __init__(self, labels):
        finite = sorted({k for k in labels if k is not INF and k >= 3})
        self.N = 2 * reduce(math.lcm, finite, 1)
        phi = _cyclotomic(self.N)
        self.dim = len(phi) - 1
        d = self.dim
        self._phi = np.array(phi[:-1], dtype=np.int64)
        self._mult = {}
        ang = 2 * math.pi / self.N
        self._cos = np.array([math.cos(ang * k) for k in range(d)])

    def lam(self, label) -> np.ndarray | None:
        """Multiplication matrix for 2cos(pi/m); None for m = 2 (zero)."""
        if label == 2:
            return None
        if label not in self._mult:
            if label is INF:
                t = 2 * np.eye(self.dim, dtype=np.int64)
            else:
                e = self.N // (2 * label)
                t = self._mult_matrix(self._power(e) + self._power(self.N - e))
            self._mult[label] = t
        return self._mult[label]

    def _times_x(self, v):
        w = np.roll(v, 1)
        w[0] = 0
        return w - v[-1] * self._phi

    def _power(self, e: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[0] = 1
        for _ in range(e):
            v = self._times_x(v)
        return v

    def _mult_matrix(self, v) -> np.ndarray:
        """Columns are x^k * v reduced mod Phi_N."""
        cols = [v]
        for _ in range(self.dim - 1):
            cols.append(self._times_x(cols[-1]))
        return np.stack(cols, axis=1)

    def sign(self, vec) -> int:
        """Sign of a real ring element known to be 0 or of absolute value >= 1."""
        if not np.any(vec):
            return 0
        mag = int(np.abs(vec).sum()) if vec.dtype != object else sum(abs(int(x)) for x in vec)
        if mag < 2**40:
            val = float(np.dot(np.asarray(vec, dtype=float), self._cos))
            if abs(val) > 0.25:
                return 1 if val > 0 else -1
        prec = mag.bit_length() + 60
        with mpmath.workprec(prec):
            val = mpmath.fsum(
                int(a) * mpmath.cos(2 * mpmath.pi * k / self.N) for k, a in enumerate(vec) if a
            )
        return 1 if val > 0 else -1


_SAFE = 2**40


class Oracle:
    """Exact arithmetic in the Coxeter group of ``m``.

    Not thread-safe: each worker should build its own instance.
    """

    def __init__(self, m: CoxeterMatrix):
        self.m = m
        self.n = m.rank
        self.ring = _Ring(m.labels())
        self.lam = [[self.ring.lam(m.m[i][j]) if i != j else None for j in range(self.n)] for i in range(self.n)]
        self._nbrs = [[(j, t) for j, t in enumerate(row) if t is not None] for row in self.lam]
        # float copies for BLAS; exact while partial sums stay below 2**53
        self._lamf = {id(t): (t.T.astype(np.float64), int(np.abs(t).max())) for row in self.lam for t in row if t is not None}

    # -- matrices ------------------------------------------------------------

    def identity(self) -> np.ndarray:
        M = np.zeros((self.n, self.n, self.ring.dim), dtype=np.int64)
        for i in range(self.n):
            M[i, i, 0] = 1
        return M

    def _guard(self, M):
        if M.dtype != object and np.abs(M).max(initial=0) > _SAFE:
            return M.astype(object)
        return M

    def rmul(self, M, s: int) -> np.ndarray:
        """Matrix of ``w s`` from the matrix of ``w``."""
        M = M.copy()
        col = M[:, s, :].copy()
        cmax = int(np.abs(col).max(initial=0)) if col.dtype != object else None
        for j, t in self._nbrs[s]:
            M[:, j, :] += self._times(col, t, cmax)
        M[:, s, :] = -col
        return self._guard(M)

    def _times(self, v, t, vmax):
        tf, tmax = self._lamf[id(t)]
        if vmax is not None and vmax * tmax * self.ring.dim < 2**52:
            return (v.astype(np.float64) @ tf).astype(np.int64)
        return v @ t.T

    def lmul(self, M, s: int) -> np.ndarray:
        """Matrix of ``s w`` from the matrix of ``w``."""
        M = M.copy()
        row = -M[s]
        for t, lt in self._nbrs[s]:
            vmax = int(np.abs(M[t]).max(initial=0)) if M.dtype != object else None
            row = row + self._times(M[t], lt, vmax)
        M[s] = row
        return self._guard(M)

    def matrix(self, word) -> np.ndarray:
        M = self.identity()
        for s in word:
            M = self.rmul(M, s)
        return M

    def key(self, M):
        """Exact hashable fingerprint of the element with matrix ``M``.

        Column sums are the coordinates of ``w^{-1}(rho)`` in the dual
        representation, ``rho`` being the sum of the fundamental weights.
        ``rho`` lies in the open fundamental chamber, so its stabilizer is
        trivial and the column sums determine ``w``.
        """
        M = M.sum(axis=0)
        if M.dtype == object:
            if max((abs(int(x)) for x in M.ravel()), default=0) < 2**62:
                return M.astype(np.int64).tobytes()
            return tuple(int(x) for x in M.ravel())
        return M.tobytes()

    def is_descent(self, M, s: int) -> bool:
        """Right descent test: ``l(ws) < l(w)`` iff ``w(alpha_s)`` is negative."""
        return self.ring.sign(M[:, s, :].sum(axis=0)) < 0

    def is_identity(self, M) -> bool:
        return not any(self.is_descent(M, s) for s in range(self.n))

    # -- words ---------------------------------------------------------------

    def normal_form(self, word) -> tuple:
        """Lexicographically least reduced word for the element."""
        P = self.identity()  # matrix of w^{-1}
        for s in reversed(word):
            P = self.rmul(P, s)
        out = []
        while True:
            s = next((s for s in range(self.n) if self.is_descent(P, s)), None)
            if s is None:
                return tuple(out)
            out.append(s)
            P = self.rmul(P, s)

    def length(self, word) -> int:
        return len(self.normal_form(word))

    def equal(self, w1, w2) -> bool:
        return self.key(self.matrix(w1)) == self.key(self.matrix(w2))

    def _float_generators(self):
        if not hasattr(self, "_fgens"):
            gens = []
            for s in range(self.n):
                G = np.eye(self.n)
                for j in range(self.n):
                    lab = self.m.m[s][j]
                    if j == s:
                        G[s, s] = -1.0
                    elif lab is INF:
                        G[s, j] = 2.0
                    else:
                        G[s, j] = 2 * math.cos(math.pi / lab)
                gens.append(G)
            self._fgens = gens
        return self._fgens

    def _finite_order_bound(self) -> int:
        """Upper bound on the order of any finite-order element.

        Such an element is conjugate into a spherical standard parabolic, and
        a finite irreducible noncyclic Coxeter group has no element of order
        above half its size.
        """
        if not hasattr(self, "_order_bound"):
            from .classify import type_multiset

            best = 1

            def grow(J, start):
                nonlocal best
                types = type_multiset(self.m, J)
                if types is None:
                    return
                best = max(best, math.prod(t.order // 2 if t.order > 2 else 2 for t in types))
                for y in range(start, self.n):
                    grow(J + (y,), y + 1)

            for x in range(self.n):
                grow((x,), x + 1)
            self._order_bound = best
        return self._order_bound

    def element_order(self, word, cap: int = 1000):
        """Least ``k <= cap`` with ``w^k = 1``, else :class:`ExceedsCap`.

        Powers are scanned in floating point against a first-order bound on
        the accumulated rounding error (local errors of each product carried
        forward by earlier powers), with a wide safety factor. Candidates are
        confirmed exactly. If the bound becomes too loose to discriminate, the
        scan continues with exact powers.
        """
        word = tuple(word)
        if not word or self.is_identity(self.matrix(word)):
            return Finite(1)
        gens = self._float_generators()
        W = np.eye(self.n)
        A = np.eye(self.n)
        for s in word:
            W = W @ gens[s]
            A = A @ np.abs(gens[s])
        w_max, a_max = np.abs(W).max(), A.max()
        P = W.copy()
        eye = np.eye(self.n)
        unit = 1e-13 * self.n**2  # about 450 ulps per elementary product
        p_max = max(1.0, w_max)
        k = 1
        with np.errstate(over="ignore", invalid="ignore"):
            while k < cap:
                k += 1
                if k > 8 and k > self._finite_order_bound():
                    return ExceedsCap(cap)
                P = P @ W
                if not np.all(np.isfinite(P)):
                    return ExceedsCap(cap)  # unbounded powers: the order is infinite
                p_max = max(p_max, np.abs(P).max())
                tol = unit * k * p_max * (p_max * w_max + len(word) * a_max) + 1e-9
                if not tol < 0.25:
                    break
                if np.abs(P - eye).max() <= tol and self.is_identity(self.matrix(word * k)):
                    return Finite(k)
            else:
                return ExceedsCap(cap)
        M = self.matrix(word * k)
        while True:
            if self.is_identity(M):
                return Finite(k)
            if k == cap or k >= self._finite_order_bound():
                return ExceedsCap(cap)
            k += 1
            for s in word:
                M = self.rmul(M, s)

    def longest_word(self, subset=None) -> tuple:
        """Longest element of the parabolic on ``subset``; loops forever if infinite."""
        subset = sorted(range(self.n) if subset is None else subset)
        M = self.identity()
        word = []
        while True:
            s = next((s for s in subset if not self.is_descent(M, s)), None)
            if s is None:
                return self.normal_form(word)
            word.append(s)
            M = self.rmul(M, s)


@lru_cache(maxsize=256)
def oracle_for(m: CoxeterMatrix) -> Oracle:
    return Oracle(m)


def normal_form(m: CoxeterMatrix, w, cap: int | None = None, method: str = "geometric") -> tuple:
    """Normal form (lex-least reduced word) of ``w``.

    ``method="tits"`` uses braid-closure rewriting and raises :class:`CapExceeded`
    when the closure outgrows ``cap``.
    """
    word = _as_word(m, w)
    if method == "tits":
        return tits_normal_form(m, word, cap or DEFAULT_CAP)
    return oracle_for(m).normal_form(word)


def element_order(m: CoxeterMatrix, w, cap: int = 1000):
    return oracle_for(m).element_order(_as_word(m, w), cap)


def longest_word(m: CoxeterMatrix, subset=None) -> tuple:
    return oracle_for(m).longest_word(subset)


# ---------------------------------------------------------------------------
# braid-closure rewriting


def _braid_moves(m: CoxeterMatrix, word: tuple):
    n = len(word)
    for i in range(n - 1):
        s, t = word[i], word[i + 1]
        if s == t:
            continue
        k = m.m[s][t]
        if k is INF or i + k > n:
            continue
        seg = word[i : i + k]
        if all(seg[j] == (s if j % 2 == 0 else t) for j in range(k)):
            alt = tuple(t if j % 2 == 0 else s for j in range(k))
            yield word[:i] + alt + word[i + k :]


def tits_normal_form(m: CoxeterMatrix, word, cap: int = DEFAULT_CAP, max_length: int = DEFAULT_WORD_LENGTH) -> tuple:
    word = tuple(_as_word(m, word))
    if len(word) > max_length:
        raise CapExceeded(f"word length {len(word)} exceeds {max_length}")
    while True:
        seen = {word}
        queue = deque([word])
        reduced = None
        while queue:
            w = queue.popleft()
            cut = next((i for i in range(len(w) - 1) if w[i] == w[i + 1]), None)
            if cut is not None:
                reduced = w[:cut] + w[cut + 2 :]
                break
            for nxt in _braid_moves(m, w):
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > cap:
                        raise CapExceeded(f"braid closure exceeds {cap} words")
                    queue.append(nxt)
        if reduced is None:
            return min(seen)
        word = reduced


# ---------------------------------------------------------------------------
# finite groups


def _batch_keys(rows) -> list:
    """Keys for a stack of column-sum rows.

    int16 bytes when every entry fits, otherwise tagged int64 bytes; equal
    rows always get equal keys, so the encoding stays injective.
    """
    if rows.dtype == object:
        out = []
        for row in rows:
            big = max((abs(int(x)) for x in row.ravel()), default=0)
            if big < 2**62:
                out.extend(_batch_keys(row[None].astype(np.int64)))
            else:
                out.append(tuple(int(x) for x in row.ravel()))
        return out
    out = []
    small = np.abs(rows).reshape(len(rows), -1).max(axis=1, initial=0) < 2**15
    flat16 = rows.astype(np.int16).tobytes()
    flat64 = rows.tobytes()
    w16 = len(flat16) // max(len(rows), 1)
    w64 = 4 * w16
    for a in range(len(rows)):
        if small[a]:
            out.append(flat16[a * w16 : (a + 1) * w16])
        else:
            out.append(b"L" + flat64[a * w64 : (a + 1) * w64])
    return out


class FiniteCoxeterGroup:
    """Breadth-first enumeration of a finite Coxeter group.

    Element ``0`` is the identity; ``rmul[i, s]`` is the index of ``g_i s`` and
    ``words[i]`` a shortest word for ``g_i`` (lex-least among shortest).
    """

    def __init__(self, m: CoxeterMatrix, cap: int = 100_000):
        self.m = m
        orc = oracle_for(m)
        n = m.rank
        # only the column sums are carried: they transform by the same right
        # multiplication and are a faithful key (see Oracle.key).  A whole
        # length layer is multiplied at once; w s is one layer up or down.
        level = orc.identity().sum(axis=0, keepdims=True)
        index = {_batch_keys(level)[0]: 0}
        words = [()]
        rows = []
        lo = 0
        while len(level):
            prods = [orc.rmul(level, s) for s in range(n)]
            keys = [_batch_keys(p) for p in prods]
            fresh = []
            for a in range(len(level)):
                row = []
                for s in range(n):
                    k = keys[s][a]
                    j = index.get(k)
                    if j is None:
                        if len(words) >= cap:
                            raise CapExceeded(f"group order exceeds {cap}")
                        j = len(words)
                        index[k] = j
                        words.append(words[lo + a] + (s,))
                        fresh.append(prods[s][a])
                    row.append(j)
                rows.append(row)
            lo += len(level)
            level = np.stack(fresh) if fresh else level[:0]
        self.order = len(words)
        self.words = words
        self.rmul = np.array(rows, dtype=np.int64).reshape(self.order, n)
        self._orders = {}
        self._inv = None

    def element(self, word) -> int:
        i = 0
        for s in word:
            i = int(self.rmul[i, s])
        return i

    def mul(self, a: int, b: int) -> int:
        for s in self.words[b]:
            a = int(self.rmul[a, s])
        return a

    def perm(self, g: int) -> np.ndarray:
        """Array ``p`` with ``p[i]`` the index of ``g_i g``."""
        p = np.arange(self.order)
        for s in self.words[g]:
            p = self.rmul[p, s]
        return p

    def inverse(self, g: int) -> int:
        return self.element(reversed(self.words[g]))

    def element_order(self, g: int) -> int:
        if g not in self._orders:
            k, cur = 1, g
            while cur != 0:
                cur = self.mul(cur, g)
                k += 1
            self._orders[g] = k
        return self._orders[g]

    def involutions(self) -> list:
        return [g for g in range(1, self.order) if self.mul(g, g) == 0]

    def closure(self, gens) -> np.ndarray:
        """Boolean mask of the subgroup generated by ``gens``."""
        perms = [self.perm(g) for g in gens]
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        frontier = np.array([0])
        while frontier.size:
            nxt = np.unique(np.concatenate([p[frontier] for p in perms])) if perms else np.array([], dtype=int)
            nxt = nxt[~mask[nxt]]
            mask[nxt] = True
            frontier = nxt
        return mask

    def derived_subgroup(self) -> np.ndarray:
        n = self.m.rank
        gens = []
        for s in range(n):
            for t in range(s + 1, n):
                c = self.element((s, t, s, t))
                if c:
                    gens.append(c)
        mask = self.closure(gens)
        while True:
            members = np.flatnonzero(mask)
            extra = set()
            for s in range(n):
                for h in members:
                    c = self.element((s,) + self.words[h] + (s,))
                    if not mask[c]:
                        extra.add(c)
            if not extra:
                return mask
            gens.extend(sorted(extra))
            mask = self.closure(gens)

    def abelianization_rank(self) -> int:
        index = self.order // int(self.derived_subgroup().sum())
        r = index.bit_length() - 1
        if 1 << r != index:
            raise AssertionError(f"abelianization of order {index} is not elementary 2-group")
        return r


@lru_cache(maxsize=64)
def finite_group(m: CoxeterMatrix, cap: int = 100_000) -> FiniteCoxeterGroup:
    return FiniteCoxeterGroup(m, cap)


def enumerate_group(m: CoxeterMatrix, cap: int = 100_000):
    """Exact order if at most ``cap`` else :class:`ExceedsCap`."""
    try:
        return finite_group(m, cap).order
    except CapExceeded:
        return ExceedsCap(cap)


def finite_isomorphic(m1: CoxeterMatrix, m2: CoxeterMatrix, cap: int = 100_000, node_cap: int = 2_000_000):
    """Decide ``W1 ~= W2`` for finite groups by searching for generator images.

    Returns a tuple of element indices of ``finite_group(m2)`` (images of the
    generators of ``m1``) or None.  Raises CapExceeded if the search is too big.
    """
    g1 = finite_group(m1, cap)
    g2 = finite_group(m2, cap)
    if g1.order != g2.order:
        return None
    n = m1.rank
    invs = g2.involutions()
    nodes = [0]

    def search(images):
        i = len(images)
        if i == n:
            return tuple(images) if g2.closure(images).all() else None
        for x in invs:
            nodes[0] += 1
            if nodes[0] > node_cap:
                raise CapExceeded("isomorphism search exceeded node cap")
            if all(g2.element_order(g2.mul(images[j], x)) == m1.m[j][i] for j in range(i)):
                got = search(images + [x])
                if got is not None:
                    return got
        return None

    if n == 0:
        return () if g2.order == 1 else None
    return search([])


# ---------------------------------------------------------------------------
# generating-set verification


@dataclass(frozen=True)
class PairCheck:
    i: int
    j: int
    claimed: object
    status: str  # verified | consistent | mismatch | cap_exceeded
    observed: object = None


@dataclass
class VerificationReport:
    involutions: list = field(default_factory=list)  # (index, ok)
    pairs: list = field(default_factory=list)
    generation: bool | None = None  # None when the group is not enumerated
    group_order: int | None = None
    claimed_order: int | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            all(ok for _, ok in self.involutions)
            and all(p.status in ("verified", "consistent") for p in self.pairs)
            and self.generation is not False
        )

    @property
    def exact(self) -> bool:
        """Every pair verified exactly (no capped 'consistent' verdicts)."""
        return self.ok and all(p.status == "verified" for p in self.pairs)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "exact": self.exact,
            "involutions": [{"index": i, "ok": ok} for i, ok in self.involutions],
            "pairs": [
                {
                    "i": p.i,
                    "j": p.j,
                    "claimed": 0 if p.claimed is INF else p.claimed,
                    "status": p.status,
                    "observed": p.observed,
                }
                for p in self.pairs
            ],
            "generation": self.generation,
            "group_order": self.group_order,
            "claimed_order": self.claimed_order,
            "notes": self.notes,
        }


def verify_generating_set(m: CoxeterMatrix, words, claimed: CoxeterMatrix, cap: int = 200, group_cap: int = 100_000):
    """Check that ``words`` in ``W(m)`` satisfy the Coxeter matrix ``claimed``.

    Finite claimed labels are verified exactly; claimed infinity is only
    ``consistent`` (order exceeds ``cap``).  When ``W(m)`` enumerates within
    ``group_cap`` the words must generate it and ``W(claimed)`` must have the
    same order.
    """
    words = [_as_word(m, w) for w in words]
    if len(words) != claimed.rank:
        raise ValueError("need one word per claimed generator")
    orc = oracle_for(m)
    rep = VerificationReport()
    for i, w in enumerate(words):
        rep.involutions.append((i, orc.element_order(w, 2) == Finite(2)))
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            want = claimed.m[i][j]
            bound = cap if want is INF else max(cap, want)
            got = orc.element_order(words[i] + words[j], bound)
            if isinstance(got, ExceedsCap):
                status = "consistent" if want is INF else "cap_exceeded"
                observed = None
            else:
                status = "verified" if got.order == want else "mismatch"
                observed = got.order
            rep.pairs.append(PairCheck(i, j, want, status, observed))
    from .classify import is_spherical

    if not is_spherical(m):
        rep.notes.append("infinite group; generation unchecked")
        return rep
    try:
        g = finite_group(m, group_cap)
    except CapExceeded:
        rep.notes.append("group not enumerated; generation unchecked")
        return rep
    rep.group_order = g.order
    gens = [g.element(w) for w in words]
    rep.generation = bool(g.closure(gens).all())
    if any(p.status != "verified" for p in rep.pairs):
        rep.notes.append("claimed relations fail; claimed order not computed")
        return rep
    try:
        rep.claimed_order = finite_group(claimed, group_cap).order
    except CapExceeded:
        rep.claimed_order = None
    if rep.claimed_order != g.order:
        rep.generation = False
        rep.notes.append(f"claimed system has order {rep.claimed_order}, group has {g.order}")
    return rep
