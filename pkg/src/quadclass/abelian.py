"""Finite abelian group bookkeeping for form class groups.

``smith_normal_form`` diagonalizes an integer relation matrix.
``PGroup`` grows the ell-Sylow subgroup generated by a stream of elements,
keeping an independent basis so that discrete logarithms can be done one
ell-adic digit at a time.
"""

from __future__ import annotations

from math import isqrt

from .errors import ScaleLimit
from .qform import _compose, _identity, _inverse, _pow

Form = tuple[int, int, int]

# Largest elementary-abelian layer tabulated outright; above this, BSGS.
TABLE_LIMIT = 4096
BSGS_TABLE_LIMIT = 1 << 22


def smith_normal_form(matrix: list[list[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Diagonalize ``matrix`` by unimodular row and column operations.

    Returns ``(diag, V, Vinv)`` where ``U @ matrix @ V`` is diagonal with
    entries ``diag`` (nonnegative, each dividing the next) for some
    unimodular ``U``, and ``Vinv`` is the inverse of ``V``.  Only the column
    transform is tracked because that is what re-expresses generators.
    """
    S = [list(row) for row in matrix]
    m = len(S)
    n = len(S[0]) if m else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(src, dst, q):
        # col_dst -= q * col_src
        if q == 0:
            return
        for row in S:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]
        Vi[src] = [x + q * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            i, j = pivot
            S[t], S[i] = S[i], S[t]
            if j != t:
                swap_cols(t, j)
            p = S[t][t]
            done = True
            for i in range(t + 1, m):
                q = S[i][t] // p
                if q:
                    S[i] = [x - q * y for x, y in zip(S[i], S[t])]
                if S[i][t]:
                    done = False
            for j in range(t + 1, n):
                add_col(t, j, S[t][j] // p)
                if S[t][j]:
                    done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            S[t] = [x + y for x, y in zip(S[t], S[bad])]
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
    diag = [S[i][i] for i in range(min(m, n))]
    return diag, V, Vi


def _prime_exponent(x: int, ell: int) -> int:
    e = 0
    while x % ell == 0:
        x //= ell
        e += 1
    return e


class PGroup:
    """The subgroup of an ell-Sylow subgroup generated so far.

    ``basis`` holds ``(form, e)`` pairs with ``form`` of order ``ell**e``;
    the group is the direct product of their cyclic spans, largest first.
    """

    def __init__(self, ell: int, disc: int):
        self.ell = ell
        self.disc = disc
        self.one = _identity(disc)
        self.basis: list[tuple[Form, int]] = []
        self._tables: dict[int, tuple] = {}

    @property
    def exponents(self) -> list[int]:
        return [e for _, e in self.basis]

    @property
    def order(self) -> int:
        return self.ell ** sum(self.exponents)

    def _product(self, coords) -> Form:
        acc = self.one
        for (g, _), k in zip(self.basis, coords):
            if k:
                acc = _compose(acc, _pow(g, k, self.disc), self.disc)
        return acc

    def _layer(self, rank: int):
        """Lookup structure for the order-ell elements of the first ``rank`` generators."""
        if rank in self._tables:
            return self._tables[rank]
        ell, disc = self.ell, self.disc
        tops = [_pow(g, ell ** (e - 1), disc) for g, e in self.basis[:rank]]
        if ell**rank <= TABLE_LIMIT:
            frontier = [(self.one, ())]
            for c in tops:
                nxt = []
                for elt, digits in frontier:
                    x = elt
                    for d in range(ell):
                        nxt.append((x, digits + (d,)))
                        x = _compose(x, c, disc)
                frontier = nxt
            table = {elt: digits for elt, digits in frontier}
            entry = ("table", table, None, None)
        else:
            m = isqrt(ell - 1) + 1
            if m * ell ** (rank - 1) > BSGS_TABLE_LIMIT:
                raise ScaleLimit(f"{ell}-rank {rank} layer too large for discrete logarithms")
            frontier = [(self.one, ())]
            for c in tops[1:]:
                nxt = []
                for elt, digits in frontier:
                    x = elt
                    for d in range(ell):
                        nxt.append((x, digits + (d,)))
                        x = _compose(x, c, disc)
                frontier = nxt
            table = {}
            for elt, digits in frontier:
                x = elt
                for j in range(m):
                    table.setdefault(x, (j,) + digits)
                    x = _compose(x, tops[0], disc)
            giant = _inverse(_pow(tops[0], m, disc))
            entry = ("bsgs", table, giant, m)
        self._tables[rank] = entry
        return entry

    def _layer_dlog(self, rank: int, z: Form):
        kind, table, giant, m = self._layer(rank)
        if kind == "table":
            return table.get(z)
        y = z
        for i in range((self.ell + m - 1) // m + 1):
            hit = table.get(y)
            if hit is not None:
                return ((hit[0] + i * m) % self.ell,) + hit[1:]
            y = _compose(y, giant, self.disc)
        return None

    def dlog(self, y: Form) -> list[int] | None:
        """Coordinates of y on the basis, or None if y is outside the subgroup."""
        ell, disc = self.ell, self.disc
        if not self.basis:
            return [] if y == self.one else None
        exps = self.exponents
        E = exps[0]
        known = [0] * len(exps)
        for t in range(1, E + 1):
            rem = _compose(y, _inverse(self._product(known)), disc)
            z = _pow(rem, ell ** (E - t), disc)
            rank = sum(1 for e in exps if e >= E - t + 1)
            digits = self._layer_dlog(rank, z)
            if digits is None:
                return None
            for i in range(rank):
                known[i] += digits[i] * ell ** (exps[i] - E + t - 1)
        if _compose(y, _inverse(self._product(known)), disc) != self.one:
            return None
        return known

    def add(self, x: Form, v: int) -> bool:
        """Adjoin x, an element of order ell**v; return True if the subgroup grew."""
        ell, disc = self.ell, self.disc
        y = x
        for j in range(v + 1):
            coords = self.dlog(y)
            if coords is not None:
                break
            y = _pow(y, ell, disc)
        if j == 0:
            return False
        k = len(self.basis)
        rel = [[0] * (k + 1) for _ in range(k + 1)]
        for i, e in enumerate(self.exponents):
            rel[i][i] = ell**e
        rel[k] = [-c for c in coords] + [ell**j]
        diag, _, Vi = smith_normal_form(rel)
        gens = [g for g, _ in self.basis] + [x]
        mods = [ell**e for e in self.exponents] + [ell**v]
        new_basis = []
        for r, s in enumerate(diag):
            if s == 1:
                continue
            acc = self.one
            for g, k_, mod in zip(gens, Vi[r], mods):
                k_ %= mod
                if k_:
                    acc = _compose(acc, _pow(g, k_, disc), disc)
            new_basis.append((acc, _prime_exponent(s, ell)))
        new_basis.sort(key=lambda t: -t[1])
        self.basis = new_basis
        self._tables.clear()
        return True
