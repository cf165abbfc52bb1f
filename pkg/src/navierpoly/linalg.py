"""Fraction-free sparse Gaussian elimination over the rationals.

Vectors are sparse dicts ``{column key: Fraction}``.  Internally every row is
scaled to a primitive integer row (gcd of entries 1, pivot positive), so the
elimination step ``row <- p*row - q*pivot_row`` never leaves the integers.
Pivots are taken at the smallest column under a caller-supplied sort key,
which makes echelon forms and kernel bases reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactalg import Polynomial, VectorPolynomial

SparseVec = Dict[Hashable, Fraction]


def flatten(v: VectorPolynomial) -> SparseVec:
    """Coordinates of a vector polynomial over the (component, monomial) basis."""
    out: SparseVec = {}
    for r, comp in enumerate(v, start=1):
        for exps, c in comp.items():
            out[(r, exps)] = c
    return out


def unflatten(vec: Mapping[Tuple[int, tuple], Fraction], size: int, nvars: int,
              time: bool = False) -> VectorPolynomial:
    comps: List[dict] = [{} for _ in range(size)]
    for (r, exps), c in vec.items():
        comps[r - 1][exps] = c
    return VectorPolynomial(Polynomial(nvars, t, time=time) for t in comps)


def grlex_column_key(col) -> tuple:
    """Order (component, exponents) columns by component, then graded-lex descending."""
    r, exps = col
    return (r, -sum(exps), tuple(-e for e in exps))


def _primitive(row: Dict[Hashable, int], pivot) -> Dict[Hashable, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    sign = -1 if row[pivot] < 0 else 1
    if g > 1 or sign < 0:
        d = g * sign
        return {k: v // d for k, v in row.items()}
    return row


def _to_integer_row(vec: Mapping[Hashable, object]) -> Dict[Hashable, int]:
    den = 1
    for v in vec.values():
        v = Fraction(v)
        den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for k, v in vec.items():
        v = Fraction(v)
        if v:
            out[k] = v.numerator * (den // v.denominator)
    return out


class Echelon:
    """Incrementally maintained row-echelon basis of a span.

    Parameters
    ----------
    key : callable, optional
        Sort key on column labels; the pivot of a row is its minimal column.
    """

    def __init__(self, key: Optional[Callable] = None):
        self.key = key or (lambda c: c)
        self.rows: Dict[Hashable, Dict[Hashable, int]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _lead(self, row):
        return min(row, key=self.key)

    def reduce(self, vec: Mapping[Hashable, object]) -> Dict[Hashable, int]:
        """Residual of ``vec`` after elimination against the stored pivots."""
        row = _to_integer_row(vec)
        rows = self.rows
        key = self.key
        while row:
            lead = min(row, key=key)
            prow = rows.get(lead)
            if prow is None:
                return row
            p = prow[lead]
            q = row[lead]
            g = gcd(p, q)
            p //= g
            q //= g
            new = {k: v * p for k, v in row.items()} if p != 1 else dict(row)
            for k, v in prow.items():
                val = new.get(k, 0) - q * v
                if val:
                    new[k] = val
                else:
                    new.pop(k, None)
            row = new
            if row:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    row = {k: v // g for k, v in row.items()}
        return row

    def add(self, vec: Mapping[Hashable, object]) -> bool:
        """Insert ``vec``; return ``True`` when it enlarged the span."""
        row = self.reduce(vec)
        if not row:
            return False
        lead = self._lead(row)
        self.rows[lead] = _primitive(row, lead)
        return True

    def contains(self, vec: Mapping[Hashable, object]) -> bool:
        return not self.reduce(vec)


def rank(vectors: Iterable[Mapping[Hashable, object]], key: Optional[Callable] = None) -> int:
    ech = Echelon(key)
    for v in vectors:
        ech.add(v)
    return ech.rank


def vector_rank(vectors: Iterable[VectorPolynomial], key: Optional[Callable] = None) -> int:
    return rank((flatten(v) for v in vectors), key=key or grlex_column_key)


def span_contains(basis: Sequence[VectorPolynomial], others: Iterable[VectorPolynomial]) -> bool:
    ech = Echelon(grlex_column_key)
    for v in basis:
        ech.add(flatten(v))
    return all(ech.contains(flatten(v)) for v in others)


def spans_equal(a: Sequence[VectorPolynomial], b: Sequence[VectorPolynomial]) -> bool:
    """Mutual containment of two spans, decided by exact rank."""
    ra = vector_rank(a)
    rb = vector_rank(b)
    if ra != rb:
        return False
    return vector_rank(list(a) + list(b)) == ra


def nullspace(equations: Iterable[Mapping[int, object]], nunknowns: int) -> List[Dict[int, Fraction]]:
    """Kernel basis of a linear system given by sparse equation rows.

    Each equation maps unknown index (``0..nunknowns-1``) to its coefficient.
    The returned basis is indexed by free unknowns in increasing order; each
    kernel vector has a 1 at its free unknown and zeros at the other free ones.
    """
    ech = Echelon()
    for eq in equations:
        ech.add(eq)
    # back substitution to reduced echelon form
    pivots = sorted(ech.rows)
    reduced: Dict[int, Dict[int, Fraction]] = {}
    for p in reversed(pivots):
        row = ech.rows[p]
        lead = Fraction(row[p])
        vec = {k: Fraction(v) / lead for k, v in row.items()}
        for k in [c for c in vec if c != p and c in reduced]:
            coef = vec.pop(k)
            for kk, vv in reduced[k].items():
                if kk == k:
                    continue
                val = vec.get(kk, 0) - coef * vv
                if val:
                    vec[kk] = val
                else:
                    vec.pop(kk, None)
        reduced[p] = vec
    pivot_set = set(pivots)
    basis = []
    for f in range(nunknowns):
        if f in pivot_set:
            continue
        vec = {f: Fraction(1)}
        for p, row in reduced.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        basis.append(vec)
    return basis
