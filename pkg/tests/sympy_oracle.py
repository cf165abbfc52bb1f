import sympy as sp
from fractions import Fraction

from navierpoly.exactalg import Polynomial, VectorPolynomial


def to_sympy(p: Polynomial):
    """Independent sympy view of a polynomial (time variable named t)."""
    names = (["t"] if p.time else []) + [f"x{i}" for i in range(1, p.nvars + 1)]
    syms = sp.symbols(names)
    expr = sp.Integer(0)
    for exps, c in p.items():
        term = sp.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return expr, syms


def vec_to_sympy(v: VectorPolynomial):
    comps = [to_sympy(c)[0] for c in v]
    return comps, to_sympy(v[1])[1]


def sympy_navier(v: VectorPolynomial, b):
    """Navier operator Lap v + b grad div v computed by sympy."""
    comps, syms = vec_to_sympy(v)
    b = sp.Rational(Fraction(b).numerator, Fraction(b).denominator)
    div = sum(sp.diff(f, x) for f, x in zip(comps, syms))
    return [sp.expand(sum(sp.diff(f, x, 2) for x in syms) + b * sp.diff(div, xr))
            for f, xr in zip(comps, syms)]


def sympy_rank(vectors):
    """Exact rank of vector polynomials via sympy's rational matrix rank."""
    cols = sorted({(r, e) for v in vectors for r, comp in enumerate(v) for e, _ in comp.items()})
    index = {c: i for i, c in enumerate(cols)}
    rows = []
    for v in vectors:
        row = [0] * len(cols)
        for r, comp in enumerate(v):
            for e, c in comp.items():
                row[index[(r, e)]] = sp.Rational(c.numerator, c.denominator)
        rows.append(row)
    if not rows or not cols:
        return 0
    return sp.Matrix(rows).rank()
