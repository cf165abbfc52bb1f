"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials are immutable maps from exponent tuples to :class:`fractions.Fraction`.
Spatial variables are addressed by 1-based index ``x_1 .. x_n``.  A polynomial
built with ``time=True`` carries one extra leading slot, addressed as index 0
(the time variable ``t``).
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

Exponents = Tuple[int, ...]

__all__ = [
    "Fraction",
    "NotDivisibleError",
    "Polynomial",
    "VectorPolynomial",
    "as_fraction",
    "format_fraction",
    "parse_fraction",
]


class NotDivisibleError(ArithmeticError):
    """Raised when a polynomial is not divisible by the requested variable."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Decimal notation is rejected."""
    text = text.strip()
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"decimal-free fraction expected, got {text!r}")
    return Fraction(text)


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _grlex_key(exps: Exponents):
    return (sum(exps), exps)


class Polynomial:
    """Immutable sparse polynomial over the rationals.

    Parameters
    ----------
    nvars : int
        Number of spatial variables ``x_1 .. x_n``.
    terms : mapping, optional
        ``{exponent tuple: coefficient}``.  Zero coefficients are dropped.
    time : bool
        Whether the polynomial also depends on a time variable (index 0).
    """

    __slots__ = ("nvars", "time", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponents, object]] = None,
                 time: bool = False):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        self.time = bool(time)
        width = nvars + self.time
        clean: Dict[Exponents, Fraction] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != width or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for varcount {width}")
            c = as_fraction(coef)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, time: bool, terms: Dict[Exponents, Fraction]) -> "Polynomial":
        # trusted constructor: caller guarantees canonical, zero-free terms
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.time = time
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, time: bool = False) -> "Polynomial":
        return cls._raw(nvars, time, {})

    @classmethod
    def constant(cls, nvars: int, value, time: bool = False) -> "Polynomial":
        return cls(nvars, {(0,) * (nvars + time): value}, time=time)

    @classmethod
    def variable(cls, nvars: int, i: int, time: bool = False) -> "Polynomial":
        width = nvars + time
        exps = [0] * width
        exps[_position(nvars, time, i)] = 1
        return cls._raw(nvars, time, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coef=1, time: bool = False) -> "Polynomial":
        nvars = len(exps) - (1 if time else 0)
        return cls(nvars, {tuple(exps): coef}, time=time)

    # -- basic protocol ---------------------------------------------------

    @property
    def varcount(self) -> int:
        return self.nvars + self.time

    @property
    def terms(self) -> Dict[Exponents, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponents, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return (self.nvars == other.nvars and self.time == other.time
                    and self._terms == other._terms)
        if isinstance(other, (int, Rational)):
            if not other:
                return not self._terms
            return self._terms == {(0,) * self.varcount: Fraction(other)}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.time, frozenset(self._terms.items())))
        return self._hash

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars or self.time != other.time:
            raise ValueError(
                f"varcount mismatch: {self.varcount}{'(t)' if self.time else ''} vs "
                f"{other.varcount}{'(t)' if other.time else ''}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return Polynomial.constant(self.nvars, other, self.time)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = out.get(exps)
            if v is None:
                out[exps] = c
            else:
                v = v + c
                if v:
                    out[exps] = v
                else:
                    del out[exps]
        return Polynomial._raw(self.nvars, self.time, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, self.time, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: Dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.nvars, self.time, {e: c for e, c in out.items() if c})

    def __rmul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1, self.time)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars, self.time)
        return Polynomial._raw(self.nvars, self.time, {e: v * c for e, v in self._terms.items()})

    # -- calculus ---------------------------------------------------------

    def _pos(self, i: int) -> int:
        return _position(self.nvars, self.time, i)

    def partial(self, i: int, order: int = 1) -> "Polynomial":
        """Formal partial derivative with respect to variable ``i``."""
        p = self._pos(i)
        out: Dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            e = exps[p]
            if e < order:
                continue
            factor = 1
            for j in range(order):
                factor *= e - j
            ne = exps[:p] + (e - order,) + exps[p + 1:]
            out[ne] = out.get(ne, 0) + c * factor
        return Polynomial._raw(self.nvars, self.time, {e: c for e, c in out.items() if c})

    def shift(self, i: int, power: int = 1) -> "Polynomial":
        """Multiply by ``x_i ** power``."""
        p = self._pos(i)
        return Polynomial._raw(self.nvars, self.time, {
            exps[:p] + (exps[p] + power,) + exps[p + 1:]: c for exps, c in self._terms.items()})

    def divide_by_variable(self, i: int) -> "Polynomial":
        """Exact quotient ``q`` with ``x_i * q == self``.

        Raises
        ------
        NotDivisibleError
            If some monomial does not contain ``x_i``.
        """
        p = self._pos(i)
        out = {}
        for exps, c in self._terms.items():
            if exps[p] == 0:
                raise NotDivisibleError(f"term {_fmt_monomial(exps, self.time)} lacks x{i}")
            out[exps[:p] + (exps[p] - 1,) + exps[p + 1:]] = c
        return Polynomial._raw(self.nvars, self.time, out)

    def integrate(self, i: int) -> "Polynomial":
        """Monomial-wise antiderivative in ``x_i`` with zero constant."""
        p = self._pos(i)
        return Polynomial._raw(self.nvars, self.time, {
            exps[:p] + (exps[p] + 1,) + exps[p + 1:]: c / (exps[p] + 1)
            for exps, c in self._terms.items()})

    def substitute_permutation(self, perm: Mapping[int, int]) -> "Polynomial":
        """Rename variables: ``x_i -> x_perm[i]`` for every ``i`` in ``perm``."""
        width = self.varcount
        pos_map = list(range(width))
        for i, j in perm.items():
            pos_map[self._pos(i)] = self._pos(j)
        out = {}
        for exps, c in self._terms.items():
            ne = [0] * width
            for src, e in enumerate(exps):
                ne[pos_map[src]] += e
            out[tuple(ne)] = c
        return Polynomial._raw(self.nvars, self.time, out)

    # -- inspection -------------------------------------------------------

    def degree(self) -> Optional[int]:
        """Total degree, or ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int) -> Optional[int]:
        if not self._terms:
            return None
        p = self._pos(i)
        return max(e[p] for e in self._terms)

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = {sum(e) for e in self._terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs.pop() == degree

    def sorted_terms(self) -> list:
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def evaluate(self, point: Sequence[float]) -> float:
        """Evaluate at a point of floats (length ``varcount``) by direct summation."""
        if len(point) != self.varcount:
            raise ValueError(f"point has length {len(point)}, expected {self.varcount}")
        total = 0.0
        for exps, c in self._terms.items():
            term = float(c)
            for x, e in zip(point, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    # -- formatting -------------------------------------------------------

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = _fmt_monomial(exps, self.time)
            if mono == "1":
                parts.append(format_fraction(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_fraction(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def latex(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for exps, c in self.sorted_terms():
            factors = []
            for pos, e in enumerate(exps):
                if not e:
                    continue
                name = _var_name(pos, self.time, latex=True)
                factors.append(name if e == 1 else f"{name}^{{{e}}}")
            mono = " ".join(factors)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if a.denominator == 1:
                coef = "" if (a == 1 and mono) else str(a.numerator)
            else:
                coef = rf"\frac{{{a.numerator}}}{{{a.denominator}}}"
            out.append(f"{sign} {coef}{' ' if coef and mono else ''}{mono}")
        text = " ".join(out)
        return text[2:] if text.startswith("+ ") else text

    def to_json(self) -> dict:
        doc = {"varcount": self.varcount,
               "terms": [{"exp": list(e), "coef": format_fraction(c)} for e, c in self.sorted_terms()]}
        if self.time:
            doc["time"] = True
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "Polynomial":
        time = bool(doc.get("time", False))
        varcount = int(doc["varcount"])
        terms: Dict[Exponents, Fraction] = {}
        for t in doc["terms"]:
            exps = tuple(t["exp"])
            coef = t["coef"]
            if not isinstance(coef, (str, int)):
                raise ValueError(f"coefficient must be a fraction string, got {coef!r}")
            terms[exps] = terms.get(exps, Fraction(0)) + as_fraction(coef)
        return cls(varcount - time, terms, time=time)


def _position(nvars: int, time: bool, i: int) -> int:
    if time:
        if not 0 <= i <= nvars:
            raise IndexError(f"variable index {i} out of range 0..{nvars}")
        return i
    if not 1 <= i <= nvars:
        raise IndexError(f"variable index {i} out of range 1..{nvars}")
    return i - 1


def _var_name(pos: int, time: bool, latex: bool = False) -> str:
    if time:
        if pos == 0:
            return "t"
        idx = pos
    else:
        idx = pos + 1
    return f"x_{{{idx}}}" if latex else f"x{idx}"


def _fmt_monomial(exps: Exponents, time: bool) -> str:
    parts = []
    for pos, e in enumerate(exps):
        if e:
            name = _var_name(pos, time)
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


class VectorPolynomial:
    """Column of polynomials ``f = sum_r f_r e_r`` sharing one variable layout."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector polynomial needs at least one component")
        first = comps[0]
        for c in comps[1:]:
            first._check(c)
        self.components = comps

    @classmethod
    def zero(cls, size: int, nvars: int, time: bool = False) -> "VectorPolynomial":
        return cls([Polynomial.zero(nvars, time)] * size)

    @classmethod
    def unit(cls, size: int, r: int, nvars: Optional[int] = None, time: bool = False,
             coef: Optional[Polynomial] = None) -> "VectorPolynomial":
        """``coef * e_r`` (``e_r`` the r-th unit column, 1-based)."""
        nvars = size if nvars is None else nvars
        zero = Polynomial.zero(nvars, time)
        one = coef if coef is not None else Polynomial.constant(nvars, 1, time)
        return cls([one if j == r else zero for j in range(1, size + 1)])

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def time(self) -> bool:
        return self.components[0].time

    def __getitem__(self, r: int) -> Polynomial:
        """1-based component access."""
        if not 1 <= r <= len(self.components):
            raise IndexError(r)
        return self.components[r - 1]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorPolynomial):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def _check(self, other: "VectorPolynomial") -> None:
        if len(self) != len(other):
            raise ValueError(f"size mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        if not isinstance(other, VectorPolynomial):
            return NotImplemented
        self._check(other)
        return VectorPolynomial(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        if not isinstance(other, VectorPolynomial):
            return NotImplemented
        self._check(other)
        return VectorPolynomial(a - b for a, b in zip(self.components, other.components))

    def __neg__(self) -> "VectorPolynomial":
        return VectorPolynomial(-a for a in self.components)

    def __mul__(self, other) -> "VectorPolynomial":
        if isinstance(other, (int, Rational, Polynomial)):
            return VectorPolynomial(c * other for c in self.components)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> "VectorPolynomial":
        return VectorPolynomial(p.scale(c) for p in self.components)

    def map(self, func) -> "VectorPolynomial":
        return VectorPolynomial(func(p) for p in self.components)

    def degree(self) -> Optional[int]:
        degs = [d for d in (c.degree() for c in self.components) if d is not None]
        return max(degs) if degs else None

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = {d for d in (c.degree() for c in self.components) if d is not None}
        if not all(c.is_homogeneous() for c in self.components):
            return False
        if len(degs) > 1:
            return False
        return degree is None or not degs or degs.pop() == degree

    def substitute_permutation(self, var_perm: Mapping[int, int],
                               comp_perm: Optional[Mapping[int, int]] = None) -> "VectorPolynomial":
        """Rename variables and move component ``r`` to slot ``comp_perm[r]``."""
        comp_perm = dict(comp_perm) if comp_perm is not None else dict(var_perm)
        renamed = [c.substitute_permutation(var_perm) for c in self.components]
        out = list(renamed)
        for r in range(1, len(renamed) + 1):
            out[comp_perm.get(r, r) - 1] = renamed[r - 1]
        return VectorPolynomial(out)

    def evaluate(self, point: Sequence[float]) -> list:
        return [c.evaluate(point) for c in self.components]

    def __repr__(self) -> str:
        return "VectorPolynomial(" + ", ".join(str(c) for c in self.components) + ")"

    def latex(self) -> str:
        rows = r" \\ ".join(c.latex() for c in self.components)
        return r"\begin{pmatrix} " + rows + r" \end{pmatrix}"

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "VectorPolynomial":
        return cls(Polynomial.from_json(c) for c in doc["components"])


def dumps(obj, **kwargs) -> str:
    """JSON text for a polynomial or vector polynomial."""
    return json.dumps(obj.to_json(), **kwargs)
