"""Exact symbolic expressions with a decidable zero test.

An expression is a finite sum of monomials with Fraction coefficients.
Monomials are built from three kinds of atoms over ``nvars`` coordinates:

* coordinate powers ``x_i^k``,
* at most one exponential factor ``exp(p)`` whose exponent ``p`` is a
  nonzero polynomial in the coordinates (products merge additively:
  ``exp(p)*exp(q) -> exp(p+q)``, and ``exp(0)`` disappears),
* trigonometric factors ``cos(x_i)^a * sin(x_i)^e`` of single
  coordinates, normalized so that ``e <= 1`` via ``sin^2 = 1 - cos^2``.

A monomial is stored as a hashable triple ``(coords, expkey, trig)``:

  coords:  tuple of (index, power), sorted, powers >= 1
  expkey:  canonical key of the exponent polynomial, () when absent;
           the key is a tuple of (coords-tuple, Fraction) pairs, sorted
  trig:    tuple of (index, cos_power, sin_power), sorted, with
           sin_power in {0, 1} and (cos_power, sin_power) != (0, 0)

Because coefficients are exact rationals and the canonical form stores no
zero coefficients, an expression is identically zero iff it stores no
terms: exponentials with distinct exponent polynomials are linearly
independent over rational-coefficient trig polynomials, and the
sin-reduced trig monomials are linearly independent over the polynomial
ring.  ``is_zero`` is therefore a structural check.

All values are immutable after construction and all operations are pure;
expressions may be shared freely across threads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Coords = tuple[tuple[int, int], ...]
PolyKey = tuple[tuple[Coords, Fraction], ...]
Trig = tuple[tuple[int, int, int], ...]
Mono = tuple[Coords, PolyKey, Trig]

MONO_ONE: Mono = ((), (), ())

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Operands disagree on the number of coordinates, or an index is out of range."""


class UnsupportedExpressionError(ValueError):
    """The requested operation would leave the supported expression class."""


def parse_rational(value) -> Fraction:
    """Convert an int or a string ('p/q', integer, or finite decimal) to an exact Fraction.

    Floats are rejected: binary floats do not round-trip decimal input exactly.
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a rational number, got boolean {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}: {exc}") from None
    raise ValueError(
        f"expected int or string rational, got {type(value).__name__} {value!r}"
        " (write decimals and fractions as strings)"
    )


# ---------------------------------------------------------------------------
# coords / polynomial-key helpers


def _coords_mul(a: Coords, b: Coords) -> Coords:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for i, p in b:
        acc[i] = acc.get(i, 0) + p
    return tuple(sorted(acc.items()))


def _key_add(a: PolyKey, b: PolyKey) -> PolyKey:
    acc = dict(a)
    for mono, c in b:
        s = acc.get(mono, ZERO) + c
        if s == 0:
            acc.pop(mono, None)
        else:
            acc[mono] = s
    return tuple(sorted(acc.items()))


def _key_partial(key: PolyKey, i: int) -> PolyKey:
    out: dict[Coords, Fraction] = {}
    for coords, c in key:
        for j, p in coords:
            if j != i:
                continue
            rest = tuple((k, q) for k, q in coords if k != j)
            if p > 1:
                rest = tuple(sorted(rest + ((j, p - 1),)))
            out[rest] = out.get(rest, ZERO) + c * p
    return tuple(sorted((m, c) for m, c in out.items() if c != 0))


def _key_eval(key: PolyKey, point: Sequence[Fraction]) -> Fraction:
    total = ZERO
    for coords, c in key:
        v = c
        for i, p in coords:
            v *= point[i] ** p
        total += v
    return total


# ---------------------------------------------------------------------------
# Expr


class Expr:
    """Canonical expression: immutable map from monomial to Fraction coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Mono, Fraction]):
        if nvars < 0:
            raise DimensionError(f"nvars must be >= 0, got {nvars}")
        self.nvars = nvars
        self.terms = terms

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Expr":
        return Expr(nvars, {})

    @staticmethod
    def const(nvars: int, value) -> "Expr":
        c = Fraction(value)
        return Expr(nvars, {} if c == 0 else {MONO_ONE: c})

    @staticmethod
    def coord(nvars: int, i: int) -> "Expr":
        if not 0 <= i < nvars:
            raise DimensionError(f"coordinate index {i} out of range for nvars={nvars}")
        return Expr(nvars, {(((i, 1),), (), ()): ONE})

    # -- canonical structure -------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Expr)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Expr({self.nvars}, {to_string(self)!r})"

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.nvars != self.nvars:
                raise DimensionError(
                    f"mixed coordinate counts: {self.nvars} vs {other.nvars}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return Expr.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        acc = dict(self.terms)
        for mono, c in o.terms.items():
            s = acc.get(mono, ZERO) + c
            if s == 0:
                acc.pop(mono, None)
            else:
                acc[mono] = s
        return Expr(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Expr":
        return (-self) + other

    def __mul__(self, other) -> "Expr":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        acc: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                _accumulate_product(acc, m1, m2, c1 * c2)
        return Expr(self.nvars, {m: c for m, c in acc.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"power must be a nonnegative integer, got {n!r}")
        result = Expr.const(self.nvars, 1)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- queries -------------------------------------------------------------

    def is_polynomial(self) -> bool:
        return all(not expk and not trig for _, expk, trig in self.terms)

    def constant_value(self) -> Fraction | None:
        """The Fraction value if this expression is a constant, else None."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and MONO_ONE in self.terms:
            return self.terms[MONO_ONE]
        return None


def _reduce_sin(mono: Mono, coeff: Fraction, out: dict[Mono, Fraction]) -> None:
    """Accumulate coeff*mono into out, rewriting sin^2 -> 1 - cos^2 until sin powers <= 1."""
    work = [(mono, coeff)]
    while work:
        (coords, expk, trig), c = work.pop()
        hot = next((t for t in trig if t[2] >= 2), None)
        if hot is None:
            clean = tuple(t for t in trig if t[1] or t[2])
            m = (coords, expk, clean)
            s = out.get(m, ZERO) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
            continue
        i, cp, sp = hot
        rest = tuple(t for t in trig if t[0] != i)
        low = tuple(sorted(rest + ((i, cp, sp - 2),)))
        high = tuple(sorted(rest + ((i, cp + 2, sp - 2),)))
        work.append(((coords, expk, low), c))
        work.append(((coords, expk, high), -c))


def _accumulate_product(
    acc: dict[Mono, Fraction], m1: Mono, m2: Mono, coeff: Fraction
) -> None:
    coords = _coords_mul(m1[0], m2[0])
    expk = _key_add(m1[1], m2[1])
    if m1[2] or m2[2]:
        tr = dict()
        for i, cp, sp in m1[2]:
            tr[i] = (cp, sp)
        for i, cp, sp in m2[2]:
            a, b = tr.get(i, (0, 0))
            tr[i] = (a + cp, b + sp)
        trig = tuple(sorted((i, cp, sp) for i, (cp, sp) in tr.items()))
    else:
        trig = ()
    _reduce_sin((coords, expk, trig), coeff, acc)


# ---------------------------------------------------------------------------
# core operations


def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def neg(a: Expr) -> Expr:
    return -a


def is_zero(e: Expr) -> bool:
    """True iff e is identically zero (sound on this expression class)."""
    return not e.terms


def exp_of(p: Expr) -> Expr:
    """exp(p) for a polynomial exponent p; exp(0) canonicalizes to 1."""
    if not p.is_polynomial():
        raise UnsupportedExpressionError(
            "exponentials take polynomial exponents only"
        )
    key = tuple(sorted((coords, c) for (coords, _, _), c in p.terms.items()))
    if not key:
        return Expr.const(p.nvars, 1)
    return Expr(p.nvars, {((), key, ()): ONE})


def cos_of(nvars: int, i: int) -> Expr:
    if not 0 <= i < nvars:
        raise DimensionError(f"coordinate index {i} out of range for nvars={nvars}")
    return Expr(nvars, {((), (), ((i, 1, 0),)): ONE})


def sin_of(nvars: int, i: int) -> Expr:
    if not 0 <= i < nvars:
        raise DimensionError(f"coordinate index {i} out of range for nvars={nvars}")
    return Expr(nvars, {((), (), ((i, 0, 1),)): ONE})


def partial_derivative(e: Expr, i: int) -> Expr:
    """Exact partial derivative with respect to coordinate i."""
    if not 0 <= i < e.nvars:
        raise DimensionError(f"coordinate index {i} out of range for nvars={e.nvars}")
    acc: dict[Mono, Fraction] = {}
    for (coords, expk, trig), c in e.terms.items():
        # d/dx_i of the coordinate part
        for j, p in coords:
            if j != i:
                continue
            rest = tuple((k, q) for k, q in coords if k != j)
            if p > 1:
                rest = tuple(sorted(rest + ((j, p - 1),)))
            _reduce_sin((rest, expk, trig), c * p, acc)
        # d/dx_i of exp(P) contributes (dP/dx_i) * exp(P) * rest
        if expk:
            dkey = _key_partial(expk, i)
            for dcoords, dc in dkey:
                _reduce_sin((_coords_mul(coords, dcoords), expk, trig), c * dc, acc)
        # d/dx_i of cos^a sin^e on coordinate i
        for j, cp, sp in trig:
            if j != i:
                continue
            rest_tr = tuple(t for t in trig if t[0] != j)
            if cp:
                m = tuple(sorted(rest_tr + ((j, cp - 1, sp + 1),)))
                _reduce_sin((coords, expk, m), -c * cp, acc)
            if sp:
                m = tuple(sorted(rest_tr + ((j, cp + 1, sp - 1),)))
                _reduce_sin((coords, expk, m), c * sp, acc)
    return Expr(e.nvars, {m: c for m, c in acc.items() if c != 0})


def _coord_image_index(image: Expr) -> int | None:
    """Index j if image is exactly the coordinate x_j, else None."""
    if len(image.terms) != 1:
        return None
    (mono, c), = image.terms.items()
    coords, expk, trig = mono
    if c == 1 and not expk and not trig and len(coords) == 1 and coords[0][1] == 1:
        return coords[0][0]
    return None


def substitute(e: Expr, images: Sequence[Expr]) -> Expr:
    """Replace coordinate i by images[i] and re-canonicalize.

    Exponent polynomials must stay polynomial after substitution, and
    cos/sin arguments must map to plain coordinates; anything else raises
    UnsupportedExpressionError.
    """
    if len(images) != e.nvars:
        raise DimensionError(
            f"expected {e.nvars} images, got {len(images)}"
        )
    if images:
        n2 = images[0].nvars
        for im in images:
            if im.nvars != n2:
                raise DimensionError("substitution images disagree on nvars")
    else:
        n2 = 0
    out = Expr.zero(n2)
    for (coords, expk, trig), c in e.terms.items():
        acc = Expr.const(n2, c)
        for i, p in coords:
            acc = acc * images[i] ** p
        if expk:
            new_exp = Expr.zero(n2)
            for kcoords, kc in expk:
                t = Expr.const(n2, kc)
                for i, p in kcoords:
                    t = t * images[i] ** p
                new_exp = new_exp + t
            if not new_exp.is_polynomial():
                raise UnsupportedExpressionError(
                    "substitution produced a non-polynomial exponent"
                )
            acc = acc * exp_of(new_exp)
        for i, cp, sp in trig:
            j = _coord_image_index(images[i])
            if j is None:
                raise UnsupportedExpressionError(
                    "cos/sin accept single coordinates only; substitution image"
                    f" of x{i + 1} is not a coordinate"
                )
            acc = acc * cos_of(n2, j) ** cp * sin_of(n2, j) ** sp
        out = out + acc
    return out


def evaluate(e: Expr, point: Sequence) -> float:
    """Evaluate at a rational point in double precision."""
    pt = [Fraction(x) for x in point]
    if len(pt) != e.nvars:
        raise DimensionError(f"expected {e.nvars} coordinates, got {len(pt)}")
    total = 0.0
    for mono, c in e.terms.items():
        total += _eval_mono(mono, c, pt)
    return total


def _eval_mono(mono: Mono, coeff: Fraction, pt: Sequence[Fraction]) -> float:
    coords, expk, trig = mono
    v = float(coeff)
    for i, p in coords:
        v *= float(pt[i]) ** p
    if expk:
        try:
            v *= math.exp(float(_key_eval(expk, pt)))
        except OverflowError:
            v = math.inf if v > 0 else -math.inf
    for i, cp, sp in trig:
        x = float(pt[i])
        if cp:
            v *= math.cos(x) ** cp
        if sp:
            v *= math.sin(x) ** sp
    return v


def evaluate_float(e: Expr, point: Sequence[float]) -> float:
    """Evaluate at a float point (internal numeric paths; no exactness claims)."""
    if len(point) != e.nvars:
        raise DimensionError(f"expected {e.nvars} coordinates, got {len(point)}")
    total = 0.0
    for (coords, expk, trig), c in e.terms.items():
        v = float(c)
        for i, p in coords:
            v *= point[i] ** p
        if expk:
            arg = 0.0
            for kcoords, kc in expk:
                t = float(kc)
                for i, p in kcoords:
                    t *= point[i] ** p
                arg += t
            try:
                v *= math.exp(arg)
            except OverflowError:
                v = math.inf if v > 0 else -math.inf
        for i, cp, sp in trig:
            if cp:
                v *= math.cos(point[i]) ** cp
            if sp:
                v *= math.sin(point[i]) ** sp
        total += v
    return total


def max_term_magnitude(e: Expr, point: Sequence) -> float:
    """Largest |monomial value| at the point; used to normalize numeric tolerances."""
    pt = [Fraction(x) for x in point]
    best = 0.0
    for mono, c in e.terms.items():
        best = max(best, abs(_eval_mono(mono, c, pt)))
    return best


def evaluate_exact(e: Expr, point: Sequence) -> Fraction:
    """Exact evaluation; raises UnsupportedExpressionError on exp/cos/sin terms."""
    pt = [Fraction(x) for x in point]
    if len(pt) != e.nvars:
        raise DimensionError(f"expected {e.nvars} coordinates, got {len(pt)}")
    total = ZERO
    for (coords, expk, trig), c in e.terms.items():
        if expk or trig:
            raise UnsupportedExpressionError(
                "exact evaluation is defined for pure polynomials only"
            )
        v = c
        for i, p in coords:
            v *= pt[i] ** p
        total += v
    return total


# ---------------------------------------------------------------------------
# rendering and parsing
#
# Rendered strings are themselves valid expression inputs, so reports can be
# fed back in as custom map components.  Grammar:
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*' factor) | ('/' number))*
#   factor := ('-'|'+') factor | base ('^' INT)?
#   base   := number | name | ('exp'|'cos'|'sin') '(' expr ')' | '(' expr ')'
#   name   := x<k>  (aliases: x=x1, y=x2, z=x3)
#
# Division is exact and only by numeric literals.


def _mono_sort_key(mono: Mono):
    coords, expk, trig = mono
    deg = sum(p for _, p in coords) + sum(cp + sp for _, cp, sp in trig)
    return (-deg, coords, expk, trig)


def _render_coeff(c: Fraction) -> str:
    return str(c)


def _render_mono(mono: Mono) -> str:
    coords, expk, trig = mono
    parts = []
    for i, p in coords:
        parts.append(f"x{i + 1}" + (f"^{p}" if p > 1 else ""))
    if expk:
        inner = to_string(Expr(_max_index(mono) + 1, {(kc, (), ()): c for kc, c in expk}))
        parts.append(f"exp({inner})")
    for i, cp, sp in trig:
        if cp:
            parts.append(f"cos(x{i + 1})" + (f"^{cp}" if cp > 1 else ""))
        if sp:
            parts.append(f"sin(x{i + 1})")
    return "*".join(parts)


def _max_index(mono: Mono) -> int:
    coords, expk, trig = mono
    idx = [i for i, _ in coords] + [i for i, _, _ in trig]
    for kcoords, _ in expk:
        idx.extend(i for i, _ in kcoords)
    return max(idx, default=0)


def to_string(e: Expr) -> str:
    """Deterministic canonical rendering (graded order, explicit * and ^)."""
    if not e.terms:
        return "0"
    pieces = []
    for mono in sorted(e.terms, key=_mono_sort_key):
        c = e.terms[mono]
        body = _render_mono(mono)
        mag = abs(c)
        if not body:
            text = _render_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_render_coeff(mag)}*{body}"
        if not pieces:
            pieces.append(text if c > 0 else f"-{text}")
        else:
            pieces.append(("+ " if c > 0 else "- ") + text)
    return " ".join(pieces)


class ExprParseError(ValueError):
    """Malformed expression string."""


_ALIASES = {"x": 1, "y": 2, "z": 3}
_FUNCS = ("exp", "cos", "sin")


def _tokenize(s: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    i, n = 0, len(s)
    while i < n:
        ch = s[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/^()":
            tokens.append((ch, ch))
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and s[i + 1].isdigit()):
            j = i
            while j < n and (s[j].isdigit() or s[j] == "."):
                j += 1
            tokens.append(("num", s[i:j]))
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (s[j].isalnum() or s[j] == "_"):
                j += 1
            tokens.append(("name", s[i:j]))
            i = j
        else:
            raise ExprParseError(f"unexpected character {ch!r} at position {i}")
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], nvars: int):
        self.tokens = tokens
        self.pos = 0
        self.nvars = nvars

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.pos]

    def take(self, kind: str | None = None) -> tuple[str, str]:
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ExprParseError(f"expected {kind}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse_expr(self) -> Expr:
        value = self.parse_term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> Expr:
        value = self.parse_factor()
        while self.peek()[0] in "*/":
            op = self.take()[0]
            rhs = self.parse_factor()
            if op == "*":
                value = value * rhs
            else:
                const = rhs.constant_value()
                if const is None or const == 0:
                    raise ExprParseError("division is allowed by nonzero constants only")
                value = value * (Fraction(1) / const)
        return value

    def parse_factor(self) -> Expr:
        kind, text = self.peek()
        if kind in "+-":
            self.take()
            inner = self.parse_factor()
            return inner if kind == "+" else -inner
        base = self.parse_base()
        if self.peek()[0] == "^":
            self.take()
            if self.peek()[0] == "-":
                raise ExprParseError("negative powers are not supported")
            num = self.take("num")[1]
            if "." in num:
                raise ExprParseError(f"power must be an integer, got {num!r}")
            return base ** int(num)
        return base

    def parse_base(self) -> Expr:
        kind, text = self.take()
        if kind == "num":
            return Expr.const(self.nvars, Fraction(text))
        if kind == "(":
            inner = self.parse_expr()
            self.take(")")
            return inner
        if kind == "name":
            if text in _FUNCS:
                self.take("(")
                arg = self.parse_expr()
                self.take(")")
                if text == "exp":
                    return exp_of(arg)
                j = _coord_image_index(arg)
                if j is None:
                    raise ExprParseError(f"{text}() accepts a single coordinate")
                return cos_of(self.nvars, j) if text == "cos" else sin_of(self.nvars, j)
            idx = None
            if text.startswith("x") and text[1:].isdigit():
                idx = int(text[1:])
            elif text in _ALIASES:
                idx = _ALIASES[text]
            if idx is None:
                raise ExprParseError(f"unknown name {text!r}")
            if not 1 <= idx <= self.nvars:
                raise ExprParseError(
                    f"coordinate {text!r} out of range for {self.nvars} variables"
                )
            return Expr.coord(self.nvars, idx - 1)
        raise ExprParseError(f"unexpected token {text!r}")


def parse_expr(s: str, nvars: int) -> Expr:
    """Parse an expression string over coordinates x1..x<nvars> (aliases x, y, z)."""
    parser = _Parser(_tokenize(s), nvars)
    value = parser.parse_expr()
    parser.take("end")
    return value
