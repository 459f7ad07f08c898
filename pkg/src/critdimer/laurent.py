"""Exact Laurent-polynomial arithmetic over the rationals in t_1..t_n.

Polynomials are stored as a dict from integer exponent vectors (tuples of
length n, negative entries allowed) to nonzero coefficients.  Coefficients
are Python ints whenever possible and ``fractions.Fraction`` otherwise, so
all arithmetic is exact.  The scalar type of the whole library is this class
plus the distinguished elements ``bracket(n, q, p) = t_q/t_p - t_p/t_q``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Coeff = Union[int, Fraction]


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class LaurentPoly:
    """A Laurent polynomial in n variables with exact rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], Coeff] | None = None):
        self.n = n
        clean: dict[tuple[int, ...], Coeff] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != n:
                    raise ValueError(f"exponent vector {exp} has length != {n}")
                c = _norm_coeff(c)
                if c != 0:
                    clean[tuple(exp)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "LaurentPoly":
        return LaurentPoly(n)

    @staticmethod
    def const(n: int, c: Coeff) -> "LaurentPoly":
        return LaurentPoly(n, {(0,) * n: c})

    @staticmethod
    def one(n: int) -> "LaurentPoly":
        return LaurentPoly.const(n, 1)

    @staticmethod
    def variable(n: int, i: int, power: int = 1) -> "LaurentPoly":
        """t_i**power, with i in 1..n."""
        exp = [0] * n
        exp[i - 1] = power
        return LaurentPoly(n, {tuple(exp): 1})

    @staticmethod
    def monomial(n: int, exp: Sequence[int], c: Coeff = 1) -> "LaurentPoly":
        return LaurentPoly(n, {tuple(exp): c})

    # -- ring structure ----------------------------------------------------

    def _check(self, other: "LaurentPoly") -> None:
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} != {other.n}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, 0) + c
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = _norm_coeff(s)
        out = LaurentPoly(self.n)
        out.terms = terms
        return out

    def __neg__(self) -> "LaurentPoly":
        out = LaurentPoly(self.n)
        out.terms = {exp: -c for exp, c in self.terms.items()}
        return out

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        self._check(other)
        if len(self.terms) > len(other.terms):
            a, b = other, self
        else:
            a, b = self, other
        terms: dict[tuple[int, ...], Coeff] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                exp = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(exp, 0) + c1 * c2
                if s == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = s
        out = LaurentPoly(self.n)
        out.terms = {e: _norm_coeff(c) for e, c in terms.items()}
        return out

    __rmul__ = __mul__

    def scalar_mul(self, c: Coeff) -> "LaurentPoly":
        if c == 0:
            return LaurentPoly.zero(self.n)
        out = LaurentPoly(self.n)
        out.terms = {exp: _norm_coeff(v * c) for exp, v in self.terms.items()}
        return out

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (exp, c), = self.terms.items()
            coeff = Fraction(1) / Fraction(c) ** (-k)
            return LaurentPoly.monomial(self.n, tuple(k * e for e in exp), _norm_coeff(coeff))
        out = LaurentPoly.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.n, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- display -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coeff]]:
        """Graded-lex order on exponent vectors; deterministic canonical order."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            factors = [f"t{i + 1}" if e == 1 else f"t{i + 1}^{e}"
                       for i, e in enumerate(exp) if e != 0]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s

    def to_json(self) -> list:
        """Compact term list [[exponents..., num, den], ...] for golden files."""
        out = []
        for exp, c in self.sorted_terms():
            f = Fraction(c)
            out.append(list(exp) + [f.numerator, f.denominator])
        return out

    @staticmethod
    def from_json(n: int, data: Iterable[Sequence[int]]) -> "LaurentPoly":
        terms = {}
        for row in data:
            exp = tuple(row[:n])
            terms[exp] = _norm_coeff(Fraction(row[n], row[n + 1]))
        return LaurentPoly(n, terms)

    # -- evaluation ---------------------------------------------------------

    def eval(self, t: Sequence[complex]) -> complex:
        """Substitute complex values t = (t_1..t_n); all entries must be nonzero."""
        if len(t) != self.n:
            raise ValueError("wrong number of values")
        if any(v == 0 for v in t):
            raise ZeroDivisionError("substitution value is zero")
        total = 0j
        for exp, c in self.terms.items():
            m = complex(1.0)
            for v, e in zip(t, exp):
                if e:
                    m *= v ** e
            total += complex(c) * m
        return total

    def eval_theta(self, theta: Sequence[float]) -> complex:
        """Evaluate at t_p = exp(i*theta_p)."""
        return self.eval([cmath.exp(1j * th) for th in theta])

    # -- division -----------------------------------------------------------

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial t^exp."""
        out = LaurentPoly(self.n)
        out.terms = {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()}
        return out

    def _divide_linear(self, q: int, p: int, sign: int) -> "LaurentPoly":
        """Exact division by (t_q - sign*t_p), main variable t_q (1-indexed).

        Raises ValueError when the division leaves a remainder.
        """
        if self.is_zero():
            return self
        qi, pi = q - 1, p - 1
        # Clear negative exponents of t_q so we divide a genuine polynomial in t_q.
        mn = min(e[qi] for e in self.terms)
        work = self if mn >= 0 else self.shift(tuple(-mn if i == qi else 0 for i in range(self.n)))
        # Group by degree in t_q; coefficients keyed by exponent vectors with slot q zeroed.
        by_deg: dict[int, dict[tuple[int, ...], Coeff]] = {}
        for exp, c in work.terms.items():
            d = exp[qi]
            rest = exp[:qi] + (0,) + exp[qi + 1:]
            by_deg.setdefault(d, {})[rest] = c
        D = max(by_deg)
        quot: dict[int, dict[tuple[int, ...], Coeff]] = {}
        carry: dict[tuple[int, ...], Coeff] = {}
        for d in range(D, 0, -1):
            coeff = dict(by_deg.get(d, {}))
            for rest, c in carry.items():
                s = coeff.get(rest, 0) + c
                if s == 0:
                    coeff.pop(rest, None)
                else:
                    coeff[rest] = s
            if coeff:
                quot[d - 1] = coeff
            # carry for next lower degree: sign * t_p * coeff
            carry = {}
            for rest, c in coeff.items():
                shifted = rest[:pi] + (rest[pi] + 1,) + rest[pi + 1:]
                carry[shifted] = sign * c
        rem = dict(by_deg.get(0, {}))
        for rest, c in carry.items():
            s = rem.get(rest, 0) + c
            if s == 0:
                rem.pop(rest, None)
            else:
                rem[rest] = s
        if rem:
            raise ValueError(
                f"division by (t{q} {'-' if sign > 0 else '+'} t{p}) leaves a remainder")
        terms: dict[tuple[int, ...], Coeff] = {}
        for d, coeff in quot.items():
            for rest, c in coeff.items():
                exp = rest[:qi] + (d,) + rest[qi + 1:]
                terms[exp] = _norm_coeff(c)
        out = LaurentPoly(self.n)
        out.terms = terms
        if mn < 0:
            out = out.shift(tuple(mn if i == qi else 0 for i in range(self.n)))
        return out

    def divide_bracket(self, q: int, p: int) -> "LaurentPoly":
        """Exact division by [q,p] = t_q/t_p - t_p/t_q, with p < q.

        Uses [q,p]*t_p*t_q = (t_q - t_p)(t_q + t_p); a nonzero remainder in
        either linear division signals a false divisibility claim.
        """
        if not 1 <= p < q <= self.n:
            raise ValueError("bracket indices must satisfy 1 <= p < q <= n")
        shift = [0] * self.n
        shift[p - 1] += 1
        shift[q - 1] += 1
        return self.shift(shift)._divide_linear(q, p, +1)._divide_linear(q, p, -1)

    def divide_monomial(self, exp: Sequence[int], c: Coeff = 1) -> "LaurentPoly":
        if c == 0:
            raise ZeroDivisionError("monomial coefficient is zero")
        out = self.shift(tuple(-e for e in exp))
        if c != 1:
            out = out.scalar_mul(Fraction(1, 1) / Fraction(c))
        return out


@dataclass(frozen=True)
class Bracket:
    """The element [q,p] = t_q/t_p - t_p/t_q with 1 <= p < q <= n."""

    n: int
    q: int
    p: int

    def __post_init__(self):
        if not 1 <= self.p < self.q <= self.n:
            raise ValueError("need 1 <= p < q <= n")

    def as_poly(self) -> LaurentPoly:
        return bracket(self.n, self.q, self.p)


def bracket(n: int, q: int, p: int) -> LaurentPoly:
    """br[t_q, t_p] = t_q/t_p - t_p/t_q; antisymmetric in (q, p)."""
    if q == p:
        raise ValueError("bracket indices coincide")
    e1 = [0] * n
    e1[q - 1], e1[p - 1] = 1, -1
    e2 = [0] * n
    e2[p - 1], e2[q - 1] = 1, -1
    return LaurentPoly(n, {tuple(e1): 1, tuple(e2): -1})


def bracket_eval(tq: complex, tp: complex) -> complex:
    """br[x, y] = x/y - y/x on complex values."""
    return tq / tp - tp / tq


def exact_divide(P: LaurentPoly, factors: Iterable) -> LaurentPoly:
    """Divide P exactly by a list of factors.

    Each factor is a ``Bracket``, a ``(q, p)`` index pair standing for [q,p],
    or a monomial given as an exponent tuple (optionally ``(exp, coeff)``).
    Raises ValueError if any step leaves a remainder.
    """
    out = P
    for f in factors:
        if isinstance(f, Bracket):
            out = out.divide_bracket(f.q, f.p)
        elif isinstance(f, tuple) and len(f) == 2 and all(isinstance(x, int) for x in f):
            q, p = f
            out = out.divide_bracket(q, p)
        elif isinstance(f, tuple) and len(f) == 2:
            exp, c = f
            out = out.divide_monomial(exp, c)
        else:
            out = out.divide_monomial(tuple(f))
    return out
