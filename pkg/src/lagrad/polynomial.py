"""Exact multivariate polynomials with rational coefficients.

Terms are stored as ``{exponent tuple: Fraction}`` over a fixed ordered tuple of
variable names; zero coefficients are never stored.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial


class Polynomial:
    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        self.terms: dict[tuple, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                e = tuple(e)
                if len(e) != len(self.variables):
                    raise ValueError("exponent length does not match the variables")
                self.terms[e] = self.terms.get(e, Fraction(0)) + c
        self.terms = {e: c for e, c in self.terms.items() if c}

    # constructors -------------------------------------------------------------
    @classmethod
    def constant(cls, variables, c) -> "Polynomial":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, variables, name) -> "Polynomial":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError("incompatible variable sets")
            return other
        return Polynomial.constant(self.variables, other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return Polynomial(self.variables, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.variables, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ValueError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # calculus -----------------------------------------------------------------
    def diff(self, multi_index) -> "Polynomial":
        """Apply d^alpha for an exponent tuple alpha."""
        t = {}
        for e, c in self.terms.items():
            if any(a < k for a, k in zip(e, multi_index)):
                continue
            coef = c
            for a, k in zip(e, multi_index):
                coef *= factorial(a) // factorial(a - k)
            t[tuple(a - k for a, k in zip(e, multi_index))] = coef
        return Polynomial(self.variables, t)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __call__(self, values):
        """Evaluate at numeric values (sequence in variable order)."""
        total = 0
        for e, c in self.terms.items():
            m = c
            for v, k in zip(values, e):
                if k:
                    m = m * v ** k
            total = total + m
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.variables, e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)
