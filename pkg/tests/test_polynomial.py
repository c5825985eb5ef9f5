from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from lagrad.polynomial import Polynomial

V = ("a", "b", "c")
terms = st.dictionaries(st.tuples(*[st.integers(0, 3)] * 3),
                        st.fractions(max_denominator=7).filter(lambda x: x != 0), max_size=5)


def to_sympy(P):
    syms = sp.symbols(P.variables)
    return sp.expand(sum(sp.Rational(c.numerator, c.denominator)
                         * sp.Mul(*[s ** k for s, k in zip(syms, e)]) for e, c in P.terms.items()))


@settings(max_examples=60, deadline=None)
@given(terms, terms, st.tuples(*[st.integers(0, 2)] * 3))
def test_arithmetic_and_diff_match_sympy(t1, t2, alpha):
    P, Q = Polynomial(V, t1), Polynomial(V, t2)
    syms = sp.symbols(V)
    assert sp.expand(to_sympy(P * Q) - to_sympy(P) * to_sympy(Q)) == 0
    assert sp.expand(to_sympy(P - Q) - (to_sympy(P) - to_sympy(Q))) == 0
    d = to_sympy(P)
    for s, k in zip(syms, alpha):
        d = sp.diff(d, s, k)
    assert sp.expand(to_sympy(P.diff(alpha)) - d) == 0


def test_basic():
    a, b = Polynomial.var(V, "a"), Polynomial.var(V, "b")
    P = (a + 2 * b) ** 2
    assert P((1, 1, 0)) == 9
    assert P.degree() == 2
    assert P.diff((2, 0, 0)) == 2
    assert (P - P).is_zero()
    assert Polynomial.constant(V, Fraction(3, 4)).constant_value() == Fraction(3, 4)
    with pytest.raises(ValueError):
        a ** -1
