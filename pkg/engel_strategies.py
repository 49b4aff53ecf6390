"""Hypothesis strategies shared by the test modules."""

import os
import sys
from fractions import Fraction

from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from engel.exactnum import GaussianRational
from engel.poly import STANDARD_AMBIENT, MultiPoly, UniPoly

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def gaussians(draw, nonzero=False):
    value = GaussianRational(draw(small_fractions), draw(small_fractions))
    if nonzero and not value:
        value = GaussianRational(Fraction(1))
    return value


@st.composite
def unipolys(draw, max_degree=4):
    return UniPoly(draw(st.lists(gaussians(), min_size=0, max_size=max_degree + 1)))


@st.composite
def multipolys(draw, ambient=STANDARD_AMBIENT, max_degree=2, max_terms=3):
    exps = st.tuples(*[st.integers(0, max_degree) for _ in ambient]).filter(lambda e: sum(e) <= max_degree)
    terms = draw(st.dictionaries(exps, gaussians(), max_size=max_terms))
    return MultiPoly(ambient, terms)
