import random

import pytest
from hypothesis import settings, strategies as st

from dframes.dframe import PairRelation, PairSpace, all_bispaces, omega_d
from dframes.lattice import FinPoset, downset_lattice

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def posets(draw, max_points=3):
    n = draw(st.integers(1, max_points))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return FinPoset.from_relation([f"p{i}" for i in range(n)], chosen)


@st.composite
def frames(draw, max_points=3):
    """Finite distributive lattices as downset lattices of small posets (at most 2^max_points elements)."""
    return downset_lattice(draw(posets(max_points)))


@st.composite
def relations(draw, max_points=2):
    space = PairSpace(draw(frames(max_points)), draw(frames(max_points)))
    cells = [(a, b) for a in range(space.plus.size) for b in range(space.minus.size)]
    members = draw(st.lists(st.sampled_from(cells), unique=True, max_size=6))
    return PairRelation(space, frozenset(members))


BISPACES_2 = all_bispaces(2)


@st.composite
def omega_dframes(draw):
    return omega_d(draw(st.sampled_from(BISPACES_2)))


@pytest.fixture
def rng():
    return random.Random(1234)
