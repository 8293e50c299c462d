"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from kslab.generate import random_poset, random_region


@st.composite
def posets(draw, max_n: int = 7, min_n: int = 1):
    n = draw(st.integers(min_n, max_n))
    density = draw(st.sampled_from([0.0, 0.2, 0.35, 0.5, 0.8]))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_poset(n, density, random.Random(seed))


@st.composite
def regions(draw, max_total: int = 8):
    a = draw(st.integers(0, max_total))
    b = draw(st.integers(0, max_total - a))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_region(a, b, random.Random(seed))
