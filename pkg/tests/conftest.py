from __future__ import annotations

import pytest

from kslab.poset import ChainPartition, disjoint_chains, poset_from_relations


@pytest.fixture
def c33():
    """Two disjoint 3-chains: alpha = 1, 2, 3 and beta = 4, 5, 6."""
    return disjoint_chains(3, 3), ChainPartition((1, 2, 3), (4, 5, 6))


@pytest.fixture
def pentagon():
    """alpha = 1 < 2 < 3, beta = 4 < 5, with 1 < 4 and 5 < 3; alpha_2 sits beside both betas."""
    p = poset_from_relations(5, [(1, 2), (2, 3), (4, 5), (1, 4), (5, 3)])
    return p, ChainPartition((1, 2, 3), (4, 5))
