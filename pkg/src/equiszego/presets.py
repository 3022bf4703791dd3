"""Canonical weight systems used by the experiment runner and the tests."""

import numpy as np

from .actions import WeightSystem


def p1_weight_system() -> WeightSystem:
    """Projective line with the two commuting circle actions
    (weights (1,-1) fixed block, (1,2) scaled block)."""
    return WeightSystem(n=1, W_G=np.array([[1, -1]]), W_T=np.array([[1, 2]]))


def p2_weight_system() -> WeightSystem:
    """Projective plane with a two-torus fixed block (weights (1,-1,0) and
    (0,1,-1)) and the (1,2,3) scaled circle."""
    return WeightSystem(
        n=2, W_G=np.array([[1, -1, 0], [0, 1, -1]]), W_T=np.array([[1, 2, 3]])
    )


def level_weight_system(n: int) -> WeightSystem:
    """No fixed block, scaled circle acting with all weights 1: the isotypes
    are the full degree-k spaces (classical case)."""
    return WeightSystem(
        n=n, W_G=np.zeros((0, n + 1), dtype=int), W_T=np.ones((1, n + 1), dtype=int)
    )


def t_only_weight_system(n: int, weights) -> WeightSystem:
    """No fixed block, one circle with the given weights."""
    return WeightSystem(
        n=n, W_G=np.zeros((0, n + 1), dtype=int), W_T=np.array([weights], dtype=int)
    )


PRESETS = {
    "p1": p1_weight_system,
    "p2": p2_weight_system,
}
