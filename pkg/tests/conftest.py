"""Shared strategies and hypothesis profile for the test suite."""
import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from parproj import EuclideanSpace, GridSpace, Vec

settings.register_profile(
    "parproj",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("parproj")

# Bounded, finite coordinates keep every geometric quantity far from
# overflow while still exercising signs, zeros and scale differences.
coords = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False,
                   allow_infinity=False, width=64)


def vec_strategy(space, elements=coords):
    return st.lists(elements, min_size=space.dim, max_size=space.dim).map(
        lambda c: Vec(space, c)
    )


R3 = EuclideanSpace(3)
R5 = EuclideanSpace(5)
GRID11 = GridSpace(11)

vecs3 = vec_strategy(R3)
vecs5 = vec_strategy(R5)
grid_vecs = vec_strategy(GRID11)

unit_scale = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
small_vecs3 = vec_strategy(R3, unit_scale)
small_vecs5 = vec_strategy(R5, unit_scale)
small_grid_vecs = vec_strategy(GRID11, unit_scale)


def rng(seed=0):
    return np.random.default_rng(seed)
