import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
