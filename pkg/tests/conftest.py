import numpy as np
import pytest
from hypothesis import strategies as st

from calctune import JointTable

from .oracles import T_STAR, cells_of


@pytest.fixture
def t_star():
    return JointTable.from_cells(cells_of(T_STAR))


@pytest.fixture
def uniform():
    return JointTable.uniform()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def tables(draw, floor=1e-3):
    """Strictly positive tables; ``floor`` keeps every slice non-degenerate."""
    w = draw(st.lists(st.floats(floor, 1.0), min_size=8, max_size=8))
    x = np.array(w)
    return JointTable.from_cells(x / x.sum(), renormalize_tol=1e-9)


probabilities = st.floats(0.0, 1.0)
interior = st.floats(1e-3, 1.0 - 1e-3)
