import numpy as np
import pytest
from hypothesis import strategies as st

from fockladder.fock import DiagonalState, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@st.composite
def pure_states(draw, max_dim=20):
    dim = draw(st.integers(2, max_dim))
    re = draw(st.lists(st.floats(-1, 1), min_size=dim, max_size=dim))
    im = draw(st.lists(st.floats(-1, 1), min_size=dim, max_size=dim))
    c = np.array(re) + 1j * np.array(im)
    c[draw(st.integers(1, dim - 1))] += 1.0  # keeps support on n >= 1
    return PureState(c / np.linalg.norm(c))


@st.composite
def diagonal_states(draw, max_dim=20):
    dim = draw(st.integers(2, max_dim))
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=dim, max_size=dim)))
    w[draw(st.integers(1, dim - 1))] += 0.5
    return DiagonalState(w / w.sum())


field_states = st.one_of(pure_states(), diagonal_states())
