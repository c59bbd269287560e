import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings, strategies as st

from keplerreg.phase import CartesianState

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coord = st.floats(0.1, 3.0, allow_nan=False)


@st.composite
def bound_states(draw, min_binding=1e-2):
    """Bound states built from a speed below escape, so little is filtered."""
    q = np.array([draw(coord) for _ in range(3)])
    r = float(np.linalg.norm(q))
    theta = draw(st.floats(0.0, math.pi))
    az = draw(st.floats(0.0, 2 * math.pi))
    d = np.array([math.sin(theta) * math.cos(az), math.sin(theta) * math.sin(az), math.cos(theta)])
    f = draw(st.floats(0.0, math.sqrt(max(0.0, 1.0 - min_binding * r))))
    s = CartesianState(q, f * math.sqrt(2.0 / r) * d)
    assume(s.energy < -min_binding)
    assume(np.linalg.norm(np.cross(s.q, s.p)) > 1e-3)
    return s


@st.composite
def unbound_states(draw, max_angle=3.0):
    q = np.array([draw(coord) for _ in range(3)])
    H = draw(st.floats(0.05, 2.0))
    theta = draw(st.floats(0.0, math.pi))
    az = draw(st.floats(0.0, 2 * math.pi))
    d = np.array([math.sin(theta) * math.cos(az), math.sin(theta) * math.sin(az), math.cos(theta)])
    p = math.sqrt(2.0 * (H + 1.0 / np.linalg.norm(q))) * d
    assume(abs(math.sqrt(2 * H) * float(q @ p)) <= max_angle)
    return CartesianState(q, p)


chain_coord = st.floats(-1.5, 1.5, allow_nan=False)


@st.composite
def chain_points(draw, min_z=1e-2):
    v = np.array([draw(chain_coord) for _ in range(4)])
    assume(math.hypot(v[2], v[3]) > min_z)
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
