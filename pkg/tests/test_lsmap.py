import json
import math

import numpy as np
import pytest
from hypothesis import given

from conftest import bound_states, unbound_states
from keplerreg import lsmap
from keplerreg.errors import CollisionState, DegenerateDenominator, ZeroEnergy
from keplerreg.phase import NEG, POS, CartesianState, SphereState, conserved, eccentricity, minkowski, state_from_json

SQ3 = math.sqrt(3.0)


def assert_state_close(a, b, atol):
    np.testing.assert_allclose(a.q, b.q, atol=atol)
    np.testing.assert_allclose(a.p, b.p, atol=atol)


def test_state_invariants_enforced():
    with pytest.raises(CollisionState):
        CartesianState([0, 0, 0], [0, 1, 0]).check()
    with pytest.raises(ZeroEnergy):
        CartesianState([2, 0, 0], [0, 1, 0]).check()
    s = CartesianState([1, 2], [0.5, 0])
    assert s.q.shape == (3,) and s.q[2] == 0.0
    with pytest.raises(ValueError):
        s.q[0] = 3.0


def test_json_round_trip():
    s = CartesianState([1, 0.5, 0], [0, 1, 0.2])
    back = state_from_json(s.to_json())
    np.testing.assert_array_equal(back.q, s.q)
    sp = lsmap.forward(s)
    back = state_from_json(json.loads(json.dumps(sp.to_json())))
    np.testing.assert_array_equal(back.xi, sp.xi)
    assert back.sign == NEG
    assert list(sp.to_json()) == ["xi", "eta", "sign"]


def test_F1_circular():
    rs = lsmap.forward_F1(CartesianState([1, 0, 0], [0, 1, 0]))
    np.testing.assert_allclose(rs.r, [0, 0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(rs.s, [0, -1, 0, 0], atol=1e-15)


def test_F1_eccentric_s0():
    rs = lsmap.forward_F1(CartesianState([2, 0, 0], [0.1, 0.5, 0]))
    assert rs.s[0] == pytest.approx(-math.sqrt(0.74) * 0.2, abs=1e-15)


def test_F1_hyperbolic_radial():
    rs = lsmap.forward_F1(CartesianState([1, 0, 0], [SQ3, 0, 0]))
    assert rs.sign == POS
    assert rs.r[0] == pytest.approx(2.0)
    assert rs.s[0] == pytest.approx(-SQ3)
    # s = +(q/|q| - (q.p) p) on the hyperbolic branch
    np.testing.assert_allclose(rs.s[1:], [1 - 3.0, 0, 0], atol=1e-14)


def test_forward_circular():
    sp = lsmap.forward(CartesianState([1, 0, 0], [0, 1, 0]))
    np.testing.assert_allclose(sp.xi, [0, 0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(sp.eta, [0, -1, 0, 0], atol=1e-15)


def test_forward_eccentric():
    sp = lsmap.forward(CartesianState([2, 0, 0], [0.1, 0.5, 0]))
    assert sp.xi[0] == pytest.approx(-0.44346, abs=1e-5)
    assert sp.eta_sq == pytest.approx(1 / 0.74, rel=1e-14)


def test_forward_hyperbolic_radial():
    sp = lsmap.forward(CartesianState([1, 0, 0], [SQ3, 0, 0]))
    assert sp.sign == POS
    assert sp.phi == pytest.approx(SQ3)
    assert sp.xi[0] == pytest.approx(1.0875, abs=1e-3)
    assert sp.eta[0] / sp.eta_norm == pytest.approx(-0.4275, abs=1e-3)
    back = lsmap.inverse(sp)
    assert_state_close(back, CartesianState([1, 0, 0], [SQ3, 0, 0]), 1e-13)


def test_zero_rotation_is_scaling():
    rs = lsmap.forward_F1(CartesianState([1.3, 0, 0], [0, 0.6, 0.1]))
    assert rs.s[0] == 0.0
    H = CartesianState([1.3, 0, 0], [0, 0.6, 0.1]).energy
    sp = lsmap.forward_F2(rs, H)
    np.testing.assert_allclose(sp.xi, rs.r, atol=1e-15)
    np.testing.assert_allclose(sp.eta, rs.s / math.sqrt(-2 * H), atol=1e-15)


def test_inverse_of_circular_image():
    sp = SphereState([0, 0, 1, 0], [0, -1, 0, 0])
    assert lsmap.recover_angle(sp) == 0.0
    rs = lsmap.inverse_G2(sp)
    np.testing.assert_allclose(rs.r, [0, 0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(rs.s, [0, -1, 0, 0], atol=1e-15)
    assert_state_close(lsmap.inverse(sp), CartesianState([1, 0, 0], [0, 1, 0]), 1e-15)


def test_north_pole_is_degenerate():
    sp = SphereState([1, 0, 0, 0], [0, 0.5, 0, 0])
    with pytest.raises(DegenerateDenominator):
        lsmap.inverse(sp)


@given(bound_states())
def test_elliptic_round_trip(s):
    sp = lsmap.forward(s)
    back = lsmap.inverse(sp)
    assert_state_close(back, s, 1e-9)
    rs = lsmap.inverse_G2(sp)
    ref = lsmap.forward_F1(s)
    np.testing.assert_allclose(rs.r, ref.r, atol=1e-10)
    np.testing.assert_allclose(rs.s, ref.s, atol=1e-10)


@given(unbound_states())
def test_hyperbolic_round_trip(s):
    sp = lsmap.forward(s)
    assert sp.sign == POS
    assert_state_close(lsmap.inverse(sp), s, 1e-9)


@given(bound_states())
def test_fused_matches_factored(s):
    a, b = lsmap.forward(s), lsmap.forward_fused(s)
    np.testing.assert_allclose(a.xi, b.xi, atol=1e-12)
    np.testing.assert_allclose(a.eta, b.eta, atol=1e-12 * max(1.0, b.eta_norm))
    assert_state_close(lsmap.inverse_fused(a), lsmap.inverse(a), 1e-12 * max(1.0, a.eta_sq))


@given(unbound_states())
def test_fused_matches_factored_hyperbolic(s):
    a, b = lsmap.forward(s), lsmap.forward_fused(s)
    scale = max(1.0, float(np.max(np.abs(a.xi))), float(np.max(np.abs(a.eta))))
    np.testing.assert_allclose(a.xi, b.xi, atol=1e-12 * scale)
    np.testing.assert_allclose(a.eta, b.eta, atol=1e-12 * scale)
    assert_state_close(lsmap.inverse_fused(a), lsmap.inverse(a), 1e-10)


@given(bound_states())
def test_kepler_disk_condition(s):
    sp = lsmap.forward(s)
    y = sp.eta[0] / sp.eta_norm
    assert sp.xi[0] ** 2 + y**2 <= 1.0 + 1e-12
    assert math.hypot(sp.xi[0], y) == pytest.approx(eccentricity(s), abs=1e-9)


@given(bound_states())
def test_conserved_quantities(s):
    c = conserved(s)
    assert float(c.L @ c.M) == pytest.approx(0.0, abs=1e-10 * max(1.0, float(c.M @ c.M)))
    assert math.sqrt(-2 * c.H) * np.linalg.norm(c.M) == pytest.approx(eccentricity(s), abs=1e-9)


def test_inverse_arrays_matches_scalar(rng):
    states = []
    while len(states) < 200:
        s = CartesianState(rng.uniform(0.1, 3, 3), rng.uniform(-1.5, 1.5, 3))
        if s.energy < -1e-2:
            states.append(s)
    sps = [lsmap.forward(s) for s in states]
    q, p, den = lsmap.inverse_arrays(np.array([sp.xi for sp in sps]), np.array([sp.eta for sp in sps]))
    assert np.all(den > 0)
    np.testing.assert_allclose(q, [s.q for s in states], atol=1e-9)
    np.testing.assert_allclose(p, [s.p for s in states], atol=1e-9)


def test_minkowski_signature():
    a = np.array([2.0, 1.0, 0.0, 0.0])
    assert minkowski(a, a, NEG) == 5.0
    assert minkowski(a, a, POS) == 3.0
