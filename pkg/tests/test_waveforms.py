import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airybeam.errors import ParamError, ZeroChannelError
from airybeam.special import airy_ai
from airybeam.waveforms import BeamParams, make_beam, mrt_beam

from conftest import make_scene

SCENE = make_scene(n=266, x_max=1.0, y_halfspan=0.5, power=5.0)
angles = st.floats(min_value=-1.4, max_value=1.4)
dists = st.floats(min_value=0.2, max_value=20.0)


def test_steered_broadside_is_flat():
    w = make_beam(SCENE, BeamParams("steered", theta=0.0))
    np.testing.assert_allclose(w.w, math.sqrt(5.0 / 266), rtol=0, atol=1e-15)


@given(angles, dists)
@settings(max_examples=50, deadline=None)
def test_curved_zero_equals_focused(theta, r):
    a = make_beam(SCENE, BeamParams("curved", theta=theta, r=r, c=0.0)).w
    b = make_beam(SCENE, BeamParams("focused", theta=theta, r=r)).w
    assert np.max(np.abs(a - b)) <= 1e-12


@given(
    st.sampled_from(["steered", "focused", "curved", "nf-airy", "classic-airy"]),
    angles,
    dists,
    st.floats(-5, 5),
    st.floats(0.03, 0.5),
    st.booleans(),
    st.floats(-2, 0),
)
@settings(max_examples=100, deadline=None)
def test_power_constraint(kind, theta, r, c, s, neg, a):
    s = -s if neg else s
    kw = {
        "steered": dict(theta=theta),
        "focused": dict(theta=theta, r=r),
        "curved": dict(theta=theta, r=r, c=c),
        "nf-airy": dict(theta=theta, r=r, s=s, a=a),
        "classic-airy": dict(s=s, a=a),
    }[kind]
    w = make_beam(SCENE, BeamParams(kind, **kw))
    assert abs(np.vdot(w.w, w.w).real - 5.0) <= 1e-9 * 5.0


def test_nf_airy_magnitude_is_envelope():
    y = SCENE.geometry.y_positions
    w = make_beam(SCENE, BeamParams("nf-airy", theta=0.2, r=2.0, s=-0.1, a=-0.8)).w
    env = np.abs(airy_ai(y / -0.1) * np.exp(-0.8 * y / -0.1))
    np.testing.assert_allclose(np.abs(w), env * math.sqrt(5.0) / np.linalg.norm(env), rtol=1e-12)


def test_large_scale_degenerates_to_uniform():
    w = make_beam(SCENE, BeamParams("nf-airy", theta=0.0, r=2.0, s=1e6, a=0.0)).w
    m = np.abs(w)
    assert np.max(np.abs(m / math.sqrt(5.0 / 266) - 1)) <= 0.01


def test_nf_airy_bends_toward_main_lobe():
    from airybeam.propagation import propagate

    sc = make_scene(n=266, x_max=1.5, y_halfspan=0.5, power=5.0)
    w = make_beam(sc, BeamParams("nf-airy", theta=0.0, r=2.0, s=-0.1, a=-0.8))
    grid = propagate(sc, w, record=[0.3, 1.0])
    y, s = grid.window()
    centroid = (np.abs(s) ** 2 @ y) / np.sum(np.abs(s) ** 2, axis=1)
    # main lobe on the +y side, energy centroid stays there
    assert np.all(centroid > 0)


@pytest.mark.parametrize(
    "kind,kw",
    [
        ("focused", dict(theta=0.0)),
        ("focused", dict(theta=2.0, r=1.0)),
        ("focused", dict(theta=0.0, r=-1.0)),
        ("nf-airy", dict(theta=0.0, r=1.0, s=0.0, a=0.0)),
        ("steered", dict(theta=0.0, r=1.0)),
        ("bogus", dict(theta=0.0)),
    ],
)
def test_param_validation(kind, kw):
    with pytest.raises(ParamError):
        BeamParams(kind, **kw)


def test_mrt_basis_vector():
    h = np.zeros(5, complex)
    h[0] = 1.0
    np.testing.assert_allclose(mrt_beam(h, 4.0).w, [2, 0, 0, 0, 0])
    with pytest.raises(ZeroChannelError):
        mrt_beam(np.zeros(3), 1.0)


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_mrt_dominates_random_beams(seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=12) + 1j * rng.normal(size=12)
    w = rng.normal(size=12) + 1j * rng.normal(size=12)
    w *= math.sqrt(3.0) / np.linalg.norm(w)
    best = abs(np.vdot(h, mrt_beam(h, 3.0).w)) ** 2
    assert best == pytest.approx(3.0 * np.vdot(h, h).real, rel=1e-12)
    assert abs(np.vdot(h, w)) ** 2 <= best * (1 + 1e-12)
