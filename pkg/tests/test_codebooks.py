import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airybeam.codebooks import (
    Codebook,
    SamplingSpec,
    assemble_codebook,
    codeword_correlation,
    default_specs,
    sample_axis,
)
from airybeam.errors import SpecError, ZeroVectorError
from airybeam.special import airy_envelope
from airybeam.waveforms import BeamParams, make_beam

from oracles import decay_correlation
from conftest import make_scene

SCENE = make_scene(n=266, x_max=1.0, y_halfspan=0.5, power=5.0)


def test_angle_four_points():
    np.testing.assert_allclose(np.sin(sample_axis(SamplingSpec("angle", 4))), [-0.75, -0.25, 0.25, 0.75], atol=1e-15)


def test_distance_three_points():
    np.testing.assert_allclose(sample_axis(SamplingSpec("distance", 3, z=6.0)), [6, 3, 2])


def test_distance_range_endpoints():
    r = sample_axis(SamplingSpec.distance_range(1.0, 6.0, 20))
    assert r[0] == pytest.approx(6.0) and r[-1] == pytest.approx(1.0) and r.size == 20
    np.testing.assert_allclose(np.diff(1 / r), np.diff(1 / r)[0])


@given(st.floats(0.5, 50), st.integers(3, 40), st.floats(-1.2, 1.2))
@settings(max_examples=50, deadline=None)
def test_distance_gaps_shrink_toward_array(z, m, theta):
    r = sample_axis(SamplingSpec("distance", m, z=z), theta)
    gaps = -np.diff(r)
    assert np.all(np.diff(gaps) < 0)


def test_scale_axis_default_counts():
    spec = default_specs()["scale"]
    s = sample_axis(spec)
    assert s.size == 20
    inv = 1 / s[:10]
    assert inv[0] == pytest.approx(10 / 3) and inv[-1] == pytest.approx(20)
    np.testing.assert_allclose(np.diff(inv), np.diff(inv)[0])
    np.testing.assert_array_equal(s[10:], -s[:10])


def test_decay_axis():
    a = sample_axis(default_specs()["decay"])
    np.testing.assert_allclose(a, -2 + 2 * np.arange(10) / 9)
    assert a[1] == pytest.approx(-16 / 9)


def test_codebook_sizes():
    specs = default_specs()
    assert len(assemble_codebook(SCENE, "focused", specs)) == 1800
    assert len(assemble_codebook(SCENE, "nf-airy", specs)) == 360000
    assert len(assemble_codebook(SCENE, "curved", specs)) == 37800


def test_assembly_is_deterministic():
    specs = default_specs(n_angles=6, n_distances=3, n_scale=2, n_decay=2)
    a = assemble_codebook(SCENE, "nf-airy", specs)
    b = assemble_codebook(SCENE, "nf-airy", dict(specs))
    np.testing.assert_array_equal(a.params, b.params)


def test_weights_match_make_beam():
    specs = default_specs(n_angles=4, n_distances=3, n_scale=2, n_decay=3, n_curvature=3)
    for kind in ("steered", "focused", "curved", "nf-airy"):
        sp = {"angle": SamplingSpec("angle", 8)} if kind == "steered" else specs
        book = assemble_codebook(SCENE, kind, sp)
        W = book.weights()
        for i in (0, len(book) // 2, len(book) - 1):
            np.testing.assert_allclose(W[i], make_beam(SCENE, book.entry(i)).w, atol=1e-12)


def test_responses_match_materialized():
    specs = default_specs(n_angles=5, n_distances=3, n_scale=2, n_decay=2)
    rng = np.random.default_rng(0)
    h = rng.normal(size=266) + 1j * rng.normal(size=266)
    lazy = assemble_codebook(SCENE, "nf-airy", specs)
    full = assemble_codebook(SCENE, "nf-airy", specs, materialize=True)
    np.testing.assert_allclose(lazy.responses(h), full.responses(h), rtol=1e-12)
    np.testing.assert_allclose(lazy.responses(h), lazy.weights() @ np.conj(h), rtol=1e-12)


def test_serialization_roundtrip(tmp_path):
    specs = default_specs(n_angles=3, n_distances=2, n_scale=2, n_decay=2)
    book = assemble_codebook(SCENE, "nf-airy", specs)
    book.save(tmp_path / "cb.txt", include_weights=True)
    text = (tmp_path / "cb.txt").read_text()
    assert text.startswith("# airybeam-codebook v1\nkind nf-airy\n")
    back = Codebook.load(tmp_path / "cb.txt", SCENE)
    np.testing.assert_array_equal(back.params, book.params)
    np.testing.assert_array_equal(back.weights(), book.weights())
    assert back.dumps(include_weights=True) == text
    with pytest.raises(SpecError):
        Codebook.loads("garbage\n")


def test_correlation_basics():
    w = make_beam(SCENE, BeamParams("focused", theta=0.1, r=2.0))
    assert codeword_correlation(w, w) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ZeroVectorError):
        codeword_correlation(np.zeros(266), w)


def test_dft_steered_orthogonal():
    n = 64
    sc = make_scene(n=n, y_halfspan=0.2)
    book = assemble_codebook(sc, "steered", {"angle": SamplingSpec("angle", n)})
    W = book.weights()
    for i, j in [(0, 1), (5, 40), (62, 63)]:
        assert codeword_correlation(W[i], W[j]) <= 1e-9


def test_decay_correlation_closed_form():
    y = SCENE.geometry.y_positions
    wa = make_beam(SCENE, BeamParams("nf-airy", theta=0.2, r=3.0, s=-0.1, a=-1.0))
    wb = make_beam(SCENE, BeamParams("nf-airy", theta=0.2, r=3.0, s=-0.1, a=-0.8))
    assert codeword_correlation(wa, wb) == pytest.approx(decay_correlation(y, -0.1, -1.0, -0.8), abs=1e-12)


def test_decay_correlation_uniform_and_monotone():
    y = SCENE.geometry.y_positions
    a = sample_axis(default_specs()["decay"])
    s0 = -0.1
    adj = np.array([decay_correlation(y, s0, a[i], a[i + 1]) for i in range(a.size - 1)])
    assert (adj.max() - adj.min()) / adj.max() < 0.25
    c = [decay_correlation(y, s0, a[0], a[j]) for j in range(a.size)]
    assert np.all(np.diff(c) < 0)


@pytest.mark.parametrize("a0", [-1.0, -0.5, 0.0])
def test_reciprocal_scale_sampling_is_flatter(a0):
    y = SCENE.geometry.y_positions
    sp = default_specs()["scale"]
    recip = sample_axis(SamplingSpec("scale", sp.count, low=sp.low, high=sp.high))
    uniform = np.linspace(sp.high, sp.low, sp.count)

    def spread(grid):
        env = [airy_envelope(y, s, a0) for s in grid]
        adj = np.array([codeword_correlation(env[i], env[i + 1]) for i in range(len(env) - 1)])
        return adj.max() / adj.min()

    assert spread(recip) < spread(uniform)


def test_bad_specs():
    with pytest.raises(SpecError):
        SamplingSpec("angle", 0)
    with pytest.raises(SpecError):
        SamplingSpec("scale", 3, low=0.0, high=0.3)
    with pytest.raises(SpecError):
        assemble_codebook(SCENE, "nf-airy", {"angle": SamplingSpec("angle", 3)})
