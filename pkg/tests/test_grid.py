import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagrad.gaussian import GaussianFunction
from lagrad.grid import GridField, interpolate


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=3), st.integers(0, 2 ** 31))
def test_save_load_roundtrip(tmp_path_factory, shape, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    g = GridField(rng.normal(size=len(shape)), rng.uniform(0.1, 1, len(shape)), vals,
                  "function", {"note": "x"})
    path, side = g.save(tmp_path_factory.mktemp("g") / "f.bin")
    back = GridField.load(path)
    assert np.array_equal(back.values, g.values)
    assert np.array_equal(back.origin, g.origin) and np.array_equal(back.spacing, g.spacing)
    assert back.meta == {"note": "x"}


def test_file_layout(tmp_path):
    g = GridField([0.0, 1.0], [0.5, 0.25], np.array([[1 + 2j, 3], [4, 5 - 1j]]), "fourier")
    path, side = g.save(tmp_path / "a.bin")
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    assert raw.tolist() == [1, 2, 3, 0, 4, 0, 5, -1]
    d = json.loads(side.read_text())
    assert d == {"m": 2, "origin": [0.0, 1.0], "spacing": [0.5, 0.25], "shape": [2, 2],
                 "field_kind": "fourier"}


def test_size_mismatch_rejected(tmp_path):
    g = GridField([0.0], [1.0], np.ones(4))
    path, side = g.save(tmp_path / "b.bin")
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(ValueError):
        GridField.load(path)


def test_bad_spacing():
    with pytest.raises(ValueError):
        GridField([0.0], [0.0], np.ones(3))


def test_interpolate_linear_exact_on_affine():
    g = GridField.centered((8, 8), 2.0)
    g.values = g.points() @ np.array([1.5, -0.5]) + 0.25
    pts = np.array([[0.13, -0.71], [1.1, 0.4]])
    assert np.allclose(interpolate(g, pts), pts @ np.array([1.5, -0.5]) + 0.25)


def test_norm_and_inner():
    G = GaussianFunction.standard(2)
    g = GridField.sample(G, (64, 64), 6.0)
    assert g.norm() == pytest.approx(G.norm(), rel=1e-10)
    assert g.inner(g) == pytest.approx(g.norm() ** 2)
