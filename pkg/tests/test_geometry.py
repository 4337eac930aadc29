import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowup.errors import ConfigError, PreconditionError
from blowup.geometry import (
    ExactPolygon,
    IfsSpec,
    Similitude,
    point_set_diameter,
    polygon_area,
    polygon_clip_area,
    refine_root,
    rotation_matrix,
)
from oracles import homogeneous, intersection_area, neg_word_matrix, shoelace, spec_matrices, word_matrix

S = 0.6


@st.composite
def similitudes(draw, s=S):
    power = draw(st.integers(-3, 3))
    angle = draw(st.floats(0, 360, allow_nan=False))
    reflect = draw(st.booleans())
    t = draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=2))
    return Similitude(power, rotation_matrix(angle, reflect), t, s)


def as_matrix(f: Similitude) -> np.ndarray:
    return homogeneous(f.ortho, f.trans, f.scale)


@settings(max_examples=60)
@given(similitudes(), similitudes())
def test_composition_matches_matrices(f, g):
    assert np.allclose(as_matrix(f @ g), as_matrix(f) @ as_matrix(g), atol=1e-9)


@settings(max_examples=60)
@given(similitudes())
def test_inverse(f):
    assert (f @ f.inverse()).is_identity(1e-9)
    assert (f.inverse() @ f).is_identity(1e-9)


def test_golden_ratio_root(goldenb):
    s = goldenb.s
    assert abs(s**4 + s**2 - 1) < 1e-15
    assert s == pytest.approx(0.7861513777574233, abs=1e-15)
    assert goldenb.pv.a == (1, 2)


def test_refine_root_rejects_bad_bracket():
    with pytest.raises(ConfigError):
        refine_root([1, 0, 1], [0, 1])


def test_golden_area_against_oracle(goldenb):
    s = goldenb.s
    verts = goldenb.attractor_model.vertices
    assert goldenb.geometry.area == pytest.approx(s**3 + s**7, rel=1e-12)
    assert polygon_area(verts) == pytest.approx(shoelace(verts), rel=1e-12)


def test_first_level_tiles_the_attractor(goldenb):
    # f_1(A) and f_2(A) have areas summing to area(A) and do not overlap
    verts = np.asarray(goldenb.attractor_model.vertices)
    pieces = [f(verts) for f in goldenb.maps]
    total = sum(abs(shoelace(p)) for p in pieces)
    assert total == pytest.approx(goldenb.geometry.area, rel=1e-12)
    assert intersection_area(pieces[0], pieces[1]) < 1e-12
    assert polygon_clip_area(pieces[0], pieces[1]) < 1e-12


def test_word_maps_against_matrices(goldenb):
    mats = spec_matrices(goldenb)
    for w in [(1,), (2, 1), (1, 2, 2, 1), (2, 2, 1, 1, 2)]:
        assert np.allclose(as_matrix(goldenb.word_map(w)), word_matrix(w, mats), atol=1e-9)
        assert np.allclose(as_matrix(goldenb.neg_word_map(w)), neg_word_matrix(w, mats), atol=1e-9)


def test_symmetry_groups(goldenb, square):
    assert len(goldenb.symmetries) == 1
    assert len(square.symmetries) == 8
    verts = np.asarray(square.attractor_model.vertices)
    for g in square.symmetries:
        image = g(verts)
        assert all(np.abs(verts - p).sum(1).min() < 1e-12 for p in image)


def test_rotation_matrix_exact():
    assert np.array_equal(rotation_matrix(90), np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert np.array_equal(rotation_matrix(0, reflect=True), np.diag([-1.0, 1.0]))


def test_diameter():
    pts = np.array([[0, 0], [3, 4], [1, 1]], dtype=float)
    assert point_set_diameter(pts) == 5.0


def test_cantor_point_cloud(cantor):
    geom = cantor.geometry
    assert geom.kind == "pointcloud"
    assert geom.points.shape == (3**7, 2)


def _maps(s, powers=(1, 2)):
    return tuple(Similitude(a, np.eye(2), [0.0, 0.0], s) for a in powers)


def test_spec_validation():
    square = ExactPolygon(((0, 0), (1, 0), (1, 1), (0, 1)))
    with pytest.raises(ConfigError):
        IfsSpec("bad", 1.5, _maps(1.5), square)
    with pytest.raises(ConfigError):
        IfsSpec("bad", 0.5, _maps(0.5, (2, 4)), square)
    with pytest.raises(ConfigError):
        IfsSpec("bad", 0.5, _maps(0.5, (1,)), square)
    skew = Similitude(1, [[1.0, 0.5], [0.0, 1.0]], [0, 0], 0.5)
    with pytest.raises(ConfigError):
        IfsSpec("bad", 0.5, (skew, skew), square)
    bowtie = ExactPolygon(((0, 0), (1, 1), (1, 0), (0, 1)))
    with pytest.raises(ConfigError):
        IfsSpec("bad", 0.5, _maps(0.5), bowtie)
    closed = ExactPolygon(((0, 0), (1, 0), (1, 1), (0, 0)))
    with pytest.raises(ConfigError):
        IfsSpec("bad", 0.5, _maps(0.5), closed)


def test_degenerate_clip_input():
    with pytest.raises(PreconditionError):
        polygon_clip_area([(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 0), (1, 1)])
