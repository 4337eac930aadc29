import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowup.errors import PreconditionError
from blowup.symbolic import EventuallyPeriodic, e_weight, omega_level
from blowup.tiling import (
    Tiling,
    canonical_tiling,
    common_tiles,
    concat,
    diameter_to_level,
    e_theta,
    is_subtiling,
    nesting_check,
    patch,
    pi_prefix,
    pi_sequence,
    prototile_census,
    refinement_check,
    same_tiles,
    tk_formula_check,
)
from oracles import apply, intersection_area, neg_word_matrix, point_in_polygon, spec_matrices, word_matrix

golden_words = st.lists(st.integers(1, 2), max_size=7).map(tuple)


def test_canonical_tiles_against_matrix_oracle(goldenb):
    mats = spec_matrices(goldenb)
    verts = np.asarray(goldenb.attractor_model.vertices)
    for k in range(5):
        t = canonical_tiling(k, goldenb)
        scale = goldenb.s ** (-k)
        for j, w in enumerate(omega_level(k, goldenb.pv)):
            expect = scale * apply(word_matrix(w, mats), verts)
            assert np.allclose(t.geometries[j], expect, atol=1e-9)


def test_pi_tiles_against_matrix_oracle(goldenb):
    mats = spec_matrices(goldenb)
    verts = np.asarray(goldenb.attractor_model.vertices)
    theta = (1, 2, 2, 1)
    t = pi_prefix(theta, goldenb)
    for j, w in enumerate(omega_level(e_weight(theta, goldenb.pv), goldenb.pv)):
        m = neg_word_matrix(theta, mats) @ word_matrix(w, mats)
        assert np.allclose(t.geometries[j], apply(m, verts), atol=1e-9)


@pytest.mark.parametrize("k", range(0, 9))
def test_area_and_count(goldenb, k):
    t = canonical_tiling(k, goldenb)
    assert len(t) == len(omega_level(k, goldenb.pv))
    assert t.areas.sum() == pytest.approx(goldenb.geometry.area * goldenb.s ** (-2 * k), rel=1e-9)
    assert set(prototile_census(t)) <= {1, 2}


def test_small_tilings_do_not_overlap_by_oracle(goldenb):
    t = canonical_tiling(3, goldenb)
    for a, b in itertools.combinations(range(len(t)), 2):
        assert intersection_area(t.geometries[a], t.geometries[b]) < 1e-10


def test_t2_addresses_and_census(goldenb):
    t = canonical_tiling(2, goldenb)
    assert t.address_strings() == [".12", ".21", ".22", ".111", ".112"]
    assert prototile_census(t) == {1: 3, 2: 2}


@pytest.mark.parametrize("k", range(2, 11))
def test_tk_formula(goldenb, k):
    assert tk_formula_check(k, goldenb)


@pytest.mark.parametrize("k", range(0, 10))
def test_refinement(goldenb, k):
    assert refinement_check(k, goldenb)


@settings(max_examples=25, deadline=None)
@given(golden_words)
def test_pi_is_isometric_image_of_canonical(goldenb, theta):
    k = e_weight(theta, goldenb.pv)
    assert same_tiles(pi_prefix(theta, goldenb), canonical_tiling(k, goldenb).mapped(e_theta(theta, goldenb)))
    assert e_theta(theta, goldenb).power == 0


@settings(max_examples=25, deadline=None)
@given(golden_words.filter(len))
def test_nesting(goldenb, theta):
    assert nesting_check(theta, goldenb).ok


def test_nesting_detects_broken_chain(goldenb):
    theta = (1, 2, 1)
    chain = [pi_prefix(theta[:j], goldenb) for j in range(4)]
    chain[2] = chain[2].subset(range(1, len(chain[2])))
    assert not nesting_check(theta, goldenb, chain).ok


def test_pi_sequence(goldenb):
    seq = pi_sequence(EventuallyPeriodic((), (1, 2)), goldenb)
    first = [next(seq) for _ in range(4)]
    assert [t.provenance[1] for t in first] == [(), (1,), (1, 2), (1, 2, 1)]
    assert len(list(pi_sequence((2, 1), goldenb))) == 3


def test_addresses_are_normalized(goldenb):
    t = pi_prefix((1,), goldenb)
    assert t.address_strings() == ["1.2", ".1", ".2"]


def test_diameter_to_level(goldenb):
    for theta in [(), (1,), (2,), (1, 2), (2, 2, 1)]:
        t = pi_prefix(theta, goldenb)
        assert diameter_to_level(t) == e_weight(theta, goldenb.pv)
    magnified = canonical_tiling(3, goldenb).mapped(goldenb.scaling(-1))
    assert diameter_to_level(magnified) == 4
    with pytest.raises(PreconditionError):
        diameter_to_level(Tiling.empty(goldenb))


def test_patch_against_point_location(goldenb):
    t = canonical_tiling(6, goldenb)
    center = t.centroids[5]
    radius = 0.8
    p = patch(t, center, radius)
    for j in range(len(t)):
        poly = t.geometries[j]
        # a tile is in the patch iff it has a vertex in the ball or the
        # centre sits inside it; both directions checked on samples
        vertex_in = np.sqrt(((poly - center) ** 2).sum(1)).min() <= radius
        if vertex_in or point_in_polygon(center, poly):
            assert p.index.lookup(t.powers[j : j + 1], t.orthos[j : j + 1], t.trans[j : j + 1])[0] >= 0
    assert is_subtiling(p, t)
    with pytest.raises(PreconditionError):
        patch(t, center, 0.0)


def test_set_operations(goldenb):
    t3 = canonical_tiling(3, goldenb)
    a, b = t3.subset([0, 1, 2]), t3.subset([2, 3])
    assert list(common_tiles(a, b)) == [2]
    both = concat([a, b.subset([1])])
    assert len(both) == 4 and is_subtiling(both, t3)
    assert not same_tiles(a, b)
    with pytest.raises(PreconditionError):
        concat([Tiling.empty(goldenb)])


def test_pointcloud_tiling(cantor):
    t = canonical_tiling(3, cantor)
    assert t.geometries.shape[1] == 3**7
    with pytest.raises(PreconditionError):
        t.areas
