import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ellipseperc import geometry as G
from ellipseperc import raster as O
from ellipseperc.errors import ValidationError
from ellipseperc.geometry import BoxSpec, GrainSpec, Segment

import _instances as I

E = GrainSpec.ellipse
D = GrainSpec.disk
PI = math.pi


# ---------------------------------------------------------------- types


def test_grain_validation_and_direction_normalization():
    with pytest.raises(ValidationError):
        E((0, 0), 0.5)
    with pytest.raises(ValidationError):
        E((0, 0), math.inf)
    assert E((0, 0), 2, PI).V == 0.0
    assert E((0, 0), 2, -PI / 2).V == pytest.approx(PI / 2)
    assert D((0, 0), 3).V == 0.0
    assert D((1, 2), 3).axes == (3.0, 3.0)


def test_box_sides():
    b = BoxSpec(2.0, 3.0)
    assert b.bounds() == (-3.0, -1.0, 3.0, 1.0)
    assert b.side("left").params() == (-3.0, -1.0, -3.0, 1.0)
    assert b.side("right").params() == (3.0, -1.0, 3.0, 1.0)
    with pytest.raises(ValidationError):
        BoxSpec(0.0)


def test_segment_rejects_degenerate():
    with pytest.raises(ValidationError):
        Segment((1, 1), (1, 1))


# ------------------------------------------------------ worked examples


@pytest.mark.parametrize("p, V, want", [((1.5, 0), 0.0, True), ((0, 1.5), 0.0, False), ((0, 1.5), PI / 2, True)])
def test_point_in_grain(p, V, want):
    assert G.point_in_grain(p, E((0, 0), 2, V)) is want


@pytest.mark.parametrize("w, eps, R, want", [((0, 0), 0.5, 3, True), ((0, 0.9), 0.5, 3, False), ((0, 0), 1, 1, True)])
def test_disk_in_grain(w, eps, R, want):
    assert G.disk_in_grain(w, eps, E((0, 0), R)) is want


@pytest.mark.parametrize("g, seg, want", [
    (E((0, 0), 1), ((0.5, -2), (0.5, 2)), True),
    (E((0, 0), 1), ((2, -1), (2, 1)), False),
    (E((0, 0), 5), ((4, -0.5), (4, 0.5)), True),
])
def test_grain_segment(g, seg, want):
    assert G.grain_segment_intersects(g, Segment(*seg)) is want


@pytest.mark.parametrize("g, want", [(D((0, 0), 1), True), (D((10, 0), 1), False), (E((3, 0), 2.5), True)])
def test_grain_box(g, want):
    assert G.grain_box_intersects(g, BoxSpec(2.0, 1.0)) is want


@pytest.mark.parametrize("a, b, want", [
    (D((0, 0), 1), D((1.5, 0), 1), True),
    (D((0, 0), 1), D((2.5, 0), 1), False),
    (E((0, 0), 3, 0), E((0, 2), 3, PI / 2), True),
])
def test_grain_grain(a, b, want):
    assert G.grain_grain_intersects(a, b) is want
    assert G.grain_grain_intersects(b, a) is want


def test_triple_examples():
    a, b = D((-0.5, 0), 1), D((0.5, 0), 1)
    assert G.triple_common_point(a, b, BoxSpec(4.0))
    assert not G.triple_common_point(a, b, BoxSpec(1.0, 1.0, 10.0, 10.0))


def test_triple_needs_meeting_inside_box():
    # the two disks meet only around x = 0; the box sits at x in [2, 3]
    a, b = D((-0.9, 0), 1), D((0.9, 0), 1)
    assert G.grain_grain_intersects(a, b)
    assert G.grain_box_intersects(a, BoxSpec(1.0, 1.0, 2.5, 0)) is False
    assert not G.triple_common_point(a, b, BoxSpec(1.0, 1.0, 2.5, 0.0))
    # crossing needles: both reach the box, their overlap lies outside it
    a, b = E((0, 0), 6, 0.4), E((0, 0), 6, -0.4)
    box = BoxSpec(2.0, 1.0, 4.0, 0.0)
    assert G.grain_box_intersects(a, box) and G.grain_box_intersects(b, box)
    assert not G.triple_common_point(a, b, box)
    assert G.triple_common_point(a, b, BoxSpec(2.0, 1.0, 3.0, 0.0))


@pytest.mark.parametrize("g, d, want", [(E((0, 0), 2), 0.0, 4.0), (E((0, 0), 2), PI / 2, 2.0), (D((0, 0), 3), 1.234, 6.0)])
def test_support_extent(g, d, want):
    assert G.support_extent(g, d) == pytest.approx(want, rel=1e-15)


def test_minkowski_closed_forms():
    assert G.minkowski_hit_area(1, 1, 1.0) == pytest.approx(5 + PI, rel=1e-15)
    assert G.minkowski_hit_area(2, 1, 2.0, 0.0) == pytest.approx(10 + 2 * PI, rel=1e-15)
    for w, h, R in [(1, 1, 1), (3, 2, 2.5), (0.5, 7, 4)]:
        assert G.minkowski_hit_area(w, h, R, kind="disk") == pytest.approx(w * h + PI * R * R + 2 * (w + h) * R)


@pytest.mark.parametrize("w, h, R, V", [(1, 1, 2, PI / 4), (3, 1, 5, 0.3), (1, 2, 1.5, -1.2)])
def test_minkowski_vs_row_slice_oracle(w, h, R, V):
    assert G.minkowski_hit_area(w, h, R, V) == pytest.approx(O.hit_region_area(w, h, R, V), rel=5e-3)


def test_convex_gap_values():
    # gap is min over x of the largest membership gap
    assert G.pair_gap(D((0, 0), 1), D((3, 0), 1)) == pytest.approx(1.25, abs=1e-9)
    assert G.triple_gap(D((-0.5, 0), 1), D((0.5, 0), 1), BoxSpec(4.0)) == pytest.approx(-0.75, abs=1e-9)
    assert G.is_marginal(0.0) and not G.is_marginal(1e-3)


# ----------------------------------------------------------- properties

coord = st.floats(-5, 5, allow_nan=False)
axis = st.floats(1.0, 30.0)
angle = st.floats(-PI / 2 + 1e-9, PI / 2)


@st.composite
def grains(draw):
    return E((draw(coord), draw(coord)), draw(axis), draw(angle))


def _rotate(p, t, c=(0.0, 0.0)):
    x, y = p[0] - c[0], p[1] - c[1]
    return c[0] + math.cos(t) * x - math.sin(t) * y, c[1] + math.sin(t) * x + math.cos(t) * y


def _move(g, t, shift):
    c = _rotate((g.x, g.y), t)
    return GrainSpec(c[0] + shift[0], c[1] + shift[1], g.R, g.V + t, g.kind)


@settings(max_examples=300, deadline=None)
@given(grains(), grains())
def test_grain_grain_symmetric(a, b):
    assert G.grain_grain_intersects(a, b) == G.grain_grain_intersects(b, a)


@settings(max_examples=200, deadline=None)
@given(grains(), grains(), st.floats(-PI, PI), coord, coord)
def test_rigid_motion_pair(a, b, t, sx, sy):
    assume(abs(G.pair_gap(a, b)) > 1e-6)
    assert G.grain_grain_intersects(a, b) == G.grain_grain_intersects(_move(a, t, (sx, sy)), _move(b, t, (sx, sy)))


@settings(max_examples=200, deadline=None)
@given(grains(), coord, coord, coord, coord, st.floats(-PI, PI))
def test_rigid_motion_segment_and_point(g, x0, y0, x1, y1, t):
    assume(math.hypot(x1 - x0, y1 - y0) > 1e-3)
    s = Segment((x0, y0), (x1, y1))
    assume(abs(G.segment_gap(g, s)) > 1e-6 and abs(G.point_gap((x0, y0), g)) > 1e-6)
    h = _move(g, t, (0, 0))
    s2 = Segment(_rotate((x0, y0), t), _rotate((x1, y1), t))
    assert G.grain_segment_intersects(g, s) == G.grain_segment_intersects(h, s2)
    assert G.point_in_grain((x0, y0), g) == G.point_in_grain(_rotate((x0, y0), t), h)


@settings(max_examples=200, deadline=None)
@given(grains(), grains(), st.integers(0, 3), coord, coord, st.floats(0.3, 6), st.floats(0.3, 3))
def test_quarter_turn_box_predicates(a, b, q, sx, sy, l, k):
    box = BoxSpec(l, k, sx, sy)
    assume(abs(G.triple_gap(a, b, box)) > 1e-6 and abs(G.box_gap(a, box)) > 1e-6)
    t = q * PI / 2
    c = _rotate((sx, sy), t)
    box2 = BoxSpec(l * k, 1 / k, c[0], c[1]) if q % 2 else BoxSpec(l, k, c[0], c[1])
    a2, b2 = _move(a, t, (0, 0)), _move(b, t, (0, 0))
    assert G.grain_box_intersects(a, box) == G.grain_box_intersects(a2, box2)
    assert G.triple_common_point(a, b, box) == G.triple_common_point(a2, b2, box2)


@settings(max_examples=200, deadline=None)
@given(grains(), coord, coord)
def test_disk_ladder(g, x, y):
    assert G.disk_in_grain((x, y), 0.0, g) == G.point_in_grain((x, y), g)


@settings(max_examples=200, deadline=None)
@given(grains(), grains())
def test_triple_with_huge_box_is_pair(a, b):
    assert G.triple_common_point(a, b, BoxSpec(1e4)) == G.grain_grain_intersects(a, b)


@settings(max_examples=200, deadline=None)
@given(coord, coord, angle, grains(), coord, coord)
def test_unit_ellipse_is_unit_disk(x, y, v, other, px, py):
    e, d = E((x, y), 1.0, v), D((x, y), 1.0)
    assert G.point_in_grain((px, py), e) == G.point_in_grain((px, py), d)
    assert G.grain_grain_intersects(e, other) == G.grain_grain_intersects(d, other)
    box = BoxSpec(1.0, 2.0, px, py)
    assert G.grain_box_intersects(e, box) == G.grain_box_intersects(d, box)


def test_extreme_aspect_ratio():
    # R = 1e6 needle crossing a unit disk far from its center
    g = E((0, 0), 1e6, 0.0)
    assert G.grain_grain_intersects(g, D((9e5, 0.5), 1))
    assert not G.grain_grain_intersects(g, D((9e5, 2.5), 1))
    assert G.grain_segment_intersects(g, Segment((-1e6, -0.5), (-1e6, 0.5)))
    assert not G.grain_segment_intersects(g, Segment((-1e6 - 1e-3, -0.5), (-1e6 - 1e-3, 0.5)))


# ------------------------------------------------- oracle cross-checks


@pytest.mark.parametrize("name", sorted(I.GENERATORS))
def test_predicates_match_scanline_oracle(name):
    bad, used, marginal = I.disagreements(name, 400, seed=11)
    assert used > 300
    assert bad == []


def test_tangent_instances_hit_both_signs():
    rng = np.random.default_rng(5)
    out = [I.pair_instance(rng, tangent=True) for _ in range(40)]
    gaps = np.array([g for _, _, g in out])
    assert (gaps > 0).any() and (gaps < 0).any()
    assert np.all(np.abs(gaps) < 0.1)
