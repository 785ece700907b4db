import math

import numpy as np
import pytest

from ellipseperc import events as ev
from ellipseperc.geometry import BoxSpec, GrainSpec
from ellipseperc.laws import AxisLaw
from ellipseperc.raster import (rasterize_scene, raster_annulus_connection, raster_circuit, raster_crossing,
                                raster_origin_blocked)
from ellipseperc.sampling import make_rng, sample_hitting_process

import _instances as I

E = GrainSpec.ellipse
D = GrainSpec.disk
PI = math.pi


def _configs(n, seed, box=BoxSpec(8.0), us=(0.05, 0.1, 0.2)):
    for r in range(n):
        rng = make_rng(seed, r)
        alpha = (1.5, 2.0, 3.0)[r % 3]
        u = us[(r // 3) % len(us)]
        yield sample_hitting_process(box, u, AxisLaw.pareto(alpha), rng=rng)


# ---------------------------------------------------------- examples


def test_covered_crossing_examples():
    box = BoxSpec(2.0, 1.0)
    assert ev.covered_crossing([E((0, 0), 2.0)], BoxSpec(2.0, 2.0))
    assert not ev.covered_crossing([], box)
    assert ev.covered_crossing([D((-0.8, 0), 1), D((0.8, 0), 1)], box)
    assert not ev.covered_crossing([D((-0.8, 0), 1)], box)


def test_crossing_must_stay_in_box():
    # the disks meet only for y in [0.88, 2.12], above the thin box
    box = BoxSpec(2.0, 1.0)
    pair = [D((-1.9, 1.5), 2.0), D((1.9, 1.5), 2.0)]
    assert ev.covered_crossing(pair, BoxSpec(6.0, 1.0, 0.0, 1.0))
    assert not ev.covered_crossing(pair, BoxSpec(0.5, 8.0))
    assert ev.crossing_graph([], box).components() == []


def test_vacant_examples():
    box = BoxSpec(2.0, 1.0)
    assert ev.vacant_lr_crossing([], box)
    assert not ev.vacant_lr_crossing([D((0, 0), 5)], box)


def test_one_ellipse_examples():
    l, k = 4.0, 2.0
    box = BoxSpec(l, k)
    assert ev.one_ellipse_crossing([E((0, 0), k * l / 2)], box)
    assert not ev.one_ellipse_crossing([], box)
    assert not ev.one_ellipse_crossing([E((0, 0), k * l / 2 - 1e-6)], box)


def test_circuit_examples():
    for a in (4.0, 10.0, 37.0):
        g = ev.circuit_grains(a)
        assert [round(x.V, 12) for x in g] == [0.0, round(-PI / 3, 12), round(PI / 3, 12)]
        assert ev.three_ellipse_circuit(g, a)
        assert not ev.three_ellipse_circuit([], a)
        moved = [GrainSpec(x.x + a, x.y, x.R, x.V) for x in g]
        assert not ev.three_ellipse_circuit(moved, a)
        assert not ev.three_ellipse_circuit(g[:2], a)


def test_circuit_spec_geometry():
    s = ev.CircuitSpec(8.0)
    assert s.d_area == pytest.approx(4.0 * 1.0)
    np.testing.assert_allclose(s.S[0][1], [[4 * math.sqrt(3), -4], [4 * math.sqrt(3), -2]])
    np.testing.assert_allclose(s.D[1], ev._rot(2 * PI / 3, s.D[0]))


def test_count_covering_examples():
    assert ev.count_covering([], (0, 0), 0.3, 1.0) == 0
    assert ev.count_covering([E((0, 0), 5)], (0, 0), 0.3, 1.0) == 1
    assert ev.count_covering([E((0, 0), 5), E((3, 0), 5)], (0, 0), 0.3, 2.0) == 1
    assert ev.count_covering([E((0, 0), 5), E((0, 0.8), 5)], (0, 0), 0.3, 2.0) == 1
    with pytest.raises(ValueError):
        ev.count_covering([], (0, 0), 0.5, 1.0)


def test_annulus_examples():
    assert not ev.annulus_connection([], 1.0, 8.0)
    assert ev.annulus_connection([D((0, 0), 8.0)], 1.0, 8.0)
    assert ev.annulus_connection([E((4, 0), 4.0)], 1.0, 8.0)
    assert not ev.annulus_connection([E((4, 0), 3.0)], 1.0, 8.0)
    assert ev.annulus_connection([E((2.5, 0), 2.0), E((6.0, 0), 2.0)], 1.0, 8.0)
    assert ev.vacant_circuit_in_annulus([], 2.0)
    assert not ev.vacant_circuit_in_annulus([E((3.0, 0.0), 4.0)], 2.0)


def test_point_and_disk_covered():
    g = [E((0, 0), 2.0)]
    assert ev.point_covered(g, (1.9, 0)) and not ev.point_covered(g, (0, 1.1))
    assert ev.disk_covered(g, (0, 0), 0.9) and not ev.disk_covered(g, (1.5, 0), 0.9)
    assert not ev.point_covered([], (0, 0))


# -------------------------------------------------------- properties


def test_duality_and_quarter_turn():
    box = BoxSpec(6.0, 1.5, 0.5, -0.3)
    for cfg in _configs(150, 1):
        assert ev.vacant_lr_crossing(cfg, box) == (not ev.covered_crossing(cfg, box, "vertical"))
        x, y, a, b, v = cfg.arrays()
        rot = (-y, x, a, b, v + PI / 2)
        box2 = BoxSpec(6.0 * 1.5, 1 / 1.5, 0.3, 0.5)
        assert ev.covered_crossing(cfg, box, "horizontal") == ev.covered_crossing(rot, box2, "vertical")
        assert ev.covered_crossing(cfg, box, "vertical") == ev.covered_crossing(rot, box2, "horizontal")


def test_monotone_in_grains():
    box = BoxSpec(8.0)
    rng = np.random.default_rng(3)
    for cfg in _configs(60, 2):
        before = ev.covered_crossing(cfg, box), ev.vacant_lr_crossing(cfg, box)
        g = E(rng.uniform(-4, 4, 2), float(np.exp(rng.uniform(0, 2))), rng.uniform(-1.5, 1.5))
        more = cfg.with_grains(list(cfg.grains) + [g])
        after = ev.covered_crossing(more, box), ev.vacant_lr_crossing(more, box)
        assert after[0] >= before[0] and after[1] <= before[1]


def test_one_ellipse_implies_covered():
    box = BoxSpec(4.0, 1.0)
    seen = 0
    for cfg in _configs(150, 3, box, us=(0.2, 0.4)):
        if ev.one_ellipse_crossing(cfg, box):
            seen += 1
            assert ev.covered_crossing(cfg, box)
        if cfg.R.size and cfg.R.max() < 2.0:
            assert not ev.one_ellipse_crossing(cfg, box)
    assert seen > 5


def test_translation_and_scale_covariance():
    box = BoxSpec(6.0, 1.2)
    for cfg in _configs(60, 4, box):
        x, y, a, b, v = cfg.arrays()
        for s, dx, dy in [(1.0, 3.7, -2.2), (2.5, 0.0, 0.0), (0.4, 1.0, 1.0)]:
            moved = (s * x + dx, s * y + dy, s * a, s * b, v)
            box2 = BoxSpec(6.0 * s, 1.2, dx, dy)
            for axis in ("horizontal", "vertical"):
                assert ev.covered_crossing(cfg, box, axis) == ev.covered_crossing(moved, box2, axis)


def test_circuit_blocks_origin_in_raster():
    a = 12.0
    rng = np.random.default_rng(5)
    hits = 0
    for r in range(40):
        g = ev.circuit_grains(a)
        jitter = [GrainSpec(x.x + rng.uniform(-1, 1), x.y + rng.uniform(-0.5, 0.5), x.R * rng.uniform(1.0, 1.3),
                            x.V + rng.uniform(-0.1, 0.1)) for x in g]
        if not ev.three_ellipse_circuit(jitter, a):
            continue
        hits += 1
        assert raster_origin_blocked(rasterize_scene(jitter, BoxSpec(4 * a), 512))
    assert hits > 20


# ----------------------------------------------------- raster oracles


def test_vacant_lr_matches_raster():
    box = BoxSpec(8.0)
    res = 512
    h = box.l / res
    used = 0
    for cfg in _configs(150, 6):
        want = I.robust(lambda c: ev.covered_crossing(c, box, "vertical"), cfg, 3 * h)
        if want is None:
            continue
        used += 1
        r = rasterize_scene(cfg, box, res)
        assert ev.vacant_lr_crossing(cfg, box) == (not want)
        assert raster_crossing(r, covered=False, axis="horizontal", connectivity=4) == (not want)
    assert used > 120


def test_annulus_events_match_raster():
    l = 3.0
    res = 768
    region = BoxSpec(6 * l + 1)
    h = region.l / res
    used = 0
    for cfg in _configs(120, 7, region, us=(0.02, 0.05, 0.1)):
        want = I.robust(lambda c: ev.annulus_connection(c, l, 3 * l), cfg, 3 * h)
        if want is None:
            continue
        used += 1
        r = rasterize_scene(cfg, region, res)
        assert ev.annulus_connection(cfg, l, 3 * l) == want
        assert raster_annulus_connection(r, l, 3 * l) == want
        assert raster_circuit(r, l, 3 * l, vacant=True) == (not want)
        assert ev.vacant_circuit_in_annulus(cfg, l) == (not want)
    assert used > 90
