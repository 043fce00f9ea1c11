"""Analytic region bounds for primitive systems and expression trees.

Shape checks pin the constructors; trace and exactness checks pin the
bookkeeping that margins and reports rely on.
"""

import numpy as np
import pytest

import srgtools.regions as rg
from srgtools.operators import (
    Compose,
    Feedback,
    Inverse,
    Lti,
    Scale,
    SectorBounds,
    StaticNL,
    count_nodes,
)
from srgtools.signals import SignalClass
from srgtools.srg import (
    NoAnalyticBoundError,
    UnboundedNyquistError,
    srg_bound_to_dict,
    srg_of_expr,
    srg_of_lti,
    srg_of_normal_matrix,
    srg_of_sector,
    srg_of_static,
)

SAT = StaticNL("saturation", limit=1.0)


def _only_disc(bound):
    discs = [p for p in bound.region.primitives if isinstance(p, rg.Disc)]
    assert len(discs) == len(bound.region.primitives) == 1
    return discs[0]


def test_sector_disc_geometry():
    d = _only_disc(srg_of_sector(SectorBounds(0.0, 1.0)))
    assert d.center == 0.5 and d.radius == 0.5
    d = _only_disc(srg_of_sector(SectorBounds(-1.0, 1.0)))
    assert d.center == 0.0 and d.radius == 1.0


def test_pure_gain_sector_degenerates_to_a_point():
    b = srg_of_sector(SectorBounds(2.0, 2.0))
    (p,) = b.region.primitives
    assert isinstance(p, rg.PointSet) and complex(p.points[0]) == 2.0


def test_lag_bound_is_the_half_unit_disc():
    b = srg_of_lti([1.0], [1.0, 1.0])
    target = rg.make_region([rg.Disc(0.5 + 0j, 0.5)], False, 0.0)
    assert rg.hausdorff_gap(b.region, target, spacing=1e-3) <= 1e-3
    assert b.exactness == "outer"


def test_lead_bound_is_the_vertical_line():
    b = srg_of_lti([1.0, 1.0], [1.0])  # s + 1
    assert b.region.contains_infinity
    segs = [p for p in b.region.primitives if isinstance(p, rg.Segment)]
    assert segs and all(p.a.real == pytest.approx(1.0) and p.b.real == pytest.approx(1.0) for p in segs)


def test_static_gain_is_a_point_for_any_band():
    for cls in (None, SignalClass(band=(0.0, 5.0)), SignalClass(band=(1.0, 100.0))):
        b = srg_of_lti([3.0], [1.0], cls=cls)
        (p,) = b.region.primitives
        assert isinstance(p, rg.PointSet) and complex(p.points[0]) == 3.0
        assert b.exactness == "exact"


def test_pole_on_the_axis_is_reported_with_its_frequency():
    with pytest.raises(UnboundedNyquistError, match="omega"):
        srg_of_lti([1.0], [0.0, 1.0])


def test_band_widening_only_grows_the_region():
    narrow = srg_of_lti([1.0], [1.0, 0.1], cls=SignalClass(band=(0.0, 10.0)))
    wide = srg_of_lti([1.0], [1.0, 0.1], cls=SignalClass(band=(0.0, 40.0)))
    cloud = rg.boundary_cloud(narrow.region, 2e-3)
    tol = narrow.region.resolution + wide.region.resolution
    assert bool(rg.contains(wide.region, cloud, tol=tol).all())


def test_static_bounds_track_the_operating_amplitude():
    d = _only_disc(srg_of_static(SAT))
    assert d.center == 0.5 and d.radius == 0.5
    b = srg_of_static(SAT, cls=SignalClass(amplitude=0.5))
    (p,) = b.region.primitives
    assert isinstance(p, rg.PointSet) and complex(p.points[0]) == 1.0


def test_normal_operator_bounds():
    b = srg_of_normal_matrix([1.0])
    (p,) = b.region.primitives
    assert isinstance(p, rg.PointSet) and complex(p.points[0]) == 1.0
    assert b.exactness == "exact"

    tri = srg_of_normal_matrix([1.0, 2.0, 3.0])
    rng = np.random.default_rng(1)
    a = np.diag([1.0, 2.0, 3.0])
    u = rng.standard_normal((2000, 3)) + 1j * rng.standard_normal((2000, 3))
    v = rng.standard_normal((2000, 3)) + 1j * rng.standard_normal((2000, 3))
    du = u - v
    dy = du @ a.T
    nu = np.linalg.norm(du, axis=1)
    c = np.real(np.sum(du * np.conj(dy), axis=1))
    perp = dy - (c / nu**2)[:, None] * du
    z = (np.linalg.norm(dy, axis=1) / nu) * np.exp(
        1j * np.arctan2(np.linalg.norm(perp, axis=1), c / nu)
    )
    tol = tri.region.resolution * (1.0 + np.abs(z))
    assert bool(rg.contains(tri.region, z, tol=tol).all())


def test_composition_collapses_shared_rational_factors():
    b = srg_of_expr(Compose(Lti([0.0, 1.0], [1.0]), Lti([1.0], [0.0, 1.0, 1.0])))
    assert any("collapsed exactly" in step for step in b.rule_trace)
    target = rg.make_region([rg.Disc(0.5 + 0j, 0.5)], False, 0.0)
    assert rg.hausdorff_gap(b.region, target, spacing=1e-3) <= 1e-3


def test_scaling_a_sector_scales_its_disc():
    d = _only_disc(srg_of_expr(Scale(2.0, SAT)))
    assert d.center == pytest.approx(1.0) and d.radius == pytest.approx(1.0)


def test_inverse_of_the_lag_reaches_infinity():
    b = srg_of_expr(Inverse(Lti([1.0], [1.0, 1.0])))
    assert b.region.contains_infinity
    cloud = rg.boundary_cloud(b.region, 1.0)
    assert float(np.abs(np.real(cloud) - 1.0).max()) <= 1e-9


def test_feedback_rule_matches_the_loop_identity():
    # u = C(r - P u) means the r -> u operator is (C^-1 + P)^-1
    b = srg_of_expr(Feedback(SAT, Lti([1.0], [1.0, 1.0])))
    assert b.rule_trace[0].startswith("feedback:")
    assert len(b.rule_trace) == 3


def test_rule_trace_covers_every_node():
    expr = Compose(Lti([1.0], [1.0, 1.0]), SAT)
    b = srg_of_expr(expr)
    assert len(b.rule_trace) == count_nodes(expr)
    assert b.exactness == "outer"


def test_regions_from_constructors_are_conjugate_symmetric():
    for b in (
        srg_of_lti([1.0], [1.0, 0.5]),
        srg_of_expr(Compose(Lti([1.0], [1.0, 1.0]), SAT)),
        srg_of_normal_matrix([1.0 + 1.0j, 2.0]),
    ):
        pts = rg.sample_points(b.region, 500, np.random.default_rng(0))
        tol = b.region.resolution * (1.0 + np.abs(pts))
        assert bool(rg.contains(b.region, np.conj(pts), tol=tol).all())


def test_unknown_leaves_are_rejected_not_guessed():
    with pytest.raises(NoAnalyticBoundError):
        srg_of_expr(lambda sig: sig)


def test_bound_serialization_carries_the_provenance():
    d = srg_bound_to_dict(srg_of_static(SAT))
    assert d["exactness"] == "outer"
    assert d["rule_trace"] and isinstance(d["rule_trace"], list)
    assert d["schema_version"] == "1"
    assert d["primitives"][0]["kind"] == "disc"


def test_sampled_refinements_are_flagged_uncertified():
    def refiner(nl, cls):
        return rg.make_region([rg.Disc(0.5 + 0j, 0.25)], False, 1e-3)

    b = srg_of_expr(SAT, static_refiner=refiner)
    assert _only_disc(b).radius == pytest.approx(0.25)
    assert any("uncertified" in step for step in b.rule_trace)
