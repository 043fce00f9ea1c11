"""End-to-end acceptance checks for the loop-shaping toolkit.

Each test exercises one headline behaviour against an independently computed
expectation and prints a single [PASS]/[FAIL] line with the measured values.
Budgets are wall-clock seconds on a development machine; they guard against
algorithmic blowups, not scheduler noise.
"""

import json
import time

import numpy as np

import srgtools.regions as rg
from srgtools import (
    Compose,
    Feedback,
    Lti,
    Signal,
    SignalClass,
    StaticNL,
    chord_slope_bounds,
    empirical_gain_details,
    robustness_margin,
    sample_srg,
    sensitivity_margin,
    sensitivity_srg,
    srg_of_expr,
    srg_of_lti,
    srg_of_normal_matrix,
)
from srgtools.operators import HH_E_K, HH_GBAR_K, hh_potassium, hh_potassium_many

LAG = Lti([1.0], [1.0, 1.0])
SAT = StaticNL("saturation", limit=1.0)
NONLINEARITY = Compose(LAG, SAT)
PLANT_BASE = Lti([1.0], [0.0, 1.0, 1.0])
C0 = Lti([1.0], [1.0])
C1 = Lti([0.0, 1.0, 1.0], [1.0, 1.0, 1.0])
C2 = Lti([0.0, 1.0], [1.0])


def _line(name, ok, detail):
    print("[%s] %s: %s" % ("PASS" if ok else "FAIL", name, detail))
    return ok


def test_margin_recovers_seven_eighths():
    t0 = time.perf_counter()
    rep = robustness_margin(Compose(C2, PLANT_BASE), NONLINEARITY)
    dt = time.perf_counter() - t0
    ok = (
        rep.separated
        and abs(rep.margin / 0.875 - 1.0) <= 0.02
        and abs(rep.bound / (8.0 / 7.0) - 1.0) <= 0.02
        and dt < 5.0
    )
    assert _line(
        "loop margin, derivative controller",
        ok,
        "separated=%s r_m=%.6f bound=%.6f (%.1fs)" % (rep.separated, rep.margin, rep.bound, dt),
    )


def test_margin_flags_the_unstable_controller():
    t0 = time.perf_counter()
    rep0 = robustness_margin(Compose(C0, PLANT_BASE), NONLINEARITY)
    rep1 = robustness_margin(Compose(C1, PLANT_BASE), NONLINEARITY)
    dt = time.perf_counter() - t0
    ok = (not rep0.separated) and rep1.separated and dt < 10.0
    assert _line(
        "stability verdicts, unit and lead controllers",
        ok,
        "unit: separated=%s; lead: separated=%s margin=%.4f (%.1fs)"
        % (rep0.separated, rep1.separated, rep1.margin, dt),
    )


def test_simulated_loop_gain_stays_under_certified_bound():
    limit = 8.0 / 7.0 + 0.02
    loop = Feedback(NONLINEARITY, Compose(C2, PLANT_BASE))
    t0 = time.perf_counter()
    det = empirical_gain_details(loop, SignalClass(), 500, 7)
    dt = time.perf_counter() - t0
    ok = det["gain"] <= limit and dt < 60.0
    assert _line(
        "closed-loop gain vs certified bound, 500 pairs",
        ok,
        "gain=%.6f <= %.6f (worst pair %s, %.1fs)" % (det["gain"], limit, det["pair_id"], dt),
    )


def test_static_slopes_and_z_points_stay_in_sector_disc():
    funcs = {
        "saturation": lambda x: np.clip(x, -1.0, 1.0),
        "relu": lambda x: np.maximum(x, 0.0),
        "deadzone": lambda x: np.sign(x) * np.maximum(np.abs(x) - 1.0, 0.0),
    }
    cls = SignalClass(amplitude=2.0, horizon=2.0, dt=1e-3)
    t0 = time.perf_counter()
    worst = 0.0
    counts = []
    for nl in (SAT, StaticNL("relu"), StaticNL("deadzone", width=1.0)):
        sb = chord_slope_bounds(nl)
        disc = rg.make_region(
            [rg.Disc(complex((sb.mu + sb.lam) / 2.0, 0.0), (sb.lam - sb.mu) / 2.0)], False, 0.0
        )
        rng = np.random.default_rng(11)
        x1 = rng.uniform(-4.0, 4.0, 10_000)
        x2 = rng.uniform(-4.0, 4.0, 10_000)
        keep = np.abs(x1 - x2) > 1e-9
        f = funcs[nl.kind]
        slopes = (f(x1[keep]) - f(x2[keep])) / (x1[keep] - x2[keep])
        worst = max(worst, float(rg.point_distance(disc, slopes.astype(complex)).max()))
        s = sample_srg(nl, cls, 500, 5)
        worst = max(worst, float(rg.point_distance(disc, s.points).max()))
        counts.append(len(s.points))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and min(counts) >= 1000 and dt < 10.0
    assert _line(
        "static slope discs, three nonlinearities",
        ok,
        "max distance=%.3g z-points per element=%s (%.1fs)" % (worst, counts, dt),
    )


def test_lag_srg_is_the_half_unit_disc():
    disc = rg.make_region([rg.Disc(0.5 + 0j, 0.5)], False, 0.0)
    t0 = time.perf_counter()
    b = srg_of_lti([1.0], [1.0, 1.0])
    gap = rg.hausdorff_gap(b.region, disc, spacing=1e-4)
    s = sample_srg(LAG, SignalClass(horizon=40.0, dt=1e-3), 500, 3)
    zdev = float(rg.point_distance(disc, s.points).max())
    dt = time.perf_counter() - t0
    ok = gap <= 1e-3 and zdev <= 1e-2 and len(s.points) >= 1000 and dt < 20.0
    assert _line(
        "first-order lag region",
        ok,
        "hausdorff=%.3g simulated z deviation=%.3g over %d points (%.1fs)"
        % (gap, zdev, len(s.points), dt),
    )


def test_disc_product_traces_the_cardioid():
    t0 = time.perf_counter()
    d = rg.make_region([rg.Disc(0.5 + 0j, 0.5)], False, 0.0)
    prod = rg.minkowski_product(d, d, n=rg.grid_size(1e-3))
    env = prod.primitives[0]
    psi = np.linspace(-np.pi, np.pi, 720, endpoint=False)
    target = np.cos(psi / 2.0) ** 2
    h = 2.0 * np.pi / env.n
    k = np.floor((psi + np.pi) / h).astype(int) % env.n
    r = np.exp(np.where(np.isfinite(env.hi), env.hi, -np.inf)[k])
    r[~np.isfinite(r)] = 0.0
    dev = float(np.abs(r - target).max())
    # ring checks pin the boundary from both sides, not just the radial read
    inner_ok = bool(rg.contains(prod, np.maximum(r - 2e-3, 0.0) * np.exp(1j * psi)).all())
    outer_ok = bool((rg.point_distance(prod, (r + 2e-3) * np.exp(1j * psi)) > 0).all())
    mm = rg.max_modulus(prod)
    re_lo, _ = rg.re_range(prod)
    dt = time.perf_counter() - t0
    ok = (
        dev <= 1e-3
        and inner_ok
        and outer_ok
        and abs(mm - 1.0) <= 1e-3
        and abs(re_lo + 0.125) <= 1e-3
        and dt < 5.0
    )
    assert _line(
        "unit sector self-product",
        ok,
        "boundary dev=%.3g max_modulus=%.6f leftmost=%.6f rings=%s/%s (%.1fs)"
        % (dev, mm, re_lo, inner_ok, outer_ok, dt),
    )


def test_normal_operator_region_is_the_spectral_hull():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    a = np.diag([1.0, 2.0])
    u1 = rng.standard_normal((10_000, 2)) + 1j * rng.standard_normal((10_000, 2))
    u2 = rng.standard_normal((10_000, 2)) + 1j * rng.standard_normal((10_000, 2))
    du = u1 - u2
    dy = du @ a.T
    nu = np.linalg.norm(du, axis=1)
    c = np.real(np.sum(du * np.conj(dy), axis=1))
    perp = dy - (c / nu**2)[:, None] * du
    z = (np.linalg.norm(dy, axis=1) / nu) * np.exp(1j * np.arctan2(np.linalg.norm(perp, axis=1), c / nu))
    vec_dev = float(np.abs(np.abs(z - 1.5) - 0.5).max())
    b = srg_of_normal_matrix([1.0, 2.0])
    th = np.linspace(0.0, 2.0 * np.pi, 2000, endpoint=False)
    circle = 1.5 + 0.5 * np.exp(1j * th)
    d1 = float(rg.point_distance(b.region, circle).max())
    pts = rg.boundary_cloud(b.region, 1e-3)
    d2 = float(np.abs(np.abs(pts - 1.5) - 0.5).max())
    dt = time.perf_counter() - t0
    eps = b.region.resolution
    ok = vec_dev < 1e-9 and d1 <= eps and d2 <= eps and dt < 5.0
    assert _line(
        "normal operator with eigenvalues {1, 2}",
        ok,
        "vector dev=%.3g circle->region=%.3g region->circle=%.3g eps=%g (%.1fs)"
        % (vec_dev, d1, d2, eps, dt),
    )


def _random_primitive(rng):
    kind = int(rng.integers(0, 3))
    if kind == 0:
        r = float(rng.uniform(0.05, 0.8))
        ang = float(rng.uniform(-np.pi, np.pi))
        return rg.Disc(complex((r + float(rng.uniform(0.15, 1.5))) * np.exp(1j * ang)), r)
    if kind == 1:
        lo = float(rng.uniform(np.log(0.2), np.log(1.5)))
        a0 = float(rng.uniform(-np.pi, np.pi - 1.2))
        return rg.LogPolarBox(lo, lo + float(rng.uniform(0.05, 1.0)), a0, a0 + float(rng.uniform(0.1, 1.0)))
    m = int(rng.integers(3, 8))
    base = rng.uniform(0.2, 2.0, m) + 1j * rng.uniform(-0.8, 0.8, m)
    return rg.ConvexPolygon(base * np.exp(1j * float(rng.uniform(-np.pi, np.pi))))


def _primitive_keys(region):
    keys = []
    for p in region.primitives:
        if isinstance(p, rg.SectorEnvelope):
            keys.append((p.kind, p.n, p.lo.tobytes(), p.hi.tobytes()))
        else:
            keys.append((p.kind, json.dumps(p.to_dict(), sort_keys=True)))
    return sorted(keys)


def _inside(region, w):
    tol = region.resolution * (1.0 + np.abs(w))
    return bool(rg.contains(region, w, tol=tol).all())


def _covers(big, small_cloud, tol):
    return bool(rg.contains(big, small_cloud, tol=tol).all())


def test_region_algebra_properties_hold_over_random_cases():
    t0 = time.perf_counter()
    failures = []
    for i in range(100):
        rng = np.random.default_rng(1000 + i)
        A = rg.make_region([_random_primitive(rng)])
        B = rg.make_region([_random_primitive(rng)])
        alpha = complex(rng.uniform(0.3, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        pa = rg.sample_points(A, 10_000, rng)
        pb = rg.sample_points(B, 10_000, rng)

        S = rg.minkowski_sum(A, B)
        P = rg.minkowski_product(A, B)
        inv = rg.invert(A)
        scaled = rg.scale(A, alpha)
        if not _inside(S, pa + pb):
            failures.append((i, "sum cover"))
        if not _inside(P, pa * pb):
            failures.append((i, "product cover"))
        if not _inside(inv, 1.0 / pa):
            failures.append((i, "inverse cover"))
        if not _inside(scaled, alpha * pa):
            failures.append((i, "scale cover"))

        inv2 = rg.invert(inv)
        tol2 = 2.0 * A.resolution
        if not (
            _covers(inv2, rg.boundary_cloud(A, 2e-3), tol2)
            and _covers(A, rg.boundary_cloud(inv2, 2e-3), tol2)
        ):
            failures.append((i, "inverse involution"))

        zero = rg.make_region([rg.PointSet(np.zeros(1, dtype=complex))])
        one = rg.make_region([rg.PointSet(np.ones(1, dtype=complex))])
        if _primitive_keys(rg.minkowski_sum(A, zero)) != _primitive_keys(A):
            failures.append((i, "sum identity"))
        if _primitive_keys(rg.minkowski_product(A, one)) != _primitive_keys(A):
            failures.append((i, "product identity"))
        S2 = rg.minkowski_sum(B, A)
        if _primitive_keys(S2) != _primitive_keys(S):
            tol = S.resolution + S2.resolution
            if not (
                _covers(S2, rg.boundary_cloud(S, 2e-3), tol)
                and _covers(S, rg.boundary_cloud(S2, 2e-3), tol)
            ):
                failures.append((i, "sum commutativity"))
        if _primitive_keys(rg.minkowski_product(B, A)) != _primitive_keys(P):
            failures.append((i, "product commutativity"))

        pts_p = rng.uniform(-2, 2, 40) + 1j * (rng.uniform(0.05, 2, 40) * rng.choice([-1, 1], 40))
        pts_q = np.concatenate(
            [pts_p, rng.uniform(-2, 2, 40) + 1j * (rng.uniform(0.05, 2, 40) * rng.choice([-1, 1], 40))]
        )
        hp = rg.h_convex_hull(pts_p)
        hq = rg.h_convex_hull(pts_q)
        hp2 = rg.h_convex_hull(rg.klein_to_uhp(hp.primitives[0].klein))
        tol = hp.resolution + hp2.resolution
        if not (
            _covers(hp2, rg.boundary_cloud(hp, 2e-3), tol)
            and _covers(hp, rg.boundary_cloud(hp2, 2e-3), tol)
        ):
            failures.append((i, "hull idempotence"))
        if not (
            _covers(hq, pts_p, hq.resolution)
            and _covers(hq, rg.boundary_cloud(hp, 2e-3), hq.resolution + hp.resolution)
        ):
            failures.append((i, "hull monotonicity"))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60.0
    assert _line(
        "region algebra, 100 seeded cases",
        ok,
        "failures=%s (%.1fs)" % (failures[:5] if failures else "none", dt),
    )


def test_sensitivity_margin_and_region_agree():
    t0 = time.perf_counter()
    rep = sensitivity_margin(LAG, C0)
    bound = sensitivity_srg(LAG, C0)
    prim = bound.region.primitives[0]
    mm = rg.max_modulus(bound.region)
    dt = time.perf_counter() - t0
    ok = (
        abs(rep.margin - 1.0) <= 1e-3
        and isinstance(prim, rg.Disc)
        and abs(prim.center - 0.75) <= 1e-9
        and abs(prim.radius - 0.25) <= 1e-9
        and abs(mm - 1.0 / rep.margin) <= 1e-3
        and dt < 5.0
    )
    assert _line(
        "sensitivity margin vs sensitivity region",
        ok,
        "s_m=%.6f region=Disc(%.3f, %.3f) max_modulus=%.6f (%.1fs)"
        % (rep.margin, prim.center.real, prim.radius, mm, dt),
    )


def test_bandlimited_lag_arc_and_empirical_sensitivity():
    k = 0.1
    ctrl = Lti([1.0], [1.0, k])
    cls = SignalClass(band=(0.0, 10.0), amplitude=2.0, horizon=20.0, dt=1e-3)
    t0 = time.perf_counter()
    b = srg_of_expr(ctrl, cls)
    pts = rg.boundary_cloud(b.region, 1e-3)
    on_circle = float(np.abs(np.abs(pts - 0.5) - 0.5).max())
    extent = float(np.degrees(np.abs(np.angle(pts - 0.5))).max())

    rep = sensitivity_margin(ctrl, SAT, cls=cls)
    loop = Feedback(Compose(SAT, ctrl), Lti([1.0], [1.0]))
    det = empirical_gain_details(loop, cls, 200, 7)
    limit = 1.0 / rep.margin + 0.05
    dt = time.perf_counter() - t0
    ok = (
        on_circle <= 2e-3
        and abs(extent - 90.0) <= 1.0
        and det["gain"] <= limit
        and dt < 90.0
    )
    assert _line(
        "bandlimited arc and empirical sensitivity",
        ok,
        "arc extent=%.3f deg on-circle dev=%.3g; empirical=%.6f <= %.6f (%.1fs)"
        % (extent, on_circle, det["gain"], limit, dt),
    )


def test_potassium_channel_checks_and_reproducible_sampling():
    t0 = time.perf_counter()
    v = Signal(np.full(4000, HH_E_K, dtype=complex), 0.005)
    zero_force = float(np.abs(hh_potassium(v).samples).max())

    def a_n(vm):
        return 0.01 * (vm + 55.0) / (1.0 - np.exp(-(vm + 55.0) / 10.0))

    def b_n(vm):
        return 0.125 * np.exp(-(vm + 65.0) / 80.0)

    v0 = -40.0
    i_k = hh_potassium(Signal(np.full(60_000, v0, dtype=complex), 0.005))
    n_inf = a_n(v0) / (a_n(v0) + b_n(v0))
    n_end = (np.real(i_k.samples[-1]) / (HH_GBAR_K * (v0 - HH_E_K))) ** 0.25
    fixed_dev = abs(n_end - n_inf)

    class Shifted:
        # sampling drives deviations about the resting potential
        def __call__(self, sig):
            return hh_potassium(Signal(sig.samples + (-65.0), sig.dt, sig.t0))

        def many(self, sigs):
            return hh_potassium_many([Signal(s.samples + (-65.0), s.dt, s.t0) for s in sigs])

    cls = SignalClass(band=(0.0, 100.0), amplitude=30.0, horizon=20.0, dt=0.005)
    s1 = sample_srg(Shifted(), cls, 200, 9)
    s2 = sample_srg(Shifted(), cls, 200, 9)
    bit_equal = s1.points.tobytes() == s2.points.tobytes()
    dt = time.perf_counter() - t0
    ok = zero_force <= 1e-6 and fixed_dev <= 1e-6 and bit_equal and len(s1.points) >= 400 and dt < 60.0
    assert _line(
        "potassium conductance checks and sampling",
        ok,
        "zero-force=%.3g fixed-point dev=%.3g bit-reproducible=%s points=%d (%.1fs)"
        % (zero_force, fixed_dev, bit_equal, len(s1.points), dt),
    )
