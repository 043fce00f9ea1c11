"""Empirical scaled relative graphs: z-values of an operator sampled over
generated signal pairs. This is the measurement side of the toolkit; the
analytic bounds in `srg` are the certified side, and `coverage_report` ties
the two together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import regions as rg
from .signals import Signal, SignalClass, _band_bins, _rng, angle, gen_signal, norm
from .operators import simulate_many

__all__ = [
    "SrgSample",
    "z_point",
    "sample_srg",
    "coverage_report",
    "sample_to_dict",
    "sample_from_dict",
    "sample_to_csv",
]


def z_point(u1, u2, y1, y2):
    """Both branches of the z-value of one input/output pair.

    The modulus is the incremental gain ||y1 - y2|| / ||u1 - u2|| and the
    angle is the one between the increments, emitted with both signs so the
    cloud stays closed under conjugation. Coincident inputs return the empty
    tuple when the outputs also coincide, and the pair (inf, inf) when they
    do not; infinities are kept out of point statistics but reported.
    """
    du = u1 - u2
    dy = y1 - y2
    ndu = norm(du)
    ndy = norm(dy)
    if ndu == 0.0:
        if ndy == 0.0:
            return ()
        return (complex(np.inf), complex(np.inf))
    if ndy == 0.0:
        return (0j, 0j)
    th = angle(du, dy)
    z = (ndy / ndu) * np.exp(1j * th)
    return (complex(z), complex(np.conj(z)))


@dataclass(frozen=True)
class SrgSample:
    """Conjugate-closed z-point cloud with its generation provenance."""

    points: np.ndarray
    pair_ids: np.ndarray
    pair_count: int
    signal_class: SignalClass
    seed: int
    infinity_pairs: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex))
        object.__setattr__(self, "pair_ids", np.asarray(self.pair_ids, dtype=int))
        if self.pair_count < 1:
            raise ValueError("pair_count must be at least 1")
        if len(self.points) != len(self.pair_ids):
            raise ValueError("points and pair_ids must run in parallel")


def pair_streams(i):
    """Seed streams feeding pair i; exposes reproducibility of single pairs."""
    return (2 * i, 2 * i + 1)


def _extreme_pair(cls, seed, i):
    # Constant levels probe the extreme chords of amplitude-driven
    # nonlinearities; under a band constraint the slowest in-band tone
    # plays that role instead, keeping the input class-feasible.
    n = cls.n_samples
    amp = 1.0 if cls.amplitude is None else cls.amplitude
    if cls.band is None:
        base = np.ones(n)
    else:
        ks, omegas = _band_bins(cls, n)
        usable = ks > 0
        if not np.any(usable):
            raise ValueError("band contains no nonzero grid frequencies")
        w0 = omegas[usable][0]
        base = np.cos(w0 * cls.dt * np.arange(n))
    s1, s2 = pair_streams(i)
    lv1 = float(_rng(seed, s1).uniform(-1.0, 1.0))
    lv2 = float(_rng(seed, s2).uniform(-1.0, 1.0))
    u1 = Signal((lv1 * amp * base).astype(complex), cls.dt, 0.0)
    u2 = Signal((lv2 * amp * base).astype(complex), cls.dt, 0.0)
    return u1, u2


def _input_pair(cls, seed, i):
    s1, s2 = pair_streams(i)
    r = i % 10
    if r < 5:
        return gen_signal(cls, "multisine", seed, s1), gen_signal(cls, "multisine", seed, s2)
    if r < 8:
        base = gen_signal(cls, "multisine", seed, s1)
        pert = gen_signal(cls, "multisine", seed, s2)
        u1 = Signal(0.99 * base.samples, cls.dt, 0.0)
        u2 = Signal(0.99 * base.samples + 0.01 * pert.samples, cls.dt, 0.0)
        return u1, u2
    return _extreme_pair(cls, seed, i)


def _run_operator(sim, inputs, n_pairs):
    if callable(sim) and not hasattr(sim, "many"):
        outputs = []
        for i in range(n_pairs):
            try:
                outputs.append(sim(inputs[2 * i]))
                outputs.append(sim(inputs[2 * i + 1]))
            except Exception as exc:
                raise RuntimeError("simulation failed at pair %d: %s" % (i, exc)) from exc
        return outputs
    batch = sim.many if hasattr(sim, "many") else (lambda sigs: simulate_many(sim, sigs))
    try:
        return batch(inputs)
    except Exception:
        # Re-run pair by pair so the failure carries its pair index.
        outputs = []
        for i in range(n_pairs):
            try:
                outputs.extend(batch(inputs[2 * i : 2 * i + 2]))
            except Exception as exc:
                raise RuntimeError("simulation failed at pair %d: %s" % (i, exc)) from exc
        return outputs


def sample_srg(sim, cls, n_pairs, seed):
    """Empirical SRG of an operator over class-feasible input pairs.

    ``sim`` is either an expression tree (simulated with the exact
    discretization in `operators`) or a callable Signal -> Signal for
    black-box operators; a callable exposing a ``many(signals)`` method is
    batched through it. The pair mix cycles deterministically: five in ten
    independent multisines, three in ten a shared multisine plus a one
    percent perturbation (local chords), two in ten extreme-level pairs.
    Pair i draws entropy only from seed streams (2i, 2i+1), so identical
    (seed, class, n_pairs) reproduce the point multiset bit for bit.
    """
    n_pairs = int(n_pairs)
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    inputs = []
    for i in range(n_pairs):
        u1, u2 = _input_pair(cls, seed, i)
        inputs.append(u1)
        inputs.append(u2)
    outputs = _run_operator(sim, inputs, n_pairs)
    points, ids, infinities = [], [], []
    for i in range(n_pairs):
        zs = z_point(inputs[2 * i], inputs[2 * i + 1], outputs[2 * i], outputs[2 * i + 1])
        if len(zs) == 0:
            continue
        if not np.isfinite(zs[0]):
            infinities.append(i)
            continue
        points.extend(zs)
        ids.extend([i, i])
    return SrgSample(
        points=np.asarray(points, dtype=complex),
        pair_ids=np.asarray(ids, dtype=int),
        pair_count=n_pairs,
        signal_class=cls,
        seed=int(seed),
        infinity_pairs=tuple(infinities),
    )


def coverage_report(sample, bound, dilation=None):
    """Containment statistics of a sample against an SRG bound.

    Points are tested against the bound's region dilated by its resolution
    (or an explicit ``dilation``). Offenders come back with their pair ids
    and seed streams so a violation can be replayed in isolation.
    """
    region = bound.region if hasattr(bound, "region") else bound
    if dilation is None:
        dilation = region.resolution
    pts = sample.points
    report = {
        "points": int(len(pts)),
        "pair_count": int(sample.pair_count),
        "dilation": float(dilation),
        "infinity_pairs": list(sample.infinity_pairs),
    }
    if len(pts) == 0:
        report.update({"fraction_inside": 1.0, "max_violation": 0.0, "worst": []})
        return report
    dist = rg.point_distance(region, pts)
    violation = np.maximum(0.0, dist - dilation)
    inside = violation <= 0.0
    worst_order = np.argsort(-violation)
    worst = []
    for j in worst_order[:10]:
        if violation[j] <= 0.0:
            break
        pid = int(sample.pair_ids[j])
        worst.append(
            {
                "pair_id": pid,
                "z": [float(pts[j].real), float(pts[j].imag)],
                "distance": float(dist[j]),
                "violation": float(violation[j]),
                "seed": int(sample.seed),
                "streams": list(pair_streams(pid)),
            }
        )
    report.update(
        {
            "fraction_inside": float(np.mean(inside)),
            "max_violation": float(np.max(violation)),
            "worst": worst,
        }
    )
    return report


def sample_to_dict(sample):
    """Serialize as Region PointSet JSON plus generation metadata."""
    region = rg.make_region(
        [rg.PointSet(sample.points)], False, rg.DEFAULT_RESOLUTION
    ) if len(sample.points) else rg.Region((), False, rg.DEFAULT_RESOLUTION)
    d = rg.region_to_dict(region)
    d["pair_ids"] = [int(i) for i in sample.pair_ids]
    d["pair_count"] = int(sample.pair_count)
    d["class"] = sample.signal_class.to_dict()
    d["seed"] = int(sample.seed)
    d["infinity_pairs"] = [int(i) for i in sample.infinity_pairs]
    return d


def sample_from_dict(d):
    region = rg.region_from_dict(d)
    pts = []
    for p in region.primitives:
        if isinstance(p, rg.PointSet):
            pts.append(p.points)
    points = np.concatenate(pts) if pts else np.empty(0, dtype=complex)
    return SrgSample(
        points=points,
        pair_ids=np.asarray(d["pair_ids"], dtype=int),
        pair_count=int(d["pair_count"]),
        signal_class=SignalClass.from_dict(d["class"]),
        seed=int(d["seed"]),
        infinity_pairs=tuple(int(i) for i in d.get("infinity_pairs", ())),
    )


def sample_to_csv(sample):
    lines = ["re,im,pair_id"]
    for z, pid in zip(sample.points, sample.pair_ids):
        lines.append("%.17g,%.17g,%d" % (z.real, z.imag, pid))
    return "\n".join(lines) + "\n"
