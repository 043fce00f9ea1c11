"""Loop-shaping decision layer: separation margins between SRG regions and
the incremental gain/sensitivity bounds they certify.

The robustness test separates the controller's inverted SRG from the negated,
radially hulled plant SRG; the radial hull realizes the union over loop gains
tau in (0, 1] exactly instead of by tau-gridding. Margins are published net of
the regions' resolution error bars, so a reported bound stays valid when the
geometry is only outer-accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import regions as rg
from .operators import Compose, Inverse
from .sampling import pair_streams, sample_srg
from .srg import srg_of_expr

__all__ = [
    "MarginReport",
    "robustness_margin",
    "sensitivity_margin",
    "sensitivity_srg",
    "empirical_gain",
    "empirical_gain_details",
    "margin_report_to_dict",
    "margin_report_from_dict",
]

_BOX_LIMIT = 1e9


@dataclass(frozen=True)
class MarginReport:
    """Outcome of a separation test.

    ``margin`` is the witness distance minus the error bar (never negative);
    ``bound`` is its reciprocal, infinite when the margin vanishes. The
    witness pair lies on the two regions; ``tau_certificate`` describes how
    the union over tau was checked.
    """

    kind: str
    separated: bool
    margin: float
    error_bar: float
    bound: float
    witness: tuple | None
    tau_certificate: str
    trace: tuple

    def __post_init__(self):
        if self.margin > 0.0 and math.isfinite(self.bound):
            assert abs(self.bound * self.margin - 1.0) <= 1e-9


def _finish(kind, separated, raw, err, witness, certificate, trace):
    margin = max(raw - err, 0.0)
    bound = 1.0 / margin if margin > 0.0 else float("inf")
    return MarginReport(
        kind=kind,
        separated=bool(separated),
        margin=float(margin),
        error_bar=float(err),
        bound=float(bound),
        witness=witness,
        tau_certificate=certificate,
        trace=tuple(trace),
    )


def _at_truncation(witness):
    if witness is None:
        return False
    return any(
        np.isfinite(w) and abs(w) >= 0.99 * rg.TRUNC_HI for w in witness
    )


def robustness_margin(controller, plant, cls=None, resolution=rg.DEFAULT_RESOLUTION,
                      static_refiner=None):
    """Incremental-gain certificate for the standard negative-feedback loop.

    Separation of SRG(controller^-1) from -tau * SRG(plant closure) over all
    tau in (0, 1] certifies well-posedness, and the distance at tau = 1 bounds
    the closed-loop gain from reference to control by its reciprocal.

    Distance witnesses landing on the truncation shell trigger an automatic
    box enlargement (x10 up to 1e9) so clipped geometry cannot fake a margin.
    """
    hi = rg.TRUNC_HI
    while True:
        with rg.truncation_box(hi):
            a = srg_of_expr(Inverse(controller), cls, resolution, static_refiner)
            b = srg_of_expr(plant, cls, resolution, static_refiner)
            closure = rg.chord_closure(b.region)
            neg_closure = rg.neg(closure)
            cone = rg.radial_hull(neg_closure)
            hit = rg.intersects(a.region, cone)
            raw, wa, wb = rg.nearest_points(a.region, neg_closure)
        witness = (complex(wa), complex(wb)) if np.isfinite(raw) else None
        if _at_truncation(witness) and hi < _BOX_LIMIT:
            hi = min(hi * 10.0, _BOX_LIMIT)
            continue
        break
    err = a.region.resolution + closure.resolution
    certificate = (
        "radial hull of the negated plant closure meets the inverse-controller "
        "region: some tau in (0, 1] fails"
        if hit
        else "radial hull of the negated plant closure is disjoint from the "
        "inverse-controller region: all tau in (0, 1] separated"
    )
    trace = (
        ("A = srg(controller^-1): " + " | ".join(a.rule_trace),)
        + ("B = chord closure of srg(plant): " + " | ".join(b.rule_trace),)
        + (("truncation box enlarged to %g" % hi,) if hi > 1e6 else ())
    )
    return _finish("robustness", not hit, raw if not hit else 0.0, err if not hit else 0.0,
                   witness, certificate, trace)


def sensitivity_margin(plant, controller, cls=None, resolution=rg.DEFAULT_RESOLUTION,
                       static_refiner=None):
    """Distance from SRG(plant * controller) to the critical point -1.

    The reciprocal bounds the peak incremental sensitivity of the loop.
    """
    pc = srg_of_expr(Compose(plant, controller), cls, resolution, static_refiner)
    critical = rg.make_region([rg.PointSet(np.array([-1.0 + 0j]))], False, 0.0)
    raw, wa, wb = rg.nearest_points(pc.region, critical)
    separated = raw > 0.0 and not rg.contains(pc.region, -1.0 + 0j)[0]
    err = pc.region.resolution
    witness = (complex(wa), complex(wb)) if np.isfinite(raw) else None
    certificate = (
        "critical point -1 lies inside the loop region"
        if not separated
        else "critical point -1 is exterior to the loop region"
    )
    trace = ("srg(plant*controller): " + " | ".join(pc.rule_trace),)
    return _finish("sensitivity", separated, raw if separated else 0.0,
                   err if separated else 0.0, witness, certificate, trace)


def sensitivity_srg(plant, controller, cls=None, resolution=rg.DEFAULT_RESOLUTION,
                    static_refiner=None):
    """Region bound on the SRG of the loop's sensitivity operator.

    Computed as the inverse image of 1 + SRG(plant * controller); its maximum
    modulus agrees with the reciprocal sensitivity margin within the combined
    resolution.
    """
    pc = srg_of_expr(Compose(plant, controller), cls, resolution, static_refiner)
    one = rg.make_region([rg.PointSet(np.array([1.0 + 0j]))], False, 0.0)
    shifted = rg.minkowski_sum(one, pc.region)
    region = rg.invert(shifted)
    trace = pc.rule_trace + ("sum with {1}", "invert")
    from .srg import SrgBound

    return SrgBound(region, cls, "outer", trace)


def empirical_gain_details(sim, cls, n_pairs, seed):
    """Max incremental gain over sampled pairs, with the argmax provenance."""
    sample = sample_srg(sim, cls, n_pairs, seed)
    if sample.infinity_pairs:
        pid = int(sample.infinity_pairs[0])
        return {
            "gain": float("inf"),
            "pair_id": pid,
            "streams": list(pair_streams(pid)),
            "seed": int(seed),
            "pairs": int(n_pairs),
        }
    if len(sample.points) == 0:
        return {"gain": 0.0, "pair_id": None, "streams": None,
                "seed": int(seed), "pairs": int(n_pairs)}
    mods = np.abs(sample.points)
    j = int(np.argmax(mods))
    pid = int(sample.pair_ids[j])
    return {
        "gain": float(mods[j]),
        "pair_id": pid,
        "streams": list(pair_streams(pid)),
        "seed": int(seed),
        "pairs": int(n_pairs),
    }


def empirical_gain(sim, cls, n_pairs, seed):
    """Max over sampled pairs of ||delta output|| / ||delta input||."""
    return empirical_gain_details(sim, cls, n_pairs, seed)["gain"]


def margin_report_to_dict(report):
    margin_key = "r_m" if report.kind == "robustness" else "s_m"
    d = {
        "schema_version": rg.SCHEMA_VERSION,
        "kind": report.kind,
        "separated": bool(report.separated),
        margin_key: report.margin,
        "margin": report.margin,
        "error_bar": report.error_bar,
        "bound": report.bound if math.isfinite(report.bound) else "inf",
        "witness": None
        if report.witness is None
        else [[w.real, w.imag] for w in report.witness],
        "tau_certificate": report.tau_certificate,
        "trace": list(report.trace),
    }
    return d


def margin_report_from_dict(d):
    bound = d["bound"]
    witness = d.get("witness")
    return MarginReport(
        kind=d["kind"],
        separated=bool(d["separated"]),
        margin=float(d["margin"]),
        error_bar=float(d["error_bar"]),
        bound=float("inf") if bound == "inf" else float(bound),
        witness=None if witness is None else tuple(complex(w[0], w[1]) for w in witness),
        tau_certificate=d["tau_certificate"],
        trace=tuple(d["trace"]),
    )
