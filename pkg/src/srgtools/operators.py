"""Operator expression trees and fixed-step time-domain simulators.

An expression is an immutable tree of Lti / StaticNL / NormalMatrix leaves
under Sum, Compose, Inverse, Scale and Feedback. LTI coefficient lists are
ascending powers of s. Feedback(plant, controller) is the standard loop
r -> u with u = controller(r - plant(u)), so the map r -> u is
(controller^-1 + plant)^-1 whenever that composition makes sense.

Simulation uses exact zero-order-hold discretization for every LTI block
and samplewise evaluation for static nonlinearities; everything runs from
zero initial state, since only increments matter downstream.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .signals import Signal

__all__ = [
    "Compose",
    "Feedback",
    "Inverse",
    "Lti",
    "NormalMatrix",
    "NotSimulableError",
    "Scale",
    "SectorBounds",
    "StaticNL",
    "Sum",
    "chord_slope_bounds",
    "count_nodes",
    "expr_from_dict",
    "expr_to_dict",
    "hh_potassium",
    "rational_of",
    "simulate",
    "simulate_many",
    "static_eval",
]


class NotSimulableError(ValueError):
    """The expression has no time-domain realization under our rules."""


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------


def _coeffs(c):
    a = np.atleast_1d(np.asarray(c, dtype=float))
    if a.ndim != 1 or len(a) == 0:
        raise ValueError("coefficient list must be 1-d and nonempty")
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    return tuple(float(x) for x in a)


@dataclass(frozen=True)
class Lti:
    """Rational transfer function; num/den are ascending powers of s."""

    num: tuple
    den: tuple

    def __post_init__(self):
        object.__setattr__(self, "num", _coeffs(self.num))
        object.__setattr__(self, "den", _coeffs(self.den))
        if not any(c != 0.0 for c in self.den):
            raise ValueError("denominator is identically zero")


_NL_KINDS = ("saturation", "deadzone", "relu", "sector_custom")


@dataclass(frozen=True)
class StaticNL:
    """Memoryless nonlinearity, applied samplewise to real signals."""

    kind: str
    limit: float = None
    width: float = None
    mu: float = None
    lam: float = None

    def __post_init__(self):
        if self.kind not in _NL_KINDS:
            raise ValueError("unknown static nonlinearity %r" % (self.kind,))
        if self.kind == "saturation":
            if self.limit is None or not (self.limit > 0):
                raise ValueError("saturation needs a positive limit")
        if self.kind == "deadzone":
            if self.width is None or not (self.width > 0):
                raise ValueError("deadzone needs a positive width")
        if self.kind == "sector_custom":
            if self.mu is None or self.lam is None or not (self.mu <= self.lam):
                raise ValueError("sector_custom needs mu <= lam")


@dataclass(frozen=True)
class NormalMatrix:
    """Normal operator given by its spectrum; an SRG-level leaf only."""

    eigenvalues: tuple

    def __post_init__(self):
        eig = tuple(complex(z) for z in self.eigenvalues)
        if len(eig) == 0:
            raise ValueError("need at least one eigenvalue")
        object.__setattr__(self, "eigenvalues", eig)


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __post_init__(self):
        kids = tuple(self.children)
        if len(kids) < 2:
            raise ValueError("sum needs at least two children")
        object.__setattr__(self, "children", kids)


@dataclass(frozen=True)
class Compose:
    outer: object
    inner: object


@dataclass(frozen=True)
class Inverse:
    child: object


@dataclass(frozen=True)
class Scale:
    alpha: complex
    child: object

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class Feedback:
    plant: object
    controller: object


def count_nodes(expr):
    if isinstance(expr, Sum):
        return 1 + sum(count_nodes(c) for c in expr.children)
    if isinstance(expr, Compose):
        return 1 + count_nodes(expr.outer) + count_nodes(expr.inner)
    if isinstance(expr, Inverse):
        return 1 + count_nodes(expr.child)
    if isinstance(expr, Scale):
        return 1 + count_nodes(expr.child)
    if isinstance(expr, Feedback):
        return 1 + count_nodes(expr.plant) + count_nodes(expr.controller)
    return 1


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------


def expr_to_dict(expr):
    if isinstance(expr, Lti):
        return {"type": "lti", "num": list(expr.num), "den": list(expr.den)}
    if isinstance(expr, StaticNL):
        d = {"type": "static", "kind": expr.kind}
        if expr.kind == "saturation":
            d["limit"] = expr.limit
        elif expr.kind == "deadzone":
            d["width"] = expr.width
        elif expr.kind == "sector_custom":
            d["mu"], d["lam"] = expr.mu, expr.lam
        return d
    if isinstance(expr, NormalMatrix):
        return {
            "type": "normal_matrix",
            "eigenvalues": [[z.real, z.imag] for z in expr.eigenvalues],
        }
    if isinstance(expr, Sum):
        return {"type": "sum", "children": [expr_to_dict(c) for c in expr.children]}
    if isinstance(expr, Compose):
        return {
            "type": "compose",
            "outer": expr_to_dict(expr.outer),
            "inner": expr_to_dict(expr.inner),
        }
    if isinstance(expr, Inverse):
        return {"type": "inverse", "child": expr_to_dict(expr.child)}
    if isinstance(expr, Scale):
        return {
            "type": "scale",
            "alpha": [expr.alpha.real, expr.alpha.imag],
            "child": expr_to_dict(expr.child),
        }
    if isinstance(expr, Feedback):
        return {
            "type": "feedback",
            "plant": expr_to_dict(expr.plant),
            "controller": expr_to_dict(expr.controller),
        }
    raise ValueError("not an expression node: %r" % (expr,))


def expr_from_dict(d):
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("expression JSON must be an object with a 'type' field")
    t = d["type"]
    if t == "lti":
        return Lti(d["num"], d["den"])
    if t == "static":
        return StaticNL(
            d["kind"],
            limit=d.get("limit"),
            width=d.get("width"),
            mu=d.get("mu"),
            lam=d.get("lam"),
        )
    if t == "normal_matrix":
        return NormalMatrix([complex(p[0], p[1]) for p in d["eigenvalues"]])
    if t == "sum":
        return Sum(tuple(expr_from_dict(c) for c in d["children"]))
    if t == "compose":
        return Compose(expr_from_dict(d["outer"]), expr_from_dict(d["inner"]))
    if t == "inverse":
        return Inverse(expr_from_dict(d["child"]))
    if t == "scale":
        a = d["alpha"]
        alpha = complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
        return Scale(alpha, expr_from_dict(d["child"]))
    if t == "feedback":
        return Feedback(expr_from_dict(d["plant"]), expr_from_dict(d["controller"]))
    raise ValueError("unknown expression type %r" % (t,))


# ---------------------------------------------------------------------------
# Rational collapse
# ---------------------------------------------------------------------------


def _poly_add(a, b):
    out = np.zeros(max(len(a), len(b)))
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def _strip(num, den):
    num = np.trim_zeros(np.asarray(num, dtype=float), "b")
    den = np.trim_zeros(np.asarray(den, dtype=float), "b")
    if len(num) == 0:
        num = np.zeros(1)
    if len(den) == 0:
        raise ValueError("denominator is identically zero")
    # Cancel common powers of s (shared zero constant terms).
    while len(num) > 1 and len(den) > 1 and num[0] == 0.0 and den[0] == 0.0:
        num, den = num[1:], den[1:]
    return num, den


def rational_of(expr):
    """Collapse an all-LTI subtree to (num, den) ascending; None if mixed."""
    if isinstance(expr, Lti):
        return _strip(expr.num, expr.den)
    if isinstance(expr, Sum):
        parts = [rational_of(c) for c in expr.children]
        if any(p is None for p in parts):
            return None
        num, den = parts[0]
        for n2, d2 in parts[1:]:
            num = _poly_add(np.convolve(num, d2), np.convolve(n2, den))
            den = np.convolve(den, d2)
        return _strip(num, den)
    if isinstance(expr, Compose):
        a, b = rational_of(expr.outer), rational_of(expr.inner)
        if a is None or b is None:
            return None
        return _strip(np.convolve(a[0], b[0]), np.convolve(a[1], b[1]))
    if isinstance(expr, Inverse):
        r = rational_of(expr.child)
        if r is None:
            return None
        num, den = r
        if not np.any(num != 0.0):
            raise NotSimulableError("inverse of the zero operator")
        return _strip(den, num)
    if isinstance(expr, Scale):
        if expr.alpha.imag != 0.0:
            return None
        r = rational_of(expr.child)
        if r is None:
            return None
        return _strip(expr.alpha.real * r[0], r[1])
    if isinstance(expr, Feedback):
        p, c = rational_of(expr.plant), rational_of(expr.controller)
        if p is None or c is None:
            return None
        np_, dp = p
        nc, dc = c
        num = np.convolve(nc, dp)
        den = _poly_add(np.convolve(dc, dp), np.convolve(np_, nc))
        return _strip(num, den)
    return None


# ---------------------------------------------------------------------------
# Static nonlinearities
# ---------------------------------------------------------------------------


def _static_fn(nl):
    if nl.kind == "saturation":
        lim = nl.limit
        return lambda x: np.clip(x, -lim, lim)
    if nl.kind == "deadzone":
        w = nl.width
        return lambda x: np.sign(x) * np.maximum(np.abs(x) - w, 0.0)
    if nl.kind == "relu":
        return lambda x: np.maximum(x, 0.0)
    mu, lam = nl.mu, nl.lam
    return lambda x: np.where(x < 0, mu * x, lam * x)


def static_eval(nl, x):
    """Pointwise value of a static nonlinearity on real input."""
    return _static_fn(nl)(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SectorBounds:
    """Chord-slope interval [mu, lam] of a static nonlinearity."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.lam) and self.mu <= self.lam):
            raise ValueError("need finite mu <= lam")


def chord_slope_bounds(nl, amplitude=None):
    """Infimum and supremum of (f(u1)-f(u2))/(u1-u2) over |u| <= amplitude.

    Closed forms for the built-in kinds; the grid refinement path exists for
    exotic parameter combinations and as a cross-check oracle in the tests.
    """
    a = np.inf if amplitude is None else float(amplitude)
    if a <= 0:
        raise ValueError("amplitude must be positive")
    if nl.kind == "saturation":
        return SectorBounds(1.0, 1.0) if a <= nl.limit else SectorBounds(0.0, 1.0)
    if nl.kind == "deadzone":
        return SectorBounds(0.0, 0.0) if a <= nl.width else SectorBounds(0.0, 1.0)
    if nl.kind == "relu":
        return SectorBounds(0.0, 1.0)
    if nl.kind == "sector_custom":
        return SectorBounds(nl.mu, nl.lam)
    return _chord_bounds_grid(_static_fn(nl), a)


def _chord_bounds_grid(f, a, n=512, refine=1e-6):
    hi = min(a, 1e3)
    x = np.linspace(-hi, hi, n)
    lo_b, hi_b = np.inf, -np.inf
    # Three zoom passes around the extreme chords take the grid pitch from
    # O(hi/n) to O(refine) without a quadratic blowup in points.
    for _ in range(3):
        y = f(x)
        du = x[None, :] - x[:, None]
        mask = np.abs(du) > refine
        s = np.where(mask, (y[None, :] - y[:, None]) / np.where(mask, du, 1.0), np.nan)
        lo_b = min(lo_b, float(np.nanmin(s)))
        hi_b = max(hi_b, float(np.nanmax(s)))
        i, j = np.unravel_index(np.nanargmin(s), s.shape)
        k, m = np.unravel_index(np.nanargmax(s), s.shape)
        focus = np.concatenate(
            [np.linspace(x[q] - 2 * (x[1] - x[0]), x[q] + 2 * (x[1] - x[0]), n // 4) for q in (i, j, k, m)]
        )
        x = np.clip(np.unique(focus), -hi, hi)
        if len(x) < 4:
            break
    return SectorBounds(lo_b, hi_b)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def _require_real(U, what):
    scale = max(float(np.max(np.abs(U))), 1.0)
    if float(np.max(np.abs(U.imag))) > 1e-9 * scale:
        raise NotSimulableError("%s needs a real-valued signal" % (what,))
    return U.real


def _zoh(num, den, dt):
    num, den = _strip(num, den)
    if len(num) - 1 > len(den) - 1:
        raise NotSimulableError(
            "improper transfer function (num degree %d > den degree %d)"
            % (len(num) - 1, len(den) - 1)
        )
    numd, dend, _ = sps.cont2discrete((num[::-1], den[::-1]), dt, method="zoh")
    return np.atleast_1d(np.squeeze(numd)), np.atleast_1d(dend)


def _lti_apply(num, den, U, dt):
    num, den = _strip(num, den)
    if len(den) == 1:
        return (num[0] / den[0]) * U if len(num) == 1 else None
    numd, dend = _zoh(num, den, dt)
    return sps.lfilter(numd, dend, U, axis=1)


def _inverse_filter(expr, dt):
    """Discrete filter realizing Inverse(child).

    For a biproper child the returned filter is the exact inverse of the
    child's zero-order-hold discretization, so inverse-after-forward is the
    identity at the sample times rather than identity plus O(dt).
    """
    r = rational_of(expr.child)
    if r is None:
        raise NotSimulableError("inverse is only simulable for rational subtrees")
    nc, dc = r
    if len(nc) < len(dc):
        raise NotSimulableError(
            "inverse of a strictly proper transfer function is improper"
        )
    if len(nc) > len(dc):
        return _zoh(dc, nc, dt)
    numd, dend = _zoh(nc, dc, dt)
    if abs(numd[0]) < 1e-300:
        raise NotSimulableError("inverse filter has no direct feedthrough")
    return dend, numd


def _apply(expr, U, dt):
    """Run expr over a (batch, n) array of complex sample rows."""
    if isinstance(expr, Lti):
        out = _lti_apply(expr.num, expr.den, U, dt)
        if out is None:
            raise NotSimulableError("improper transfer function")
        return out
    if isinstance(expr, (Sum, Compose, Scale, Feedback)):
        # Collapse all-LTI subtrees first: pole/zero cancellations (e.g. a
        # differentiator against an integrator) make trees simulable that
        # are not realizable node by node, and one discretization of the
        # collapsed function is exact where a cascade of them is not.
        r = rational_of(expr)
        if r is not None and len(r[0]) <= len(r[1]):
            return _lti_apply(r[0], r[1], U, dt)
    if isinstance(expr, StaticNL):
        return _static_fn(expr)(_require_real(U, "static nonlinearity")).astype(complex)
    if isinstance(expr, Sum):
        acc = _apply(expr.children[0], U, dt)
        for c in expr.children[1:]:
            acc = acc + _apply(c, U, dt)
        return acc
    if isinstance(expr, Compose):
        return _apply(expr.outer, _apply(expr.inner, U, dt), dt)
    if isinstance(expr, Scale):
        return expr.alpha * _apply(expr.child, U, dt)
    if isinstance(expr, Inverse):
        numd, dend = _inverse_filter(expr, dt)
        return sps.lfilter(numd, dend, U, axis=1)
    if isinstance(expr, Feedback):
        return _feedback_apply(expr, U, dt)
    if isinstance(expr, NormalMatrix):
        raise NotSimulableError("normal-matrix leaves are SRG-level objects only")
    raise NotSimulableError("cannot simulate %r" % (type(expr).__name__,))


def simulate(expr, u):
    """Apply the operator to one signal; deterministic, zero initial state."""
    out = _apply(expr, u.samples[None, :], u.dt)
    return Signal(out[0], u.dt, u.t0)


def simulate_many(expr, sigs):
    """Batched simulate: one pass over a list of equal-shape signals."""
    if not sigs:
        return []
    dt, n = sigs[0].dt, len(sigs[0])
    for s in sigs[1:]:
        sigs[0]._check_like(s)
    U = np.stack([s.samples for s in sigs])
    out = _apply(expr, U, dt)
    return [Signal(row, dt, s.t0) for row, s in zip(out, sigs)]


# --- feedback stepping -----------------------------------------------------


class _LtiStep:
    def __init__(self, num, den, dt, batch):
        self._from_discrete(*_zoh(num, den, dt), batch)

    def _from_discrete(self, numd, dend, batch):
        trimmed = np.trim_zeros(np.asarray(numd), "f")
        if len(trimmed) == 0:
            trimmed = np.zeros(1)
        if len(dend) == 1:
            self.a = np.zeros((0, 0))
            self.b = np.zeros(0)
            self.c = np.zeros(0)
            self.d = numd[0] / dend[0]
        else:
            a, b, c, d = sps.tf2ss(trimmed, dend)
            self.a, self.b, self.c = a, b.ravel(), c.ravel()
            self.d = float(np.squeeze(d))
        self.x = np.zeros((len(self.b), batch), dtype=complex)
        self.direct = self.d != 0.0

    def output(self, v):
        return self.c @ self.x + self.d * v

    def advance(self, v):
        self.x = self.a @ self.x + np.outer(self.b, v)


class _StaticStep:
    direct = True

    def __init__(self, nl):
        self.f = _static_fn(nl)

    def output(self, v):
        return self.f(_require_real(v, "static nonlinearity")).astype(complex)

    def advance(self, v):
        pass


class _SumStep:
    def __init__(self, parts):
        self.parts = parts
        self.direct = any(p.direct for p in parts)

    def output(self, v):
        acc = self.parts[0].output(v)
        for p in self.parts[1:]:
            acc = acc + p.output(v)
        return acc

    def advance(self, v):
        for p in self.parts:
            p.advance(v)


class _ComposeStep:
    def __init__(self, outer, inner):
        self.outer, self.inner = outer, inner
        self.direct = outer.direct and inner.direct

    def output(self, v):
        return self.outer.output(self.inner.output(v))

    def advance(self, v):
        w = self.inner.output(v)
        self.inner.advance(v)
        self.outer.advance(w)


class _ScaleStep:
    def __init__(self, alpha, child):
        self.alpha, self.child = alpha, child
        self.direct = child.direct

    def output(self, v):
        return self.alpha * self.child.output(v)

    def advance(self, v):
        self.child.advance(v)


class _FeedbackStep:
    """One-sample loop solve for u = C(r - P(u)).

    When both paths have direct feedthrough the per-step equation is solved
    by damped iteration seeded with the previous step's output (a one-step
    delay as the initial guess); the damping is halved until the residual
    drops below 1e-8.
    """

    def __init__(self, plant, controller, batch):
        self.p, self.c = plant, controller
        self.direct = controller.direct
        self.prev = np.zeros(batch, dtype=complex)
        self.algebraic = plant.direct and controller.direct
        if self.algebraic:
            warnings.warn(
                "feedback loop has an algebraic path; solving per step by damped iteration",
                RuntimeWarning,
                stacklevel=2,
            )

    def output(self, r):
        if not self.c.direct:
            return self.c.output(r)
        if not self.p.direct:
            return self.c.output(r - self.p.output(self.prev))
        u = self.prev.copy()
        gamma = 1.0
        last = np.inf
        for _ in range(200):
            nxt = self.c.output(r - self.p.output(u))
            res = float(np.max(np.abs(nxt - u)))
            scale = max(float(np.max(np.abs(nxt))), 1.0)
            if res <= 1e-8 * scale:
                return nxt
            # halve only when the residual stops shrinking; an unconditional
            # decay stalls at the floor for loop gains as small as 2
            if res >= last:
                gamma = max(0.5 * gamma, 1.0 / 1024.0)
            last = res
            u = (1.0 - gamma) * u + gamma * nxt
        raise NotSimulableError("algebraic feedback loop did not converge")

    def advance(self, r):
        u = self.output(r)
        e = r - self.p.output(u)
        self.p.advance(u)
        self.c.advance(e)
        self.prev = u


def _build_stepper(expr, dt, batch):
    if isinstance(expr, (Sum, Compose, Scale, Feedback)):
        r = rational_of(expr)
        if r is not None and len(r[0]) <= len(r[1]):
            return _LtiStep(r[0], r[1], dt, batch)
    if isinstance(expr, Lti):
        return _LtiStep(expr.num, expr.den, dt, batch)
    if isinstance(expr, StaticNL):
        return _StaticStep(expr)
    if isinstance(expr, Sum):
        return _SumStep([_build_stepper(c, dt, batch) for c in expr.children])
    if isinstance(expr, Compose):
        return _ComposeStep(
            _build_stepper(expr.outer, dt, batch), _build_stepper(expr.inner, dt, batch)
        )
    if isinstance(expr, Scale):
        return _ScaleStep(expr.alpha, _build_stepper(expr.child, dt, batch))
    if isinstance(expr, Inverse):
        numd, dend = _inverse_filter(expr, dt)
        step = _LtiStep.__new__(_LtiStep)
        step._from_discrete(numd, dend, batch)
        return step
    if isinstance(expr, Feedback):
        return _FeedbackStep(
            _build_stepper(expr.plant, dt, batch),
            _build_stepper(expr.controller, dt, batch),
            batch,
        )
    raise NotSimulableError("cannot step %r" % (type(expr).__name__,))


def _feedback_apply(expr, U, dt):
    batch, n = U.shape
    stepper = _build_stepper(expr, dt, batch)
    out = np.empty_like(U)
    for k in range(n):
        out[:, k] = stepper.output(U[:, k])
        stepper.advance(U[:, k])
    return out


# ---------------------------------------------------------------------------
# Hodgkin-Huxley potassium conductance
# ---------------------------------------------------------------------------

HH_GBAR_K = 36.0  # mS/cm^2, squid-axon standard
HH_E_K = -77.0  # mV


def _alpha_n(v):
    x = v + 55.0
    # The 0/0 point at v = -55 has limit 0.1.
    safe = np.where(np.abs(x) < 1e-7, 1.0, x)
    val = 0.01 * safe / (1.0 - np.exp(-safe / 10.0))
    return np.where(np.abs(x) < 1e-7, 0.1, val)


def _beta_n(v):
    return 0.125 * np.exp(-(v + 65.0) / 80.0)


def _gate_rhs(n, v):
    return _alpha_n(v) * (1.0 - n) - _beta_n(v) * n


def hh_potassium(v_sig, gbar=HH_GBAR_K, e_k=HH_E_K):
    """Potassium current of the squid-axon model driven by a voltage signal.

    Units are mV and ms; the signal's dt is read in milliseconds. The gate
    starts at its steady state for the initial voltage, is integrated by a
    fixed-step fourth-order scheme, and the current is
    gbar * n(t)^4 * (V(t) - e_k).
    """
    return hh_potassium_many([v_sig], gbar, e_k)[0]


def hh_potassium_many(v_sigs, gbar=HH_GBAR_K, e_k=HH_E_K):
    """Batched hh_potassium: one integrator pass over equal-shape signals."""
    dt = v_sigs[0].dt
    if dt > 0.01:
        warnings.warn(
            "dt = %g ms is coarse for potassium gate dynamics; expect integration error"
            % (dt,),
            RuntimeWarning,
            stacklevel=2,
        )
    V = _require_real(np.stack([s.samples for s in v_sigs]), "gate voltage")
    steps = V.shape[1]
    n = _alpha_n(V[:, 0]) / (_alpha_n(V[:, 0]) + _beta_n(V[:, 0]))
    gates = np.empty_like(V)
    gates[:, 0] = n
    for k in range(steps - 1):
        v0, v1 = V[:, k], V[:, k + 1]
        vm = 0.5 * (v0 + v1)
        k1 = _gate_rhs(n, v0)
        k2 = _gate_rhs(n + 0.5 * dt * k1, vm)
        k3 = _gate_rhs(n + 0.5 * dt * k2, vm)
        k4 = _gate_rhs(n + dt * k3, v1)
        n = n + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        gates[:, k + 1] = n
    current = gbar * gates**4 * (V - e_k)
    return [
        Signal(row.astype(complex), s.dt, s.t0) for row, s in zip(current, v_sigs)
    ]
