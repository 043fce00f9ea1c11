"""Finite-horizon sampled signals: inner products, angles, generation.

Signals live on a uniform grid of ``n`` samples spaced ``dt`` seconds apart.
All L2 quantities are left-endpoint Riemann sums, which is also what the
simulators produce, so the two sides of every comparison share one
quadrature rule.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateSignalError",
    "DimensionError",
    "Signal",
    "SignalClass",
    "angle",
    "gen_signal",
    "inner_product",
    "norm",
    "signal_from_text",
    "signal_to_text",
]


class DimensionError(ValueError):
    """Signals disagree in length or sample spacing."""


class DegenerateSignalError(ValueError):
    """An operation needs a nonzero signal and got the zero signal."""


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 1 or len(s) == 0:
            raise DimensionError("signal needs a nonempty 1-d sample array")
        if not np.all(np.isfinite(s)):
            raise ValueError("signal samples must be finite")
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self):
        return len(self.samples)

    def times(self):
        return self.t0 + self.dt * np.arange(len(self.samples))

    def _check_like(self, other):
        if len(self.samples) != len(other.samples):
            raise DimensionError(
                "length mismatch: %d vs %d" % (len(self.samples), len(other.samples))
            )
        if abs(self.dt - other.dt) > 1e-12 * max(self.dt, other.dt):
            raise DimensionError("dt mismatch: %g vs %g" % (self.dt, other.dt))

    def __add__(self, other):
        self._check_like(other)
        return Signal(self.samples + other.samples, self.dt, self.t0)

    def __sub__(self, other):
        self._check_like(other)
        return Signal(self.samples - other.samples, self.dt, self.t0)

    def __mul__(self, a):
        return Signal(self.samples * complex(a), self.dt, self.t0)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SignalClass:
    """Restriction of the admissible input set.

    ``band`` is a frequency interval in rad/s (None means unrestricted),
    ``amplitude`` a peak bound in signal units (None means unconstrained,
    generators then normalize to 1), over a horizon of ``horizon`` seconds
    sampled every ``dt`` seconds.
    """

    band: tuple = None
    amplitude: float = None
    horizon: float = 20.0
    dt: float = 1e-3

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if not (self.horizon >= 2 * self.dt):
            raise ValueError("horizon must cover at least two samples")
        if self.band is not None:
            lo, hi = float(self.band[0]), float(self.band[1])
            if not (0 <= lo < hi):
                raise ValueError("band must satisfy 0 <= lo < hi")
            if self.dt > np.pi / hi:
                raise ValueError("dt too coarse for the band's upper edge")
            object.__setattr__(self, "band", (lo, hi))
        if self.amplitude is not None:
            if not (self.amplitude > 0):
                raise ValueError("amplitude bound must be positive")
            object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n_samples(self):
        return int(round(self.horizon / self.dt))

    def to_dict(self):
        return {
            "band": None if self.band is None else [self.band[0], self.band[1]],
            "amplitude": self.amplitude,
            "horizon": self.horizon,
            "dt": self.dt,
        }

    @staticmethod
    def from_dict(d):
        band = d.get("band")
        return SignalClass(
            band=None if band is None else (band[0], band[1]),
            amplitude=d.get("amplitude"),
            horizon=d.get("horizon", 20.0),
            dt=d.get("dt", 1e-3),
        )


def inner_product(u, y):
    """<u, y> = sum u(t) conj(y(t)) dt."""
    u._check_like(y)
    return complex(np.sum(u.samples * np.conj(y.samples)) * u.dt)


def norm(u):
    return float(np.sqrt(max(np.real(inner_product(u, u)), 0.0)))


def angle(u, y):
    """Angle in [0, pi] between two nonzero signals.

    Evaluated as atan2 of the residual norm against the projection, not as
    arccos of the normalized inner product: arccos loses half the mantissa
    near 0 and pi, and aligned pairs (identity-like operators) must come out
    exact.
    """
    nu, ny = norm(u), norm(y)
    if nu == 0.0 or ny == 0.0:
        raise DegenerateSignalError("angle of a zero-norm signal is undefined")
    c = np.real(inner_product(u, y))
    perp = y.samples - (c / nu**2) * u.samples
    s = np.sqrt(max(np.real(np.sum(perp * np.conj(perp))) * u.dt, 0.0))
    return float(np.arctan2(s, c / nu))


def _rng(seed, stream):
    # Counter-based generator so (seed, stream) pairs are independent.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _band_bins(cls, n):
    """Indices of rfft bins whose frequency falls inside the class band."""
    t_eff = n * cls.dt
    k = np.arange(n // 2 + 1)
    omega = 2 * np.pi * k / t_eff
    if cls.band is None:
        keep = np.ones(len(k), dtype=bool)
    else:
        lo, hi = cls.band
        keep = (omega >= lo - 1e-12) & (omega <= hi + 1e-12)
    return k[keep], omega[keep]


def gen_signal(cls, kind, seed, stream=0):
    """Draw one class-feasible real-valued signal, deterministic per (seed, stream).

    Multisines sit exactly on DFT grid frequencies, so band membership is a
    property of the construction rather than of a filter's stopband.
    """
    n = cls.n_samples
    amp = 1.0 if cls.amplitude is None else cls.amplitude
    rng = _rng(seed, stream)
    if kind == "step":
        u = np.full(n, amp, dtype=float)
    elif kind == "multisine":
        ks, omegas = _band_bins(cls, n)
        usable = ks > 0
        ks, omegas = ks[usable], omegas[usable]
        if len(ks) == 0:
            raise ValueError("band contains no nonzero grid frequencies")
        m = min(32, len(ks))
        pick = rng.choice(len(ks), size=m, replace=False)
        t = cls.dt * np.arange(n)
        amps = rng.uniform(0.5, 1.0, m)
        phases = rng.uniform(0.0, 2 * np.pi, m)
        u = np.zeros(n)
        for a, w, ph in zip(amps, omegas[pick], phases):
            u += a * np.cos(w * t + ph)
        peak = np.max(np.abs(u))
        if peak == 0.0:
            raise DegenerateSignalError("multisine collapsed to zero")
        u *= amp / peak
    elif kind == "filtered_noise":
        x = rng.standard_normal(n)
        spec = np.fft.rfft(x)
        keep = np.zeros(n // 2 + 1, dtype=bool)
        ks, _ = _band_bins(cls, n)
        keep[ks] = True
        u = np.fft.irfft(np.where(keep, spec, 0.0), n)
        peak = np.max(np.abs(u))
        if peak == 0.0:
            raise DegenerateSignalError("filtered noise collapsed to zero")
        u *= amp / peak
    else:
        raise ValueError("unknown signal kind %r" % (kind,))
    return Signal(u.astype(complex), cls.dt, 0.0)


def signal_to_text(sig):
    lines = ["dt=%.17g t0=%.17g n=%d" % (sig.dt, sig.t0, len(sig.samples))]
    for z in sig.samples:
        lines.append("%.17g,%.17g" % (z.real, z.imag))
    return "\n".join(lines) + "\n"


def signal_from_text(text):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = dict(part.split("=", 1) for part in lines[0].split())
    n = int(head["n"])
    if len(lines) - 1 != n:
        raise DimensionError("header says %d samples, found %d" % (n, len(lines) - 1))
    vals = np.array(
        [[float(a), float(b)] for a, b in (ln.split(",") for ln in lines[1:])]
    )
    return Signal(vals[:, 0] + 1j * vals[:, 1], float(head["dt"]), float(head["t0"]))
