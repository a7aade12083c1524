"""Pulse programs: time-dependent Rabi frequency and detuning.

A pulse program is anything with a ``duration`` (s) and four methods
``rabi(t)``, ``detuning(t)``, ``rabi_dot(t)``, ``detuning_dot(t)``
returning rad/s (rad/s^2 for the derivatives).  All methods accept
scalars or numpy arrays and clamp t to [0, duration]; the module-level
``ap_rabi`` and ``ap_detuning`` wrappers instead reject out-of-range
arguments.

``APPulse`` is the swept passage pulse

    rabi(t)     = omega_max * sin^2(pi t / t_p)
    detuning(t) = delta_c + sign(t - t_p/2) * delta_max * sqrt(1 - sin^4(pi t / t_p))

with sign(0) taken as +1 at the midpoint.  The envelope vanishes at both
ends while the detuning sweeps monotonically from delta_c - delta_max to
delta_c + delta_max.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .units import khz_to_rad_per_s, ms_to_s, rad_per_s_to_khz, s_to_ms

__all__ = [
    "PulseProgram",
    "APPulse",
    "RectPulse",
    "TabulatedPulse",
    "time_mirrored",
    "inverted",
    "ap_rabi",
    "ap_detuning",
    "adiabaticity",
    "max_adiabaticity",
    "pulse_to_json",
    "pulse_from_json",
]


@runtime_checkable
class PulseProgram(Protocol):
    duration: float

    def rabi(self, t): ...

    def detuning(self, t): ...

    def rabi_dot(self, t): ...

    def detuning_dot(self, t): ...


def _scalarize(x, t):
    return float(x) if np.ndim(t) == 0 else x


@dataclass(frozen=True)
class APPulse:
    """Swept passage pulse. All fields in rad/s except t_p in s.

    delta_max >= 0 fixes the sweep direction: upward through resonance.
    """

    omega_max: float
    delta_max: float
    delta_c: float
    t_p: float

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        if self.delta_max < 0:
            raise ValueError("delta_max must be non-negative")
        if self.t_p <= 0:
            raise ValueError("t_p must be positive")

    @classmethod
    def from_khz(cls, omega_max_khz, delta_max_khz, delta_c_khz, t_p_ms):
        return cls(
            omega_max=khz_to_rad_per_s(omega_max_khz),
            delta_max=khz_to_rad_per_s(delta_max_khz),
            delta_c=khz_to_rad_per_s(delta_c_khz),
            t_p=ms_to_s(t_p_ms),
        )

    @property
    def duration(self) -> float:
        return self.t_p

    def _phase(self, t):
        return np.pi * np.clip(t, 0.0, self.t_p) / self.t_p

    def rabi(self, t):
        return _scalarize(self.omega_max * np.sin(self._phase(t)) ** 2, t)

    def detuning(self, t):
        phi = self._phase(t)
        s2 = np.sin(phi) ** 2
        # roundoff can push sin^4 past 1 at the midpoint
        radicand = np.maximum(1.0 - s2 * s2, 0.0)
        sign = np.where(np.clip(t, 0.0, self.t_p) >= 0.5 * self.t_p, 1.0, -1.0)
        return _scalarize(self.delta_c + sign * self.delta_max * np.sqrt(radicand), t)

    def rabi_dot(self, t):
        phi = self._phase(t)
        return _scalarize(self.omega_max * (np.pi / self.t_p) * np.sin(2.0 * phi), t)

    def detuning_dot(self, t):
        # d/dt of the sweep simplifies to the same expression on both
        # halves: 2 delta_max (pi/t_p) sin^3(phi) / sqrt(1 + sin^2(phi)).
        phi = self._phase(t)
        s = np.sin(phi)
        return _scalarize(
            2.0 * self.delta_max * (np.pi / self.t_p) * s**3 / np.sqrt(1.0 + s * s), t
        )


@dataclass(frozen=True)
class RectPulse:
    """Constant drive: omega and delta in rad/s, t_p in s (t_p > 0)."""

    omega: float
    delta: float
    t_p: float

    def __post_init__(self):
        if self.t_p <= 0:
            raise ValueError("t_p must be positive")

    @classmethod
    def from_khz(cls, omega_khz, delta_khz, t_p_ms):
        return cls(khz_to_rad_per_s(omega_khz), khz_to_rad_per_s(delta_khz), ms_to_s(t_p_ms))

    @property
    def duration(self) -> float:
        return self.t_p

    def rabi(self, t):
        return _scalarize(np.full(np.shape(t), float(self.omega)), t)

    def detuning(self, t):
        return _scalarize(np.full(np.shape(t), float(self.delta)), t)

    def rabi_dot(self, t):
        return _scalarize(np.zeros(np.shape(t)), t)

    def detuning_dot(self, t):
        return _scalarize(np.zeros(np.shape(t)), t)


class TabulatedPulse:
    """Sampled pulse, linearly interpolated between the given knots.

    times must start at 0 and increase strictly.  Derivatives come from
    central differences with step duration*1e-6 (one-sided at the ends).
    """

    def __init__(self, times, omegas, deltas):
        times = np.asarray(times, dtype=float)
        omegas = np.asarray(omegas, dtype=float)
        deltas = np.asarray(deltas, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise ValueError("need at least two samples")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        if omegas.shape != times.shape or deltas.shape != times.shape:
            raise ValueError("omegas and deltas must match times in shape")
        if not (np.all(np.isfinite(omegas)) and np.all(np.isfinite(deltas))):
            raise ValueError("samples must be finite")
        self.times = times
        self.omegas = omegas
        self.deltas = deltas
        self.duration = float(times[-1])

    def rabi(self, t):
        return _scalarize(np.interp(np.clip(t, 0.0, self.duration), self.times, self.omegas), t)

    def detuning(self, t):
        return _scalarize(np.interp(np.clip(t, 0.0, self.duration), self.times, self.deltas), t)

    def _diff(self, values, t):
        h = self.duration * 1e-6
        hi = np.minimum(np.clip(t, 0.0, self.duration) + h, self.duration)
        lo = np.maximum(np.clip(t, 0.0, self.duration) - h, 0.0)
        f = lambda x: np.interp(x, self.times, values)
        return (f(hi) - f(lo)) / (hi - lo)

    def rabi_dot(self, t):
        return _scalarize(self._diff(self.omegas, t), t)

    def detuning_dot(self, t):
        return _scalarize(self._diff(self.deltas, t), t)


class _TimeMirroredPulse:
    """base pulse run backwards in time."""

    def __init__(self, base: PulseProgram):
        self.base = base
        self.duration = base.duration

    def _s(self, t):
        return self.duration - np.clip(t, 0.0, self.duration)

    def rabi(self, t):
        return self.base.rabi(self._s(t))

    def detuning(self, t):
        return self.base.detuning(self._s(t))

    def rabi_dot(self, t):
        return -self.base.rabi_dot(self._s(t))

    def detuning_dot(self, t):
        return -self.base.detuning_dot(self._s(t))


class _InvertedPulse:
    """Exact inverse program: time-mirrored with omega and delta negated.

    Evolving under base then under inverted(base) returns any state to
    its start (for gamma_2 = 0); negating the detuning alone does not.
    """

    def __init__(self, base: PulseProgram):
        self.base = base
        self.duration = base.duration

    def _s(self, t):
        return self.duration - np.clip(t, 0.0, self.duration)

    def rabi(self, t):
        return -self.base.rabi(self._s(t))

    def detuning(self, t):
        return -self.base.detuning(self._s(t))

    def rabi_dot(self, t):
        return self.base.rabi_dot(self._s(t))

    def detuning_dot(self, t):
        return self.base.detuning_dot(self._s(t))


def time_mirrored(pulse: PulseProgram) -> PulseProgram:
    return _TimeMirroredPulse(pulse)


def inverted(pulse: PulseProgram) -> PulseProgram:
    return _InvertedPulse(pulse)


def _check_t_range(t, duration):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > duration):
        raise ValueError(f"t outside [0, {duration}]")


def ap_rabi(t, pulse: PulseProgram):
    """Rabi frequency at time t (rad/s); t must lie in [0, duration]."""
    _check_t_range(t, pulse.duration)
    return pulse.rabi(t)


def ap_detuning(t, pulse: PulseProgram):
    """Detuning at time t (rad/s); t must lie in [0, duration]."""
    _check_t_range(t, pulse.duration)
    return pulse.detuning(t)


def adiabaticity(t, pulse: PulseProgram):
    """Local adiabaticity parameter, dimensionless.

        |detuning_dot * rabi - detuning * rabi_dot| / (2 (rabi^2 + detuning^2)^(3/2))

    Small values mean adiabatic following.  Where rabi and detuning
    vanish simultaneously the parameter is undefined and +inf is
    returned.
    """
    _check_t_range(t, pulse.duration)
    om = np.asarray(pulse.rabi(t), dtype=float)
    de = np.asarray(pulse.detuning(t), dtype=float)
    om_d = np.asarray(pulse.rabi_dot(t), dtype=float)
    de_d = np.asarray(pulse.detuning_dot(t), dtype=float)
    gap2 = om * om + de * de
    num = np.abs(de_d * om - de * om_d)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / (2.0 * gap2**1.5)
    val = np.where(gap2 == 0.0, np.inf, val)
    return _scalarize(val, t)


def max_adiabaticity(pulse: PulseProgram, grid_points: int = 4096) -> float:
    """Max adiabaticity over a uniform interior grid (endpoints excluded;
    the passage pulse has rabi = 0 there)."""
    if grid_points < 1:
        raise ValueError("grid_points must be >= 1")
    grid = np.linspace(0.0, pulse.duration, grid_points + 2)[1:-1]
    return float(np.max(adiabaticity(grid, pulse)))


def pulse_to_json(pulse: PulseProgram) -> dict:
    """Serialize a pulse to a JSON-ready dict (frequencies kHz, times ms)."""
    if isinstance(pulse, APPulse):
        return {
            "kind": "ap",
            "omega_max_khz": rad_per_s_to_khz(pulse.omega_max),
            "delta_max_khz": rad_per_s_to_khz(pulse.delta_max),
            "delta_c_khz": rad_per_s_to_khz(pulse.delta_c),
            "t_p_ms": s_to_ms(pulse.t_p),
        }
    if isinstance(pulse, RectPulse):
        return {
            "kind": "rect",
            "omega_khz": rad_per_s_to_khz(pulse.omega),
            "delta_khz": rad_per_s_to_khz(pulse.delta),
            "t_p_ms": s_to_ms(pulse.t_p),
        }
    if isinstance(pulse, TabulatedPulse):
        return {
            "kind": "tabulated",
            "t_ms": [s_to_ms(t) for t in pulse.times],
            "omega_khz": [rad_per_s_to_khz(x) for x in pulse.omegas],
            "delta_khz": [rad_per_s_to_khz(x) for x in pulse.deltas],
        }
    raise TypeError(f"cannot serialize pulse of type {type(pulse).__name__}")


_JSON_KEYS = {
    "ap": {"kind", "omega_max_khz", "delta_max_khz", "delta_c_khz", "t_p_ms"},
    "rect": {"kind", "omega_khz", "delta_khz", "t_p_ms"},
    "tabulated": {"kind", "t_ms", "omega_khz", "delta_khz"},
}


def pulse_from_json(d: dict) -> PulseProgram:
    """Inverse of pulse_to_json. Rejects unknown kinds and keys."""
    kind = d.get("kind")
    if kind not in _JSON_KEYS:
        raise ValueError(f"unknown pulse kind: {kind!r}")
    extra = set(d) - _JSON_KEYS[kind]
    missing = _JSON_KEYS[kind] - set(d)
    if extra or missing:
        raise ValueError(f"bad pulse keys: extra={sorted(extra)} missing={sorted(missing)}")
    if kind == "ap":
        return APPulse.from_khz(
            d["omega_max_khz"], d["delta_max_khz"], d["delta_c_khz"], d["t_p_ms"]
        )
    if kind == "rect":
        return RectPulse.from_khz(d["omega_khz"], d["delta_khz"], d["t_p_ms"])
    return TabulatedPulse(
        [ms_to_s(t) for t in d["t_ms"]],
        [khz_to_rad_per_s(x) for x in d["omega_khz"]],
        [khz_to_rad_per_s(x) for x in d["delta_khz"]],
    )
