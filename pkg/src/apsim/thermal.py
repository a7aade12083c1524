"""Thermal light-shift broadening of transfer spectra.

In a red-detuned optical trap the differential light shift of the
transition depends on the atom's motional energy.  For a thermal
ensemble in a 3D harmonic trap the shift delta_ls is distributed as

    p_B(delta_ls) = (delta_ls - delta_ls_max)^2 / (2 delta_th^3)
                    * exp(-(delta_ls - delta_ls_max) / delta_th)

for delta_ls >= delta_ls_max and zero below, i.e. a Gamma(k=3) density
with scale delta_th, shifted so its lower edge sits at the maximal
(coldest-atom) shift delta_ls_max <= 0.  Mean delta_ls_max + 3 delta_th,
mode at delta_ls_max + 2 delta_th.

An observed spectrum is the bare one averaged over the shift,

    P1_obs(delta_c) = p_max * integral_{delta_ls_max}^{0}
                      p_B(delta_ls) P1(delta_c + delta_ls) d delta_ls.

The integration range follows the physical support (shifts between the
maximal value and zero); the distribution mass above zero, about
exp(-r)(1 + r + r^2/2) with r = |delta_ls_max| / delta_th, is NOT put
back by default.  Pass renormalize=True to divide it out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline
from scipy.special import gammainc

from .errors import QuadratureError
from .units import khz_to_rad_per_s, rad_per_s_to_khz

__all__ = [
    "ThermalModel",
    "boltzmann_pdf",
    "truncated_mass",
    "sample_light_shift",
    "convolve",
    "convolve_on_grid",
    "broadened_spectrum",
    "SpectrumCache",
]

# the Gamma(3) tail beyond y = 200 carries ~1e-81 of mass
_Y_CAP = 200.0


@dataclass(frozen=True)
class ThermalModel:
    """delta_ls_max (<= 0) and delta_th (> 0) in rad/s, p_max in [0, 1]."""

    delta_ls_max: float
    delta_th: float
    p_max: float

    def __post_init__(self):
        if self.delta_ls_max > 0:
            raise ValueError("delta_ls_max must be <= 0")
        if self.delta_th <= 0:
            raise ValueError("delta_th must be positive")
        if not 0.0 <= self.p_max <= 1.0:
            raise ValueError("p_max must lie in [0, 1]")

    @classmethod
    def from_khz(cls, delta_ls_max_khz, delta_th_khz, p_max):
        return cls(khz_to_rad_per_s(delta_ls_max_khz), khz_to_rad_per_s(delta_th_khz), p_max)

    def to_json_dict(self) -> dict:
        return {
            "delta_ls_max_khz": rad_per_s_to_khz(self.delta_ls_max),
            "delta_th_khz": rad_per_s_to_khz(self.delta_th),
            "p_max": self.p_max,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ThermalModel":
        keys = {"delta_ls_max_khz", "delta_th_khz", "p_max"}
        if set(d) != keys:
            raise ValueError(f"thermal model needs exactly the keys {sorted(keys)}")
        return cls.from_khz(d["delta_ls_max_khz"], d["delta_th_khz"], d["p_max"])


def boltzmann_pdf(delta_ls, m: ThermalModel):
    """Probability density of the light shift (per rad/s)."""
    x = np.asarray(delta_ls, dtype=float) - m.delta_ls_max
    th = m.delta_th
    with np.errstate(over="ignore"):
        val = np.where(x >= 0.0, x * x / (2.0 * th**3) * np.exp(-x / th), 0.0)
    return float(val) if np.ndim(delta_ls) == 0 else val


def truncated_mass(m: ThermalModel) -> float:
    """Mass of p_B between delta_ls_max and 0 (the physical window)."""
    return float(gammainc(3.0, -m.delta_ls_max / m.delta_th))


def sample_light_shift(m: ThermalModel, rng_seed, n: int | None = None):
    """Draw light shifts (rad/s) from p_B; deterministic for a given seed.

    Returns a float for n=None, else an ndarray of shape (n,).
    """
    rng = np.random.default_rng(rng_seed)
    draws = m.delta_ls_max + rng.gamma(3.0, m.delta_th, size=n)
    return float(draws) if n is None else draws


def convolve(spectrum, m: ThermalModel, *, renormalize: bool = False, abs_tol: float = 1e-6):
    """Broaden a bare spectrum with the light-shift distribution.

    Parameters
    ----------
    spectrum : callable
        delta_c (rad/s) -> P1; must accept scalars (vectorized callables
        such as SpectrumCache work too).
    m : ThermalModel
    renormalize : bool
        Divide by the truncated mass so a flat unit spectrum maps to
        p_max exactly.  Off by default, see the module docstring.
    abs_tol : float
        Absolute tolerance of the adaptive quadrature; failure to reach
        it raises QuadratureError carrying the estimate.

    Returns
    -------
    callable, delta_c (rad/s, scalar or array) -> broadened probability.
    """
    r = -m.delta_ls_max / m.delta_th
    upper = min(r, _Y_CAP)
    hints = [p for p in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0) if p < upper]
    scale = m.p_max / truncated_mass(m) if renormalize else m.p_max

    def one(delta_c: float) -> float:
        def integrand(y):
            # Gamma kernel in units of delta_th: y^2 e^-y / 2
            shift = m.delta_ls_max + y * m.delta_th
            return 0.5 * y * y * np.exp(-y) * float(spectrum(delta_c + shift))

        val, err = quad(integrand, 0.0, upper, epsabs=0.1 * abs_tol, epsrel=0.0,
                        limit=200, points=hints)
        if err > abs_tol:
            raise QuadratureError(
                f"convolution quadrature reached {err:.2e} > {abs_tol:.2e}",
                estimate=scale * val,
                error_bound=scale * err,
            )
        return scale * val

    def broadened(delta_c):
        if np.ndim(delta_c) == 0:
            return one(float(delta_c))
        return np.array([one(float(d)) for d in np.asarray(delta_c, dtype=float)])

    return broadened


def convolve_on_grid(
    spectrum,
    delta_c_values,
    m: ThermalModel,
    *,
    renormalize: bool = False,
    rel_step: float = 0.05,
):
    """Vectorized fixed-grid counterpart of convolve (composite Simpson).

    The shift variable is sampled at rel_step * delta_th; all spectrum
    evaluations happen in one vectorized call, which makes this the
    right inner loop for fitting.  Agreement with the adaptive path is
    covered by tests.
    """
    deltas = np.atleast_1d(np.asarray(delta_c_values, dtype=float))
    r = -m.delta_ls_max / m.delta_th
    n_steps = int(np.ceil(r / rel_step))
    n_pts = 2 * max(n_steps // 2, 32) + 1  # odd count for Simpson
    y = np.linspace(0.0, min(r, _Y_CAP), n_pts)
    kernel = 0.5 * y * y * np.exp(-y)
    shift = m.delta_ls_max + y * m.delta_th
    vals = np.asarray(spectrum((deltas[:, None] + shift[None, :]).ravel()))
    vals = vals.reshape(len(deltas), n_pts)
    out = simpson(kernel[None, :] * vals, x=y, axis=1)
    scale = m.p_max / truncated_mass(m) if renormalize else m.p_max
    out = scale * out
    return out if np.ndim(delta_c_values) else float(out[0])


def broadened_spectrum(
    pulse,
    m: ThermalModel,
    delta_c_values,
    *,
    renormalize: bool = False,
    method: str = "quad",
    abs_tol: float = 1e-6,
    cache_step: float | None = None,
    damping=None,
    config=None,
):
    """Convolved transfer probability at the given detunings (rad/s).

    One-stop composition used by the scan front ends: batch-integrates the
    bare spectrum into a SpectrumCache sized for the grid plus the shift
    support, then convolves.  method="quad" is the error-controlled
    adaptive path; method="grid" the fixed Simpson rule.
    """
    deltas = np.asarray(delta_c_values, dtype=float)
    cache = SpectrumCache.for_scan(
        pulse, float(np.min(deltas)), float(np.max(deltas)), m,
        step=cache_step, damping=damping, config=config,
    )
    if method == "quad":
        return convolve(cache, m, renormalize=renormalize, abs_tol=abs_tol)(
            delta_c_values
        )
    if method == "grid":
        return convolve_on_grid(cache, delta_c_values, m, renormalize=renormalize)
    raise ValueError(f"unknown convolution method: {method!r}")


class SpectrumCache:
    """Bare transfer spectrum precomputed on a uniform detuning grid.

    Full Bloch integration per point is far too slow inside quadratures
    and fit loops, so the spectrum is evaluated once on a grid (default
    step delta_th / 20) and interpolated with a cubic spline.  Calls
    outside the domain clamp to the edge values; build the cache wide
    enough to cover every shifted evaluation.
    """

    def __init__(self, deltas, p1):
        deltas = np.asarray(deltas, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        if deltas.ndim != 1 or len(deltas) < 4:
            raise ValueError("need at least 4 grid points")
        if np.any(np.diff(deltas) <= 0):
            raise ValueError("grid must increase strictly")
        self.deltas = deltas
        self.p1 = p1
        self._spline = CubicSpline(deltas, p1)
        self.lo = float(deltas[0])
        self.hi = float(deltas[-1])

    @classmethod
    def from_pulse(
        cls,
        pulse,
        delta_lo: float,
        delta_hi: float,
        step: float,
        damping=None,
        config=None,
    ) -> "SpectrumCache":
        """Batch-integrate the pulse over [delta_lo, delta_hi] (rad/s)."""
        from .bloch import detuning_spectrum

        if not delta_hi > delta_lo:
            raise ValueError("need delta_hi > delta_lo")
        if not step > 0:
            raise ValueError("step must be positive")
        n = int(np.ceil((delta_hi - delta_lo) / step)) + 1
        grid = np.linspace(delta_lo, delta_hi, max(n, 4))
        p1 = detuning_spectrum(pulse, grid, damping, config)
        return cls(grid, p1)

    @classmethod
    def for_scan(cls, pulse, scan_lo, scan_hi, m: ThermalModel, step=None,
                 damping=None, config=None) -> "SpectrumCache":
        """Cache sized for broadened evaluation on [scan_lo, scan_hi]."""
        step = m.delta_th / 20.0 if step is None else step
        return cls.from_pulse(pulse, scan_lo + m.delta_ls_max, scan_hi, step,
                              damping, config)

    def __call__(self, delta_c):
        x = np.clip(delta_c, self.lo, self.hi)
        out = self._spline(x)
        return float(out) if np.ndim(delta_c) == 0 else out
