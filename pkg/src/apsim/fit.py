"""Least-squares extraction of thermal parameters from spectra.

The broadened spectrum depends on the pulse only through the bare transfer
curve P1(delta_c), which is independent of the thermal parameters.  The
fitter therefore batch-integrates P1 once onto a cached grid and re-runs
only the (cheap, vectorized) convolution per optimizer step; that single
reuse is what makes fitting interactive instead of an overnight job.

Parameter invariants (delta_th > 0, delta_ls_max < 0, 0 <= p_max <= 1) are
enforced by optimizing the transformed variables

    s = log(delta_th),  q = log(-delta_ls_max),  r = logit(p_max)

so the damped least-squares runs unconstrained.  Convergence means the
optimizer's relative step dropped below 1e-6; hitting the evaluation budget
first returns converged=False with the best parameters found.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import json
import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit, logit

from .errors import FitDataError
from .scan import ScanResult
from .thermal import SpectrumCache, ThermalModel, convolve_on_grid
from .units import khz_to_rad_per_s

__all__ = ["FitResult", "fit_spectrum", "chi_square"]

# evaluation budget: ~500 damped least-squares iterations at 4 model
# evaluations each (step + forward-difference Jacobian in 3 parameters)
_MAX_EVALS = 2000


@dataclass(frozen=True)
class FitResult:
    """Outcome of one spectrum fit.

    params       : best thermal parameters found
    residual_rms : root-mean-square residual at params
    n_iterations : optimizer work counter (model evaluations; a damped
                   step costs one evaluation plus three for the Jacobian)
    converged    : True when the relative parameter step fell below 1e-6
    """

    params: ThermalModel
    residual_rms: float
    n_iterations: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.to_json_dict(),
            "residual_rms": self.residual_rms,
            "n_iterations": self.n_iterations,
            "converged": self.converged,
        }

    def to_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="ascii", newline="") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


def _abscissa_rad_per_s(data: ScanResult) -> np.ndarray:
    if data.unit == "khz":
        return khz_to_rad_per_s(data.abscissa)
    if data.unit == "rad/s":
        return np.asarray(data.abscissa, dtype=float)
    raise FitDataError(
        f"fit needs a detuning abscissa in 'khz' or 'rad/s', got {data.unit!r}"
    )


def fit_spectrum(
    data: ScanResult,
    pulse,
    initial_guess: ThermalModel,
    *,
    renormalize: bool = False,
    cache_step: float | None = None,
    damping=None,
    config=None,
) -> FitResult:
    """Fit the broadened-spectrum model to a measured detuning scan.

    data must contain at least 10 samples spanning both spectrum edges;
    constant data is rejected.  The model curve is the cached bare
    spectrum convolved with the light-shift distribution of the trial
    parameters (fixed-grid rule, matching convolve to ~1e-7).  Residuals
    are unweighted; see chi_square for stderr-weighted comparison.
    """
    deltas = _abscissa_rad_per_s(data)
    if len(data) < 10:
        raise FitDataError(f"need >= 10 samples to fit, got {len(data)}")
    if np.ptp(data.p1) == 0.0:
        raise FitDataError("data is constant; nothing to fit")

    guess = initial_guess
    # cache footprint: widest shift support the optimizer may explore,
    # sized from the guess (clamped extrapolation beyond is flat)
    margin = 2.0 * abs(guess.delta_ls_max) + 20.0 * guess.delta_th
    step = guess.delta_th / 20.0 if cache_step is None else cache_step
    cache = SpectrumCache.from_pulse(
        pulse,
        float(deltas.min()) - margin,
        float(deltas.max()),
        step,
        damping,
        config,
    )

    y = np.asarray(data.p1, dtype=float)

    def unpack(x) -> ThermalModel:
        s, q, r = x
        return ThermalModel(
            delta_ls_max=-np.exp(q), delta_th=np.exp(s), p_max=float(expit(r))
        )

    def residuals(x):
        m = unpack(x)
        return convolve_on_grid(cache, deltas, m, renormalize=renormalize) - y

    # a p_max start too close to 0 or 1 sits in the flat tail of the
    # sigmoid (vanishing gradient) and can strand the fit on the nearest
    # boundary ridge; starting inside [0.02, 0.98] costs nothing and keeps
    # the Jacobian column alive
    x0 = np.array(
        [
            np.log(guess.delta_th),
            np.log(-guess.delta_ls_max),
            logit(np.clip(guess.p_max, 0.02, 0.98)),
        ]
    )
    res = least_squares(
        residuals, x0, method="lm", xtol=1e-6, max_nfev=_MAX_EVALS
    )
    best = unpack(res.x)
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return FitResult(
        params=best,
        residual_rms=rms,
        n_iterations=int(res.nfev),
        converged=bool(res.status > 0),
    )


def chi_square(data: ScanResult, model_curve) -> float:
    """Sum of squared residuals between data and a model curve.

    model_curve takes abscissa values in the data's native unit.  Samples
    with a finite positive stderr contribute ((y - f)/stderr)^2; all others
    contribute the unweighted square.
    """
    f = np.asarray(model_curve(data.abscissa), dtype=float)
    r = data.p1 - f
    if data.stderr is None:
        return float(np.sum(r * r))
    w = np.asarray(data.stderr, dtype=float)
    good = np.isfinite(w) & (w > 0)
    scaled = np.where(good, r / np.where(good, w, 1.0), r)
    return float(np.sum(scaled * scaled))
