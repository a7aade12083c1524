"""Transport-induced adiabatic passages.

Moving an atom a distance d along the gradient while a constant microwave
drive is on sweeps its detuning through resonance: the transport itself is
the frequency chirp.  For a smooth move with constant acceleration a =
4 d / tau^2 during the first half and the mirrored deceleration during the
second, the detuning seen by the atom is piecewise parabolic in time
(quadratic ramp up to tau/2, mirrored approach to the final value).  The
total sweep is d_x omega_at * d, independent of duration; how adiabatic the
single crossing is depends on tau.

The initial detuning delta_r is random across repetitions because the atom
starts at a random position within the loading region, so observed transfer
probabilities are ensemble averages.  All members share the pulse shape and
differ by a constant detuning offset, which lets one stacked integration
evolve the whole ensemble.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .addressing import TrapGeometry
from .bloch import GROUND, BlochState, evolve_offsets
from .errors import ConfigError
from .pulses import _scalarize
from .scan import TRANSPORT_UNIT, ScanResult
from .units import khz_to_rad_per_s

__all__ = [
    "TransportPlan",
    "InteractionWidth",
    "TransportPulse",
    "transport_detuning",
    "interaction_width",
    "dressed_state",
    "dressed_projection",
    "TransportResult",
    "transport_transfer",
    "transport_curve",
    "landau_zener_oracle",
    "LinearSweepPulse",
]


@dataclass(frozen=True)
class TransportPlan:
    """Parameters of one transport move under constant drive.

    d          : transport distance in micrometers
    tau        : transport duration in seconds
    omega_r    : constant Rabi frequency in rad/s
    delta_0_nu : central initial detuning in kHz
    spread_nu  : full width of the initial-detuning spread in kHz
    g          : trap geometry providing the frequency gradient
    """

    d: float
    tau: float
    omega_r: float
    delta_0_nu: float
    spread_nu: float
    g: TrapGeometry

    def __post_init__(self) -> None:
        if not self.d > 0:
            raise ConfigError(f"d must be positive, got {self.d}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not self.omega_r > 0:
            raise ConfigError(f"omega_r must be positive, got {self.omega_r}")
        if not self.spread_nu >= 0:
            raise ConfigError(f"spread_nu must be >= 0, got {self.spread_nu}")

    def grad(self) -> float:
        """Frequency gradient in rad/s per micrometer."""
        return khz_to_rad_per_s(self.g.grad_nu)


@dataclass(frozen=True)
class InteractionWidth:
    """Spatial width (um) of the region where the drive couples strongly."""

    l: float

    def __post_init__(self) -> None:
        if not self.l > 0:
            raise ConfigError(f"l must be positive, got {self.l}")

    def __float__(self) -> float:
        return self.l

    @classmethod
    def from_plan(cls, plan: TransportPlan) -> "InteractionWidth":
        return cls(interaction_width(plan))


def interaction_width(plan: TransportPlan) -> float:
    """Width 2 omega_r / (d_x omega_at) in micrometers."""
    return 2.0 * plan.omega_r / plan.grad()


def _sweep(t, plan: TransportPlan):
    """Detuning accumulated by time t (no range check, vectorized)."""
    a = 4.0 * plan.d / plan.tau**2
    t = np.asarray(t, dtype=float)
    first = 0.5 * t * t
    second = plan.tau**2 / 4.0 - 0.5 * (plan.tau - t) ** 2
    return a * plan.grad() * np.where(t <= plan.tau / 2.0, first, second)


def _sweep_rate(t, plan: TransportPlan):
    a = 4.0 * plan.d / plan.tau**2
    t = np.asarray(t, dtype=float)
    return a * plan.grad() * np.where(t <= plan.tau / 2.0, t, plan.tau - t)


def transport_detuning(t, delta_r: float, plan: TransportPlan):
    """Detuning (rad/s) at time t for an atom starting at detuning delta_r.

    Accepts scalars or arrays; t must lie in [0, tau].
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > plan.tau):
        raise ValueError(f"t outside [0, {plan.tau}]")
    return _scalarize(delta_r + _sweep(t_arr, plan), t)


@dataclass(frozen=True)
class TransportPulse:
    """Constant drive plus the transport chirp, as a pulse program.

    delta_r is the member-specific initial detuning in rad/s; ensemble
    evolution keeps delta_r = 0 here and feeds the draws as offsets.
    Times outside [0, tau] clamp to the endpoints like every other pulse.
    """

    plan: TransportPlan
    delta_r: float = 0.0

    @property
    def duration(self) -> float:
        return self.plan.tau

    def _clamp(self, t):
        return np.clip(np.asarray(t, dtype=float), 0.0, self.plan.tau)

    def rabi(self, t):
        return _scalarize(np.full(np.shape(self._clamp(t)), self.plan.omega_r), t)

    def rabi_dot(self, t):
        return _scalarize(np.zeros(np.shape(self._clamp(t))), t)

    def detuning(self, t):
        return _scalarize(self.delta_r + _sweep(self._clamp(t), self.plan), t)

    def detuning_dot(self, t):
        return _scalarize(_sweep_rate(self._clamp(t), self.plan), t)


@dataclass(frozen=True)
class _RampedTransportPulse:
    """Transport pulse with a sin^2 drive switch-on of length t_ramp
    prepended (detuning held at its initial value during the ramp)."""

    plan: TransportPlan
    t_ramp: float
    delta_r: float = 0.0

    @property
    def duration(self) -> float:
        return self.plan.tau + self.t_ramp

    def rabi(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        env = np.where(
            tc < self.t_ramp,
            np.sin(np.pi * tc / (2.0 * self.t_ramp)) ** 2,
            1.0,
        )
        return _scalarize(self.plan.omega_r * env, t)

    def rabi_dot(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        rate = np.where(
            tc < self.t_ramp,
            np.pi / (2.0 * self.t_ramp) * np.sin(np.pi * tc / self.t_ramp),
            0.0,
        )
        return _scalarize(self.plan.omega_r * rate, t)

    def detuning(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        tt = np.clip(tc - self.t_ramp, 0.0, self.plan.tau)
        return _scalarize(self.delta_r + _sweep(tt, self.plan), t)

    def detuning_dot(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        tt = tc - self.t_ramp
        out = np.where(tt >= 0.0, _sweep_rate(np.maximum(tt, 0.0), self.plan), 0.0)
        return _scalarize(out, t)


def dressed_state(omega: float, delta: float) -> BlochState:
    """Instantaneous dressed ground state for drive (omega, delta).

    This is the Bloch vector aligned with the torque axis (omega, 0, delta):
    the state an adiabatic switch-on of the drive carries |0> into.  With
    the drive off it reduces to the bare ground state.
    """
    norm = math.hypot(omega, delta)
    if norm == 0.0:
        return GROUND
    return BlochState(omega / norm, 0.0, delta / norm)


def dressed_projection(states, omega, delta):
    """Population in the dressed upper state, (1 + r . T_hat)/2.

    states may be a BlochState or an (..., 3) array; omega/delta scalars or
    arrays broadcasting against the leading axes.  With the drive off this
    reduces to the bare population (1 + w)/2.
    """
    arr = states.as_array() if isinstance(states, BlochState) else np.asarray(states, dtype=float)
    omega = np.asarray(omega, dtype=float)
    delta = np.asarray(delta, dtype=float)
    norm = np.hypot(omega, delta)
    # drive fully off: torque axis degenerates to +z (bare measurement)
    safe = np.where(norm == 0.0, 1.0, norm)
    tu = np.where(norm == 0.0, 0.0, omega / safe)
    tw = np.where(norm == 0.0, 1.0, delta / safe)
    proj = arr[..., 0] * tu + arr[..., 2] * tw
    out = 0.5 * (1.0 + proj)
    return float(out) if out.ndim == 0 else out


def _draw_delta_r(plan: TransportPlan, n: int, rng_seed: int, distribution: str):
    """Member detunings (rad/s) from per-member seeded substreams.

    Member i always consumes the substream (rng_seed, spawn_key=(i,)), so
    draws are independent of evaluation order and identical across scan
    points sharing a seed.
    """
    delta_0 = khz_to_rad_per_s(plan.delta_0_nu)
    spread = khz_to_rad_per_s(plan.spread_nu)
    out = np.empty(n)
    for i in range(n):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=rng_seed, spawn_key=(i,))
        )
        if distribution == "uniform":
            out[i] = delta_0 + spread * (rng.uniform() - 0.5)
        elif distribution == "gaussian":
            # variance-matched to the uniform option
            out[i] = delta_0 + spread / math.sqrt(12.0) * rng.standard_normal()
        else:
            raise ConfigError(f"unknown distribution: {distribution!r}")
    return out


@dataclass(frozen=True)
class TransportResult:
    """Ensemble-averaged transfer with sampling error and member values."""

    p1: float
    stderr: float
    members: np.ndarray


def transport_transfer(
    plan: TransportPlan,
    damping=None,
    n_ensemble: int = 32,
    rng_seed: int = 0,
    *,
    distribution: str = "uniform",
    switch_on: str = "dressed",
    ramp_time: float = 1e-3,
    readout: str = "dressed",
    config=None,
) -> TransportResult:
    """Mean transfer probability over the initial-detuning ensemble.

    switch_on "dressed" starts each member in the instantaneous dressed
    ground state (ideal adiabatic switch-on); "ramp" starts in the bare
    ground state and prepends a sin^2 drive ramp of length ramp_time.
    readout "dressed" projects onto the final dressed state (ideal
    adiabatic switch-off); "bare" reads (1 + w)/2 directly.
    """
    if n_ensemble < 1:
        raise ConfigError(f"n_ensemble must be >= 1, got {n_ensemble}")
    draws = _draw_delta_r(plan, n_ensemble, rng_seed, distribution)

    if switch_on == "dressed":
        pulse = TransportPulse(plan)
        states0 = np.stack(
            [dressed_state(plan.omega_r, d).as_array() for d in draws]
        )
    elif switch_on == "ramp":
        if not ramp_time > 0:
            raise ConfigError(f"ramp_time must be positive, got {ramp_time}")
        pulse = _RampedTransportPulse(plan, ramp_time)
        states0 = np.tile(GROUND.as_array(), (n_ensemble, 1))
    else:
        raise ConfigError(f"unknown switch_on mode: {switch_on!r}")

    final = evolve_offsets(pulse, draws, initial_states=states0,
                           damping=damping, config=config)

    delta_end = draws + _sweep(plan.tau, plan)
    if readout == "dressed":
        p1 = dressed_projection(final, plan.omega_r, delta_end)
    elif readout == "bare":
        p1 = 0.5 * (1.0 + final[:, 2])
    else:
        raise ConfigError(f"unknown readout mode: {readout!r}")

    mean = float(np.mean(p1))
    stderr = (
        0.0
        if n_ensemble == 1
        else float(np.std(p1, ddof=1) / math.sqrt(n_ensemble))
    )
    return TransportResult(mean, stderr, np.asarray(p1, dtype=float))


def transport_curve(
    plan: TransportPlan,
    inv_tau_per_ms,
    damping=None,
    n_ensemble: int = 32,
    rng_seed: int = 0,
    *,
    threads: int = 1,
    **kwargs,
) -> ScanResult:
    """Transfer versus transport speed 1/tau (ms^-1).

    Points are independent; `threads` bounds concurrent evaluation and the
    output is assembled in grid order either way.  All points share the
    same per-member detuning draws (same rng_seed), so the curve varies
    only through the dynamics.
    """
    grid = np.atleast_1d(np.asarray(inv_tau_per_ms, dtype=float))
    if grid.size == 0:
        raise ConfigError("inv_tau grid must be non-empty")
    if np.any(grid <= 0):
        raise ConfigError("inv_tau values must be positive")

    def one(inv_tau: float) -> TransportResult:
        p = replace(plan, tau=1e-3 / inv_tau)
        return transport_transfer(
            p, damping, n_ensemble, rng_seed, **kwargs
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(v) for v in grid]
    return ScanResult(
        grid,
        np.array([r.p1 for r in results]),
        np.array([r.stderr for r in results]),
        TRANSPORT_UNIT,
    )


def landau_zener_oracle(omega: float, sweep_rate: float) -> float:
    """Transfer probability 1 - exp(-pi omega^2 / (2 rate)) for an ideal
    linear crossing at constant coupling; analytic reference for the
    transport dynamics in the constant-velocity limit."""
    if not sweep_rate > 0:
        raise ValueError(f"sweep_rate must be positive, got {sweep_rate}")
    return 1.0 - math.exp(-math.pi * omega**2 / (2.0 * sweep_rate))


@dataclass(frozen=True)
class LinearSweepPulse:
    """Constant drive with detuning rate * (t - duration/2).

    The idealized constant-velocity crossing behind the analytic oracle;
    choose duration large enough that the edges are far off resonance
    compared to both omega and sqrt(rate).
    """

    omega: float
    rate: float
    duration: float

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if not self.rate > 0:
            raise ConfigError(f"rate must be positive, got {self.rate}")
        if not self.duration > 0:
            raise ConfigError(f"duration must be positive, got {self.duration}")

    def _clamp(self, t):
        return np.clip(np.asarray(t, dtype=float), 0.0, self.duration)

    def rabi(self, t):
        return _scalarize(np.full(np.shape(self._clamp(t)), self.omega), t)

    def rabi_dot(self, t):
        return _scalarize(np.zeros(np.shape(self._clamp(t))), t)

    def detuning(self, t):
        return _scalarize(self.rate * (self._clamp(t) - self.duration / 2.0), t)

    def detuning_dot(self, t):
        return _scalarize(np.full(np.shape(self._clamp(t)), self.rate), t)
