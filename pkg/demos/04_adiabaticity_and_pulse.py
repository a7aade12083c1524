"""Pulse waveforms and the adiabaticity budget.

Plots the drive envelope, the detuning sweep and the local adiabaticity
parameter (angular velocity of the torque vector over the gap) for the
workhorse passage pulse.  The passage stays adiabatic when that
parameter is small everywhere; here it peaks below 0.01, comfortably in
the adiabatic regime, and the peak sits where the sweep is fastest while
the gap is still closing.
"""

import numpy as np

from apsim.pulses import APPulse, adiabaticity, max_adiabaticity
from apsim.units import rad_per_s_to_khz

pulse = APPulse.from_khz(28.0, 40.0, 0.0, 2.0)
t = np.linspace(0.0, pulse.duration, 2001)

kappa = adiabaticity(t, pulse)
print(f"peak adiabaticity parameter {max_adiabaticity(pulse):.3e}")
print(f"worst-case position t = {t[np.argmax(kappa)] * 1e3:.3f} ms of {pulse.duration * 1e3:.1f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the figure")
else:
    fig, axes = plt.subplots(3, 1, figsize=(6.5, 7), sharex=True)
    axes[0].plot(t * 1e3, rad_per_s_to_khz(pulse.rabi(t)), color="C0")
    axes[0].set_ylabel("drive (kHz)")
    axes[1].plot(t * 1e3, rad_per_s_to_khz(pulse.detuning(t)), color="C1")
    axes[1].set_ylabel("detuning (kHz)")
    axes[2].plot(t * 1e3, kappa, color="C2")
    axes[2].set_ylabel("adiabaticity")
    axes[2].set_xlabel("time (ms)")
    fig.tight_layout()
    fig.savefig("adiabaticity_and_pulse.png", dpi=150)
    print("wrote adiabaticity_and_pulse.png")
