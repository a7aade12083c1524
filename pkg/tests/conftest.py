"""Shared fixtures: the reference pulse/thermal model and one session-wide
bare-spectrum cache (the expensive batched integration) reused by the
broadening, addressing and acceptance tests."""

import numpy as np
import pytest

from apsim.pulses import APPulse
from apsim.thermal import SpectrumCache, ThermalModel
from apsim.units import khz_to_rad_per_s


@pytest.fixture(scope="session")
def ref_pulse() -> APPulse:
    """28 kHz drive, +-40 kHz sweep, 2 ms: the workhorse passage pulse."""
    return APPulse.from_khz(28.0, 40.0, 0.0, 2.0)


@pytest.fixture(scope="session")
def ref_thermal() -> ThermalModel:
    """Fitted thermal parameters of the reference spectrum."""
    return ThermalModel.from_khz(-11.0, 1.7, 0.95)


@pytest.fixture(scope="session")
def ref_cache(ref_pulse, ref_thermal) -> SpectrumCache:
    """Bare spectrum of ref_pulse covering a -65..65 kHz broadened scan."""
    return SpectrumCache.for_scan(
        ref_pulse, khz_to_rad_per_s(-65.0), khz_to_rad_per_s(65.0), ref_thermal
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the one-line acceptance verdicts collected during the run."""
    import sys

    # find the module instance pytest actually imported (its dotted name
    # depends on rootdir layout, so match on the trailing component)
    lines = []
    for name, mod in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(mod, "ACCEPTANCE_LINES", [])
            if lines:
                break
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
