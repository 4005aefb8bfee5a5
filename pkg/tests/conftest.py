import pytest

from fpcredit import (DiscountCurve, bootstrap_intensity, calibrate_at1p,
                      calibrate_sbtv)
from fpcredit.presets import preset_strip

LEHMAN_PRESETS = ("lehman-2007-07-10", "lehman-2008-06-12", "lehman-2008-09-12")


@pytest.fixture(scope="session")
def flat_curve():
    return DiscountCurve(flat_rate=0.03)


@pytest.fixture(scope="session")
def lehman_calibrations(flat_curve):
    """All three dated presets calibrated with all three models (default config)."""
    out = {}
    for name in LEHMAN_PRESETS:
        strip = preset_strip(name)
        hazard, rep_int = bootstrap_intensity(strip, flat_curve)
        at1p, rep_at1p = calibrate_at1p(strip, flat_curve)
        sbtv, rep_sbtv = calibrate_sbtv(strip, flat_curve)
        out[name] = {
            "strip": strip,
            "intensity": (hazard, rep_int),
            "at1p": (at1p, rep_at1p),
            "sbtv": (sbtv, rep_sbtv),
        }
    return out


@pytest.fixture(scope="session")
def ers_calibrations(flat_curve):
    """Counterparty models calibrated to the ERS study strip."""
    strip = preset_strip("ers-paper-2009-09-16")
    hazard, _ = bootstrap_intensity(strip, flat_curve)
    at1p, _ = calibrate_at1p(strip, flat_curve)
    sbtv, _ = calibrate_sbtv(strip, flat_curve)
    return {"strip": strip, "intensity": hazard, "at1p": at1p, "sbtv": sbtv}
