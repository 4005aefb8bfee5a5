"""Structural first-passage credit models: exact CDS calibration and
counterparty-risk pricing of equity return swaps.
"""

__version__ = "0.1.0"

from .calibration import (CalibrationReport, bootstrap_intensity,
                          calibrate_at1p, calibrate_sbtv, implied_survivals,
                          survival_handle)
from .cds import (CdsContract, SurvivalCurveHandle, cds_price,
                  cds_price_exact, cds_price_postponed, fair_spread)
from .curves import DiscountCurve, PaymentSchedule, make_schedule
from .errors import (CalibrationError, ConfigurationError,
                     DegenerateInputError, DomainError)
from .mc import (CvaEstimate, ErsContract, ErsPricingResult, PathRecords,
                 SimulationConfig, ers_cva_term, ers_fair_spread,
                 ers_fair_spread_from_paths, ers_npv_at_default,
                 ers_npv_at_default_termwise,
                 intensity_ers_check, make_ers_contract,
                 simulate_intensity_paths, simulate_joint_paths)
from .presets import preset_checksum, preset_strip
from .quotes import CdsQuote, CdsQuoteStrip, read_quote_csv, write_quote_csv
from .survival import (At1pParams, HazardCurve, SbtvParams,
                       VolatilityTermStructure, at1p_survival, barrier_level,
                       intensity_survival, sbtv_survival)
