"""Joint firm-value / equity simulation and counterparty-risk pricing of an
equity return swap (ERS).

The counterparty's firm value and the underlying equity evolve as
correlated GBMs with exact per-step Gaussian increments.  Default is a
first passage of the firm value to its barrier: on the simulation grid,
plus (with the bridge correction on) an intra-step hit sampled from the
Brownian-bridge crossing probability, which removes the discrete
monitoring bias.

Working variable for the firm is x_t = log(V_t / H(t)).  Both the rate
and payout drifts cancel between V and the barrier, leaving
dx = (B - 1/2) sigma^2 dt + sigma dW, with default when x <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import DiscountCurve, PaymentSchedule, make_schedule
from .errors import DomainError
from .survival import (At1pParams, HazardCurve, SbtvParams, at1p_survival,
                       intensity_survival, sbtv_survival)


@dataclass(frozen=True)
class ErsContract:
    """Equity return swap terms; nominal is stock_count * s0."""

    s0: float
    equity_vol: float
    dividend_yield: float
    schedule: PaymentSchedule
    recovery: float
    rho: float
    stock_count: float = 1.0
    spread: float = 0.0

    def __post_init__(self):
        if self.s0 <= 0 or self.equity_vol <= 0:
            raise DomainError("initial price and equity volatility must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError("correlation must lie in [-1, 1]")
        if not 0 <= self.recovery < 1:
            raise DomainError("recovery must lie in [0, 1)")

    @property
    def maturity(self) -> float:
        return self.schedule.end

    @property
    def lgd(self) -> float:
        return 1.0 - self.recovery


@dataclass(frozen=True)
class SimulationConfig:
    n_paths: int = 100_000
    steps_per_year: int = 52
    rng_seed: int = 20090916
    bridge_correction: bool = True
    control_variate: bool = True
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 2:
            raise DomainError("need at least 2 paths")
        if self.steps_per_year < 12:
            raise DomainError("need at least 12 steps per year")


@dataclass
class PathRecords:
    """Per-path simulation output sufficient for ERS pricing."""

    defaulted: np.ndarray          # bool
    tau: np.ndarray                # default time; +inf where not defaulted
    s_tau: np.ndarray              # equity at default; nan where not defaulted
    default_prob_closed_form: float
    s_at_schedule: np.ndarray | None = None   # (n_paths, n_dates)
    scenario: np.ndarray | None = None        # SBTV scenario index per path
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.defaulted.size


@dataclass
class CvaEstimate:
    value: float
    std_error: float
    plain_value: float
    plain_std_error: float
    n_defaulted: int
    low_statistics: bool = False


@dataclass
class ErsPricingResult:
    fair_spread_bp: float
    std_error_bp: float
    cva_value: float
    cva_std_error: float
    default_prob_mc: float
    default_prob_closed_form: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "fair_spread_bp": self.fair_spread_bp,
            "std_error_bp": self.std_error_bp,
            "cva_value": self.cva_value,
            "cva_std_error": self.cva_std_error,
            "default_prob_mc": self.default_prob_mc,
            "default_prob_closed_form": self.default_prob_closed_form,
            "diagnostics": self.diagnostics,
        }


def make_ers_contract(s0=20.0, equity_vol=0.20, dividend_yield=0.008, maturity=5.0,
                      payment_frequency=2, recovery=0.40, rho=0.0, stock_count=1.0,
                      spread=0.0) -> ErsContract:
    schedule = make_schedule(0.0, maturity, payment_frequency)
    return ErsContract(s0=s0, equity_vol=equity_vol, dividend_yield=dividend_yield,
                       schedule=schedule, recovery=recovery, rho=rho,
                       stock_count=stock_count, spread=spread)


def _simulation_grid(model, ers: ErsContract, cfg: SimulationConfig):
    """Uniform grid refined with vol bucket ends and schedule dates."""
    T = ers.maturity
    base = np.linspace(0.0, T, round(T * cfg.steps_per_year) + 1)
    extra = np.concatenate((np.asarray(model.vols.bucket_ends, dtype=float),
                            ers.schedule.dates))
    extra = extra[extra <= T + 1e-12]
    grid = np.unique(np.round(np.concatenate((base, extra)), 12))
    n_inserted = grid.size - base.size
    return grid, n_inserted


def model_survival(model, t):
    if isinstance(model, At1pParams):
        return at1p_survival(model, t)
    if isinstance(model, SbtvParams):
        return sbtv_survival(model, t)
    if isinstance(model, HazardCurve):
        return intensity_survival(model, t)
    raise DomainError(f"unknown model type {type(model).__name__}")


def simulate_joint_paths(model, ers: ErsContract, curve: DiscountCurve,
                         cfg: SimulationConfig) -> PathRecords:
    """Correlated firm/equity paths with first-passage default detection.

    For the scenario-barrier model a barrier scenario is drawn per path,
    independently of the Brownian drivers, before path generation.  A fixed
    set of random draws is consumed per step regardless of how many paths
    are still alive, so runs with the same seed stay path-aligned across
    different correlations.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    n = cfg.n_paths
    grid, n_inserted = _simulation_grid(model, ers, cfg)
    rho = ers.rho
    rho_c = math.sqrt(max(0.0, 1.0 - rho * rho))
    sigma_s = ers.equity_vol
    q_div = ers.dividend_yield

    if isinstance(model, SbtvParams):
        probs = np.array([p for _, p in model.scenarios])
        scenario = rng.choice(len(probs), size=n, p=probs)
        x = -np.log(np.array([h for h, _ in model.scenarios]))[scenario]
        b_exp = model.b
    elif isinstance(model, At1pParams):
        scenario = None
        x = np.full(n, -math.log(model.h_over_v0))
        b_exp = model.b
    else:
        raise DomainError("joint simulation needs a first-passage model (use "
                          "simulate_intensity_paths for the hazard model)")

    log_s = np.full(n, math.log(ers.s0))
    alive = np.ones(n, dtype=bool)
    tau = np.full(n, np.inf)
    s_tau = np.full(n, np.nan)
    sched_dates = ers.schedule.dates
    s_at_schedule = np.empty((n, sched_dates.size))
    sched_seen = 0

    cumvar = np.asarray(model.vols.cumulative_variance(grid))
    for k in range(grid.size - 1):
        t0, t1 = grid[k], grid[k + 1]
        dt = t1 - t0
        dvar = cumvar[k + 1] - cumvar[k]
        sd_v = math.sqrt(dvar)
        r_int = curve.forward_integral(t0, t1)
        drift_x = (b_exp - 0.5) * dvar
        drift_s = r_int - q_div * dt - 0.5 * sigma_s * sigma_s * dt
        sd_s = sigma_s * math.sqrt(dt)

        if cfg.antithetic:
            half = n // 2
            z1 = np.empty(n); z2 = np.empty(n)
            z1[:half] = rng.standard_normal(half); z1[half:2 * half] = -z1[:half]
            z2[:half] = rng.standard_normal(half); z2[half:2 * half] = -z2[:half]
            if n % 2:
                z1[-1] = rng.standard_normal(); z2[-1] = rng.standard_normal()
        else:
            z1 = rng.standard_normal(n)
            z2 = rng.standard_normal(n)
        u = rng.random(n) if cfg.bridge_correction else None
        z3 = rng.standard_normal(n) if cfg.bridge_correction else None

        x_old = x.copy()
        log_s_old = log_s.copy()
        x = x + drift_x + sd_v * z1
        log_s = log_s + drift_s + sd_s * (rho * z1 + rho_c * z2)

        hit_grid = alive & (x <= 0.0)
        tau[hit_grid] = t1
        s_tau[hit_grid] = np.exp(log_s[hit_grid])

        if cfg.bridge_correction:
            candidate = alive & ~hit_grid
            if np.any(candidate):
                # bridge crossing probability for a path strictly above the
                # barrier at both step endpoints
                p_hit = np.exp(-2.0 * x_old[candidate] * x[candidate] / dvar)
                hit_mid = np.zeros(n, dtype=bool)
                hit_mid[candidate] = u[candidate] < p_hit
                if np.any(hit_mid):
                    t_mid = t0 + 0.5 * dt
                    tau[hit_mid] = t_mid
                    # log S at the midpoint conditional on both endpoint pairs
                    # and on the firm sitting at the barrier (x = 0) there
                    mean_x = 0.5 * (x_old[hit_mid] + x[hit_mid])
                    mean_s = 0.5 * (log_s_old[hit_mid] + log_s[hit_mid])
                    bridge_sd_x = 0.5 * sd_v
                    bridge_sd_s = 0.5 * sd_s
                    cond_mean = mean_s + rho * (bridge_sd_s / bridge_sd_x) * (0.0 - mean_x)
                    cond_sd = bridge_sd_s * rho_c
                    s_tau[hit_mid] = np.exp(cond_mean + cond_sd * z3[hit_mid])
                alive = alive & ~hit_grid & ~hit_mid
            else:
                alive = alive & ~hit_grid
        else:
            alive = alive & ~hit_grid

        if sched_seen < sched_dates.size and abs(t1 - sched_dates[sched_seen]) < 1e-9:
            s_at_schedule[:, sched_seen] = np.exp(log_s)
            sched_seen += 1

    defaulted = np.isfinite(tau)
    pd_closed = 1.0 - float(model_survival(model, ers.maturity))
    return PathRecords(defaulted=defaulted, tau=tau, s_tau=s_tau,
                       default_prob_closed_form=pd_closed,
                       s_at_schedule=s_at_schedule, scenario=scenario,
                       diagnostics={"grid_points": int(grid.size),
                                    "grid_points_inserted": int(n_inserted),
                                    "bridge_correction": cfg.bridge_correction,
                                    "seed": cfg.rng_seed})


def simulate_intensity_paths(hazard: HazardCurve, ers: ErsContract, curve: DiscountCurve,
                             cfg: SimulationConfig) -> PathRecords:
    """Reduced-form cross-check: default time by inverse transform of the
    piecewise-exponential survival, independent of the equity path.

    Only the defaulted paths' equity value matters for the adjustment, and
    under independence S_tau can be sampled exactly in one shot.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    n = cfg.n_paths
    u = rng.random(n)
    target = -np.log(u)
    knot_t = hazard._knot_t
    knot_cum = hazard._knot_cum
    tau = np.interp(target, knot_cum, knot_t)
    beyond = target > knot_cum[-1]
    lam_tail = hazard.lambdas[-1]
    if lam_tail > 0:
        tau[beyond] = knot_t[-1] + (target[beyond] - knot_cum[-1]) / lam_tail
    else:
        tau[beyond] = np.inf
    defaulted = tau <= ers.maturity
    tau = np.where(defaulted, tau, np.inf)

    s_tau = np.full(n, np.nan)
    if np.any(defaulted):
        td = tau[defaulted]
        r_int = -np.log(np.asarray(curve.discount(td)))
        z = rng.standard_normal(td.size)
        sig = ers.equity_vol
        s_tau[defaulted] = ers.s0 * np.exp(
            r_int - ers.dividend_yield * td - 0.5 * sig * sig * td + sig * np.sqrt(td) * z)
    pd_closed = 1.0 - float(intensity_survival(hazard, ers.maturity))
    return PathRecords(defaulted=defaulted, tau=tau, s_tau=s_tau,
                       default_prob_closed_form=pd_closed,
                       diagnostics={"seed": cfg.rng_seed, "model": "intensity"})


def ers_npv_at_default(tau, s_tau, ers: ErsContract, curve: DiscountCurve, spread: float):
    """Discounted-to-0 residual swap value at default, P(0,tau) * NPV(tau).

    Three-term simplified form: the floating legs telescope against the
    final notional exchange and the dividend stream cancels against the
    discounted expected terminal stock price, leaving

        K*S0 * sum_{i >= beta(tau)} P(0,T_i) alpha_i X
        + K*S0 * P(0, T_{beta(tau)-1}) - K * P(0,tau) * S_tau
    """
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr > ers.maturity):
        raise DomainError("default after maturity: residual NPV undefined")
    sched = ers.schedule
    df_dates = np.asarray(curve.discount(sched.dates))
    annuity_terms = df_dates * sched.accruals
    # tail annuity from the first payment date strictly after tau
    suffix = np.concatenate((np.cumsum(annuity_terms[::-1])[::-1], [0.0]))
    beta0 = np.searchsorted(sched.dates, tau_arr, side="right")  # 0-based
    tail = suffix[beta0]
    df_prev = np.asarray(curve.discount(sched.previous_date(tau_arr)))
    k, s0 = ers.stock_count, ers.s0
    out = (k * s0 * spread * tail + k * s0 * df_prev
           - k * np.asarray(curve.discount(tau_arr)) * np.asarray(s_tau, dtype=float))
    return float(out) if np.isscalar(tau) else out


def ers_npv_at_default_termwise(tau: float, s_tau: float, ers: ErsContract,
                                curve: DiscountCurve, spread: float) -> float:
    """Term-by-term evaluation of the residual NPV definition, discounted to 0.

    Explicit floating legs at the curve's forward LIBORs, explicit present
    value of the continuous dividend stream, and the discounted expected
    terminal stock price.  Used as the independent oracle for the
    simplified three-term form.
    """
    if tau > ers.maturity:
        raise DomainError("default after maturity: residual NPV undefined")
    sched = ers.schedule
    k, s0 = ers.stock_count, ers.s0
    p0 = curve.discount
    p_tau = p0(tau)
    total = 0.0
    prev = sched.start
    for t_i, alpha in zip(sched.dates, sched.accruals):
        if t_i > tau:
            libor = (p0(prev) / p0(t_i) - 1.0) / alpha
            # P(tau, T_i) = P(0, T_i) / P(0, tau)
            total += s0 * (p0(t_i) / p_tau) * alpha * (libor + spread)
        prev = t_i
    t_b = ers.maturity
    # expected terminal stock under the risk-neutral measure, seen from tau
    growth = curve.forward_integral(tau, t_b) - ers.dividend_yield * (t_b - tau)
    exp_s_tb = s_tau * math.exp(growth)
    pv_dividends = s_tau * (1.0 - math.exp(-ers.dividend_yield * (t_b - tau)))
    total += (s0 - exp_s_tb) * (p0(t_b) / p_tau)
    total -= pv_dividends
    return k * p_tau * total


def ers_cva_term(paths: PathRecords, ers: ErsContract, curve: DiscountCurve,
                 spread: float, control_variate: bool = True) -> CvaEstimate:
    """Monte Carlo counterparty adjustment LGD * E[1{default} (P(0,tau) NPV(tau))^+].

    The default indicator, whose mean is the closed-form default
    probability, serves as the control variate; its coefficient comes from
    the sample covariance.
    """
    n = paths.n_paths
    payoff = np.zeros(n)
    d = paths.defaulted
    n_def = int(np.count_nonzero(d))
    if n_def == 0:
        return CvaEstimate(0.0, 0.0, 0.0, 0.0, 0, low_statistics=True)
    pv = ers_npv_at_default(paths.tau[d], paths.s_tau[d], ers, curve, spread)
    payoff[d] = ers.lgd * np.maximum(pv, 0.0)
    plain_value = float(np.mean(payoff))
    plain_se = float(np.std(payoff, ddof=1) / math.sqrt(n))
    if not control_variate:
        return CvaEstimate(plain_value, plain_se, plain_value, plain_se, n_def)
    indicator = d.astype(float)
    var_c = float(np.var(indicator, ddof=1))
    if var_c == 0.0:
        return CvaEstimate(plain_value, plain_se, plain_value, plain_se, n_def)
    beta = float(np.cov(payoff, indicator, ddof=1)[0, 1]) / var_c
    adjusted = payoff - beta * (indicator - paths.default_prob_closed_form)
    value = float(np.mean(adjusted))
    se = float(np.std(adjusted, ddof=1) / math.sqrt(n))
    return CvaEstimate(value, se, plain_value, plain_se, n_def)


def ers_fair_spread_from_paths(paths: PathRecords, ers: ErsContract, curve: DiscountCurve,
                               cfg: SimulationConfig, max_iter: int = 50,
                               tol_bp: float = 0.05) -> ErsPricingResult:
    """Solve for the spread X that zeroes the swap value on a fixed path set.

    The default-free leg is K*S0*X*annuity and the adjustment depends on X
    only inside the positive part, so the fixed point
    X <- CVA(X) / (K*S0*annuity) converges in a few steps; reusing the same
    paths across iterations gives common random numbers for free.
    """
    sched = ers.schedule
    annuity = float(np.sum(np.asarray(curve.discount(sched.dates)) * sched.accruals))
    denom = ers.stock_count * ers.s0 * annuity
    x = 0.0
    trace = []
    est = None
    converged = False
    for _ in range(max_iter):
        est = ers_cva_term(paths, ers, curve, x, control_variate=cfg.control_variate)
        x_new = est.value / denom
        trace.append(abs(x_new - x) * 1e4)
        x = x_new
        if trace[-1] < tol_bp:
            converged = True
            break
    if not converged:
        raise RuntimeError(f"fair-spread iteration did not converge; |dX| trace (bp): {trace}")
    if len(trace) > 2:
        shrink_violations = [i for i in range(2, len(trace)) if trace[i] > trace[i - 1] + 1e-12]
        if shrink_violations:
            raise RuntimeError(f"fair-spread iteration stopped contracting at steps "
                               f"{shrink_violations}; |dX| trace (bp): {trace}")
    pd_mc = float(np.mean(paths.defaulted))
    se_bp = est.std_error / denom * 1e4
    diag = {
        "iterations": len(trace),
        "delta_x_trace_bp": trace,
        "paths_defaulted": int(np.count_nonzero(paths.defaulted)),
        "n_paths": paths.n_paths,
        "control_variate": cfg.control_variate,
        "variance_reduction_factor": (est.plain_std_error / est.std_error
                                      if est.std_error > 0 else 1.0),
        "annuity": annuity,
        "low_statistics": est.low_statistics or est.std_error * 3 > max(abs(est.value), 1e-12),
    }
    diag.update(paths.diagnostics)
    return ErsPricingResult(
        fair_spread_bp=x * 1e4, std_error_bp=se_bp,
        cva_value=est.value, cva_std_error=est.std_error,
        default_prob_mc=pd_mc, default_prob_closed_form=paths.default_prob_closed_form,
        diagnostics=diag)


def ers_fair_spread(model, ers: ErsContract, curve: DiscountCurve,
                    cfg: SimulationConfig) -> ErsPricingResult:
    """Simulate and solve for the fair ERS spread under the given credit model."""
    if isinstance(model, HazardCurve):
        paths = simulate_intensity_paths(model, ers, curve, cfg)
    else:
        paths = simulate_joint_paths(model, ers, curve, cfg)
    return ers_fair_spread_from_paths(paths, ers, curve, cfg)


def intensity_ers_check(hazard: HazardCurve, ers: ErsContract, curve: DiscountCurve,
                        cfg: SimulationConfig) -> ErsPricingResult:
    """Fair spread under credit/equity independence; the rho = 0 anchor."""
    return ers_fair_spread(hazard, ers, curve, cfg)
