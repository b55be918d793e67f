"""The high-low experiment: datum splitting, three flows, interval ledger.

A rough datum is split by heat-time s0 into a smooth low-frequency part
(evolved nonlinearly, finite energy) and a rough high-frequency part
(evolved linearly).  The full solution u is tracked alongside; on each
interval of the partition of [0, t_end] by the spacetime L4 budget, the
smooth remainder zeta = u - psi is re-decomposed into a nonlinear flow
zeta1 started from zeta(a_i) and the zero-data correction zeta2, and the
energy increment of zeta across the interval is recorded.  Sweeping the
cutoff s0 exposes the scaling law of the increments.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .dynamics import FlowConfig, Trajectory, _StrangStepper, energy, evolve_nls, mass
from .errors import ConfigurationError, DomainError, RunError, StudyError
from .geometry import RadialField
from .heat_lp import heat
from .spectral import SpectralOperator, _matvec

#: spectral tilt of the rough datum below the borderline k^(-1/2)
DATUM_DELTA = 0.02

#: positive increments below this multiple of machine epsilon are noise
INCREMENT_FLOOR_ULPS = 100.0

#: a single run may not produce more intervals than this
INTERVAL_CAP = 10_000


@dataclass(frozen=True)
class RoughDatum:
    """Spectral recipe for an H^s datum at exactly critical regularity.

    Coefficients carry random unit phases under a power law chosen so the
    discrete H^sigma norms stay stable under grid refinement for sigma <= s
    and grow for sigma > s (the borderline index is log-corrected).
    """

    s: float
    seed: int
    amplitude: float
    coefficients: npt.NDArray = field(repr=False)

    def to_field(self, op: SpectralOperator) -> RadialField:
        return op.from_coefficients(self.coefficients)


def rough_datum(op: SpectralOperator, s: float, seed: int,
                amplitude: float = 1.0) -> RoughDatum:
    """Draw the spectral coefficients of a radial H^s datum."""
    if not 0.5 < s < 1.0:
        raise ConfigurationError("rough_datum: target regularity s must be in (1/2, 1)")
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * rng.random(op.n))
    k = np.arange(1, op.n + 1, dtype=float)
    coeffs = (amplitude * phases
              * (1.0 + op.eigenvalues) ** (-s / 2.0)
              * k ** (-(0.5 + DATUM_DELTA)))
    return RoughDatum(s=s, seed=seed, amplitude=amplitude, coefficients=coeffs)


def make_rough_datum(op: SpectralOperator, s: float, seed: int,
                     amplitude: float = 1.0) -> RadialField:
    """Sample the rough datum on the grid."""
    return rough_datum(op, s, seed, amplitude).to_field(op)


def split_datum(op: SpectralOperator, phi: RadialField,
                s0: float) -> tuple[RadialField, RadialField]:
    """Split phi into (low-frequency, high-frequency) parts at heat-time s0.

    The low part is the heat-smoothed field, the high part its exact
    complement, so they sum back to phi to roundoff.
    """
    if s0 <= 0:
        raise DomainError("split_datum: s0 must be positive")
    eta0 = heat(op, s0, phi)
    return eta0, phi - eta0


class BudgetParameters(NamedTuple):
    M: float
    s_c: float
    increment_exponent: float
    threshold: float


def budget_parameters(s: float, p: int, s0: float) -> BudgetParameters:
    """Closed-form bookkeeping of the high-low budget for nonlinearity p.

    s_c is the Euclidean critical index d/2 - 2/(p-1) at d = 2; M is the
    admissible total L4-budget scale for cutoff s0; the increment exponent
    governs the per-interval energy growth; the threshold is the regularity
    above which the global argument closes.
    """
    if p < 3:
        raise DomainError("budget_parameters: p must be at least 3")
    if s0 <= 0:
        raise DomainError("budget_parameters: s0 must be positive")
    s_c = 1.0 - 2.0 / (p - 1.0)
    if not s_c < s < 1.0:
        raise DomainError(f"budget_parameters: need s in ({s_c}, 1), got {s}")
    m_exponent = 0.5 * ((1.0 - s) / (1.0 - s_c) - 0.5)
    m_value = s0 ** m_exponent
    increment_exponent = (p + 3.0) / 4.0 * s - (p + 2.0) / 4.0
    threshold = (3.0 * p - 6.0) / (3.0 * p - 5.0)
    return BudgetParameters(M=m_value, s_c=s_c,
                            increment_exponent=increment_exponent,
                            threshold=threshold)


@dataclass(frozen=True)
class IntervalRecord:
    """Ledger row for one interval of the L4 partition."""

    index: int
    t_start: float
    t_end: float
    l4_budget: float
    partial: bool
    e_zeta_start: float
    e_zeta_end: float
    delta_e: float
    zeta2_l4: float          # spacetime L4 norm over the interval
    zeta2_linf_l2: float
    zeta2_linf_h1: float
    zeta1_l4_pow4: float     # spacetime L4 norm to the fourth power
    psi_l4: float
    u_hs_start: float
    wsup_psi: float          # sup over the interval of ||w^(1/2) psi||_inf
    wsup_zeta1: float
    wsup_zeta2: float


@dataclass(frozen=True)
class HighLowLedger:
    """Everything one high-low run measured."""

    s0: float
    epsilon: float
    s: float
    p: int
    dt: float
    t_end: float
    intervals: list[IntervalRecord]
    total_l4: float
    amplitude_flagged: bool  # sup|u| left the intended 0.1..1 window

    @property
    def interval_count(self) -> int:
        return len(self.intervals)

    @property
    def max_positive_increment(self) -> float:
        """Largest positive energy increment, floored at the noise level."""
        scale = max(abs(self.intervals[0].e_zeta_start), 1.0) if self.intervals else 1.0
        floor = INCREMENT_FLOOR_ULPS * np.finfo(float).eps * scale
        best = floor
        for rec in self.intervals:
            if rec.delta_e > best:
                best = rec.delta_e
        return best

    def column(self, name: str) -> npt.NDArray[np.float64]:
        return np.array([getattr(rec, name) for rec in self.intervals])


class _IntervalAccumulator:
    """Running norms of (psi, zeta1, zeta2) over the current interval."""

    def __init__(self, op: SpectralOperator, sqrt_weight, hs_sigma: float):
        self.op = op
        self.sqrt_weight = sqrt_weight
        self.hs_sigma = hs_sigma
        self.reset()

    def reset(self):
        self.zeta2_l4_pow4 = 0.0
        self.zeta1_l4_pow4 = 0.0
        self.psi_l4_pow4 = 0.0
        self.zeta2_linf_l2 = 0.0
        self.zeta2_linf_h1 = 0.0
        self.wsup_psi = 0.0
        self.wsup_zeta1 = 0.0
        self.wsup_zeta2 = 0.0
        self._prev = None

    def update(self, t: float, psi, zeta1, zeta2):
        op = self.op
        mu = op.grid.quad_weights
        dens = (float(np.sum(mu * np.abs(psi) ** 4)),
                float(np.sum(mu * np.abs(zeta1) ** 4)),
                float(np.sum(mu * np.abs(zeta2) ** 4)))
        if self._prev is not None:
            t_prev, d_prev = self._prev
            w = 0.5 * (t - t_prev)
            self.psi_l4_pow4 += w * (d_prev[0] + dens[0])
            self.zeta1_l4_pow4 += w * (d_prev[1] + dens[1])
            self.zeta2_l4_pow4 += w * (d_prev[2] + dens[2])
        self._prev = (t, dens)
        self.zeta2_linf_l2 = max(self.zeta2_linf_l2, op.norm(zeta2))
        self.zeta2_linf_h1 = max(self.zeta2_linf_h1, op.sobolev_norm(zeta2, 1.0))
        self.wsup_psi = max(self.wsup_psi, float(np.max(self.sqrt_weight * np.abs(psi))))
        self.wsup_zeta1 = max(self.wsup_zeta1, float(np.max(self.sqrt_weight * np.abs(zeta1))))
        self.wsup_zeta2 = max(self.wsup_zeta2, float(np.max(self.sqrt_weight * np.abs(zeta2))))


def run_highlow(op: SpectralOperator, phi: RadialField, s0: float,
                epsilon: float, cfg: FlowConfig,
                u_traj: Trajectory | None = None,
                hs_sigma: float | None = None) -> HighLowLedger:
    """One full high-low run; returns the per-interval ledger.

    The full solution may be passed in (it does not depend on s0, so sweeps
    integrate it once); it must carry every recorded step of the same cfg.
    Interval boundaries are snapped to the recorded time grid where the
    cumulative spacetime L4 integral crosses multiples of epsilon; the final
    interval is closed at t_end and flagged partial when the budget is not
    exhausted.
    """
    if epsilon <= 0:
        raise ConfigurationError("run_highlow: epsilon must be positive")
    if s0 <= 0:
        raise DomainError("run_highlow: s0 must be positive")
    if hs_sigma is None:
        hs_sigma = cfg.hs_sigma

    if u_traj is None:
        u_traj = evolve_nls(op, phi, cfg)
    times = u_traj.times
    fields = u_traj.fields
    l4_cum = u_traj.l4_cum

    eta0, psi0 = split_datum(op, phi, s0)
    psi_hat0 = op.to_coefficients(psi0)
    lam = op.eigenvalues

    sup_u = float(np.max(np.abs(fields)))
    flagged = not (0.05 <= sup_u <= 1.5)

    stepper = _StrangStepper(op, cfg, self_interacting=True)
    sqrt_weight = np.sqrt(op.grid.weight_values())
    acc = _IntervalAccumulator(op, sqrt_weight, hs_sigma)

    records: list[IntervalRecord] = []
    p = cfg.p

    def psi_at(t: float) -> RadialField:
        return _matvec(op.eigenvectors, np.exp(-1j * lam * t) * psi_hat0)

    def fail(msg: str):
        partial = HighLowLedger(
            s0=s0, epsilon=epsilon, s=hs_sigma, p=p, dt=cfg.dt,
            t_end=cfg.t_end, intervals=records,
            total_l4=float(l4_cum[-1]), amplitude_flagged=flagged)
        raise RunError(msg, partial_ledger=partial)

    # state at the head of the current interval
    zeta1 = eta0.astype(complex).copy()
    psi_now = psi0.astype(complex)
    zeta_start = fields[0] - psi_now
    interval_start_idx = 0
    e_start = energy(op, zeta_start, p)
    u_hs_start = op.sobolev_norm(fields[0], hs_sigma)
    budget_level = float(l4_cum[0])
    acc.update(float(times[0]), psi_now, zeta1, fields[0] - psi_now - zeta1)

    steps_per_record = cfg.record_every

    def close_interval(idx_end: int, partial: bool):
        nonlocal interval_start_idx, zeta1, e_start, u_hs_start, budget_level
        t_a, t_b = float(times[interval_start_idx]), float(times[idx_end])
        psi_b = psi_at(t_b)
        zeta_b = fields[idx_end] - psi_b
        e_end = energy(op, zeta_b, p)
        records.append(IntervalRecord(
            index=len(records), t_start=t_a, t_end=t_b,
            l4_budget=float(l4_cum[idx_end]) - budget_level, partial=partial,
            e_zeta_start=e_start, e_zeta_end=e_end, delta_e=e_end - e_start,
            zeta2_l4=acc.zeta2_l4_pow4 ** 0.25,
            zeta2_linf_l2=acc.zeta2_linf_l2, zeta2_linf_h1=acc.zeta2_linf_h1,
            zeta1_l4_pow4=acc.zeta1_l4_pow4, psi_l4=acc.psi_l4_pow4 ** 0.25,
            u_hs_start=u_hs_start,
            wsup_psi=acc.wsup_psi, wsup_zeta1=acc.wsup_zeta1,
            wsup_zeta2=acc.wsup_zeta2))
        # re-decompose: the nonlinear branch restarts from zeta(a_i),
        # the correction restarts from zero
        interval_start_idx = idx_end
        zeta1 = zeta_b.copy()
        e_start = e_end
        u_hs_start = op.sobolev_norm(fields[idx_end], hs_sigma)
        budget_level = float(l4_cum[idx_end])
        acc.reset()
        acc.update(t_b, psi_b, zeta1, np.zeros_like(zeta1))

    for idx in range(1, len(times)):
        t_prev, t_next = float(times[idx - 1]), float(times[idx])
        n_sub = max(1, int(round((t_next - t_prev) / cfg.dt)))
        for j in range(n_sub):
            zeta1 = stepper.step(zeta1, t_prev + j * cfg.dt, None)
        if not np.all(np.isfinite(zeta1)):
            fail(f"non-finite smooth branch at t={t_next:.6g}")
        psi_now = psi_at(t_next)
        acc.update(t_next, psi_now, zeta1, fields[idx] - psi_now - zeta1)
        crossed = (l4_cum[idx] - budget_level) >= epsilon
        if crossed and idx < len(times) - 1:
            close_interval(idx, partial=False)
            if len(records) >= INTERVAL_CAP:
                fail(f"interval cap {INTERVAL_CAP} exceeded")
    if interval_start_idx < len(times) - 1:
        exhausted = (l4_cum[-1] - budget_level) >= epsilon
        close_interval(len(times) - 1, partial=not exhausted)

    return HighLowLedger(
        s0=s0, epsilon=epsilon, s=hs_sigma, p=p, dt=cfg.dt, t_end=cfg.t_end,
        intervals=records, total_l4=float(l4_cum[-1]),
        amplitude_flagged=flagged)


def _fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log x."""
    slope, intercept = np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)
    return float(slope), float(intercept)


@dataclass(frozen=True)
class ScalingStudy:
    """Fit of the per-run maximal positive energy increment against s0."""

    s0_values: npt.NDArray[np.float64]
    max_increments: npt.NDArray[np.float64]
    fitted_slope: float
    predicted_exponent: float
    fitted_constant: float          # one-sided: max increment / s0^predicted
    onset_index: int                # monotone decrease holds from here down
    ledgers: list[HighLowLedger] = field(repr=False)

    def summary(self) -> dict:
        out = {
            "s0_values": [float(v) for v in self.s0_values],
            "max_increments": [float(v) for v in self.max_increments],
            "fitted_slope": self.fitted_slope,
            "predicted_exponent": self.predicted_exponent,
            "fitted_constant": self.fitted_constant,
            "onset_index": self.onset_index,
        }
        for name, target in (("wsup_psi", None), ("wsup_zeta1", None),
                             ("wsup_zeta2", None), ("zeta2_linf_h1", None)):
            peaks = [max(led.column(name)) if led.intervals else np.nan
                     for led in self.ledgers]
            if np.all(np.isfinite(peaks)) and np.all(np.asarray(peaks) > 0):
                slope, _ = _fit_loglog(self.s0_values, peaks)
                out[f"{name}_slope"] = slope
        hs_c = [float(np.max(led.column("u_hs_start"))) for led in self.ledgers]
        out["u_hs_max"] = max(hs_c) if hs_c else np.nan
        return out


def increment_scaling_study(op: SpectralOperator, phi: RadialField,
                            s0_list, epsilon: float, cfg: FlowConfig,
                            s: float | None = None,
                            jobs: int = 1) -> ScalingStudy:
    """Sweep s0, fit log(max positive increment) against log(s0).

    ``s`` is the datum regularity the prediction is evaluated at; it
    defaults to the cfg's Sobolev monitor index.  The full solution is
    integrated once and shared read-only across the sweep (it does not
    depend on s0), so points may run concurrently.
    """
    if s is None:
        s = cfg.hs_sigma
    s0_arr = np.sort(np.asarray(list(s0_list), dtype=float))
    if len(s0_arr) < 4:
        raise StudyError("increment_scaling_study: need at least 4 cutoffs")
    if s0_arr[-1] / s0_arr[0] < 10 ** 1.5 * (1.0 - 1e-9):
        raise StudyError("increment_scaling_study: cutoffs must span >= 1.5 decades")

    u_traj = evolve_nls(op, phi, cfg)

    def one(s0: float) -> HighLowLedger:
        return run_highlow(op, phi, float(s0), epsilon, cfg, u_traj=u_traj)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ledgers = list(pool.map(one, s0_arr))
    else:
        ledgers = [one(s0) for s0 in s0_arr]

    increments = np.array([led.max_positive_increment for led in ledgers])
    scale = max(abs(ledgers[0].intervals[0].e_zeta_start), 1.0)
    floor = INCREMENT_FLOOR_ULPS * np.finfo(float).eps * scale
    usable = increments > floor
    if np.count_nonzero(usable) < 4:
        raise StudyError(
            "increment_scaling_study: fewer than 4 increments above the "
            "roundoff floor; rerun with a larger datum amplitude")

    slope, _ = _fit_loglog(s0_arr[usable], increments[usable])
    predicted = budget_parameters(s, cfg.p, float(s0_arr[0])).increment_exponent
    fitted_c = float(np.max(increments / s0_arr ** predicted))

    onset = len(s0_arr) - 1
    while onset > 0 and increments[onset - 1] <= increments[onset]:
        onset -= 1
    return ScalingStudy(
        s0_values=s0_arr, max_increments=increments, fitted_slope=slope,
        predicted_exponent=predicted, fitted_constant=fitted_c,
        onset_index=onset, ledgers=ledgers)
