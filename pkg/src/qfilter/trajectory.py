"""Stochastic master equations for quadrature and photon-counting records.

Filters are propagated in density-matrix (Schroedinger) form.  The step
primitives accept states of shape (d, d) or batched (..., d, d); every
step ends with a Hermitian projection and trace renormalization.

The unnormalized (Zakai) companion is stored in factorized form as a
normalized matrix plus an accumulated log-normalization, with the
log-normalization increment taken from the Zakai trace SDE.  This keeps
the Kallianpur-Striebel relation exact at the discrete level and avoids
likelihood overflow on long records.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import dagger
from .master import TimeGrid
from .model import CoherentInput, HPModel, lindblad_adjoint, modulated_operators

JUMP_RATE_FLOOR = 1e-12
TRACE_UNDERFLOW = 1e-12
COUNTING_BETA_MIN = 1e-3
MAX_JUMP_PROBABILITY = 0.1

QUADRATURE = "quadrature"
COUNTING = "counting"
KINDS = (QUADRATURE, COUNTING)


class TraceUnderflowError(RuntimeError):
    """The (un)normalized state trace collapsed below the floor."""


class JumpRateError(RuntimeError):
    """A detection event occurred in a state with vanishing jump rate,
    or the per-step jump probability exceeds the validity bound."""


@dataclass(frozen=True)
class MeasurementRecord:
    """Discretized observation path for one trajectory."""

    kind: str
    grid: TimeGrid
    increments: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        inc = np.asarray(self.increments, dtype=float)
        if inc.shape != (self.grid.steps,):
            raise ValueError(
                f"record length {inc.shape} does not match grid steps {self.grid.steps}"
            )
        if self.kind == COUNTING and not np.all((inc == 0.0) | (inc == 1.0)):
            raise ValueError("counting increments must be exactly 0 or 1")
        object.__setattr__(self, "increments", inc)


@dataclass(frozen=True)
class FilterState:
    """Normalized conditional state plus accumulated Zakai log-normalization."""

    rho: np.ndarray
    t: float
    log_norm: float = 0.0


@dataclass(frozen=True)
class InnovationsPath:
    grid: TimeGrid
    increments: np.ndarray

    def cumulative(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.increments)])


def _btrace(x: np.ndarray) -> np.ndarray:
    return np.einsum("...ii->...", x)


def _hermitize_normalize(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + dagger(rho))
    tr = _btrace(rho).real
    if not np.all(np.isfinite(tr)) or np.any(np.abs(tr) < TRACE_UNDERFLOW):
        raise TraceUnderflowError("state trace underflow during renormalization")
    return rho / tr[..., None, None]


def quad_step_arrays(rho: np.ndarray, dy, lb: np.ndarray, hb: np.ndarray, dt: float):
    """One quadrature filter step on (..., d, d) states.

    rho <- rho + L'rho dt + (L^b rho + rho L^b† - m rho)(dY - m dt),
    m = tr[(L^b + L^b†) rho], followed by Hermitian projection and trace
    renormalization.  Returns (new rho, m).
    """
    dy = np.asarray(dy, dtype=float)
    drift = lindblad_adjoint(lb, hb, rho)
    gain = lb @ rho + rho @ dagger(lb)
    m = _btrace(gain).real
    innov = dy - m * dt
    rho_new = rho + drift * dt + (gain - m[..., None, None] * rho) * innov[..., None, None]
    return _hermitize_normalize(rho_new), m


def count_step_arrays(rho: np.ndarray, dy, lb: np.ndarray, hb: np.ndarray, dt: float):
    """One counting filter step on (..., d, d) states.

    dY = 1: jump rho <- L^b rho L^b† / tr, then one no-jump drift step;
    dY = 0: rho <- rho + (L'rho - L^b rho L^b† + r rho) dt,
    r = tr(L^b† L^b rho).  Returns (new rho, r evaluated before the step).
    """
    dy = np.asarray(dy, dtype=float)
    lbd = dagger(lb)

    def no_jump(state):
        drift = lindblad_adjoint(lb, hb, state)
        jump_part = lb @ state @ lbd
        rate = _btrace(jump_part).real
        return state + (drift - jump_part + rate[..., None, None] * state) * dt

    jump_part = lb @ rho @ lbd
    rate = _btrace(jump_part).real
    mask = dy != 0.0
    if np.any(mask & (rate < JUMP_RATE_FLOOR)):
        raise JumpRateError("detection event in a state with vanishing jump rate")

    survived = no_jump(rho)
    if np.any(mask):
        safe_rate = np.where(rate < JUMP_RATE_FLOOR, 1.0, rate)
        jumped = no_jump(jump_part / safe_rate[..., None, None])
        rho_new = np.where(mask[..., None, None], jumped, survived)
    else:
        rho_new = survived
    return _hermitize_normalize(rho_new), rate


def _step_operators(model: HPModel, beta: CoherentInput, t: float):
    ops = modulated_operators(model, beta, t)
    return ops.Lbeta, ops.Hbeta_total


def quad_filter_step(
    state: FilterState, dy: float, model: HPModel, beta: CoherentInput, dt: float
) -> FilterState:
    lb, hb = _step_operators(model, beta, state.t)
    rho, _ = quad_step_arrays(state.rho, dy, lb, hb, dt)
    return FilterState(rho=rho, t=state.t + dt, log_norm=state.log_norm)


def count_filter_step(
    state: FilterState, dy: float, model: HPModel, beta: CoherentInput, dt: float
) -> FilterState:
    lb, hb = _step_operators(model, beta, state.t)
    rho, _ = count_step_arrays(state.rho, dy, lb, hb, dt)
    return FilterState(rho=rho, t=state.t + dt, log_norm=state.log_norm)


def zakai_log_norm_increment(
    state: FilterState,
    dy: float,
    model: HPModel,
    beta: CoherentInput,
    dt: float,
    kind: str,
    beta_min: float = COUNTING_BETA_MIN,
) -> float:
    """log of the per-step Zakai normalization factor.

    Quadrature: d sigma(1) = sigma(tildeL + tildeL†)(dY - (b + b*) dt), so the
    factor on the normalized state is 1 + (m - b - b*)(dY - (b + b*) dt).
    Counting: d sigma(1) = sigma(L^b† L^b - |b|^2)/|b|^2 (dY - |b|^2 dt), valid
    only for |b| >= beta_min.
    """
    b = beta.value(state.t)
    lb, hb = _step_operators(model, beta, state.t)
    if kind == QUADRATURE:
        gain = lb @ state.rho + state.rho @ dagger(lb)
        m = float(_btrace(gain).real)
        c = 2.0 * b.real
        factor = 1.0 + (m - c) * (dy - c * dt)
    elif kind == COUNTING:
        if abs(b) < beta_min:
            raise ValueError(
                f"counting-mode Zakai propagation requires |beta| >= {beta_min}"
            )
        rate = float(_btrace(lb @ state.rho @ dagger(lb)).real)
        a = abs(b) ** 2
        factor = 1.0 + (rate - a) / a * (dy - a * dt)
    else:
        raise ValueError(f"unknown measurement kind {kind!r}")
    if factor <= TRACE_UNDERFLOW:
        raise TraceUnderflowError(f"Zakai normalization factor {factor} underflowed")
    return float(np.log(factor))


def zakai_step(
    state: FilterState,
    dy: float,
    model: HPModel,
    beta: CoherentInput,
    dt: float,
    kind: str,
    beta_min: float = COUNTING_BETA_MIN,
) -> FilterState:
    """Propagate the unnormalized state in factorized (matrix, log_norm) form.

    The matrix part coincides with the normalized filter step, so the
    Kallianpur-Striebel relation pi = sigma / sigma(1) holds exactly at
    every step; the likelihood lives entirely in log_norm.
    """
    dlog = zakai_log_norm_increment(state, dy, model, beta, dt, kind, beta_min)
    if kind == QUADRATURE:
        stepped = quad_filter_step(state, dy, model, beta, dt)
    else:
        stepped = count_filter_step(state, dy, model, beta, dt)
    return replace(stepped, log_norm=state.log_norm + dlog)


def _draw_noise(rng: np.random.Generator, kind: str, grid: TimeGrid) -> np.ndarray:
    """Pre-drawn per-step randomness: Gaussian dI for quadrature, uniforms for counting."""
    if kind == QUADRATURE:
        return rng.standard_normal(grid.steps) * np.sqrt(grid.dt)
    return rng.random(grid.steps)


def _record_increment(kind: str, noise, intensity, dt: float):
    """Observation increment from pre-drawn noise and the filter's intensity.

    Quadrature: dY = dI + m dt with dI ~ N(0, dt); counting: dY ~ Bernoulli(r dt).
    Vectorized over a leading batch axis.
    """
    if kind == QUADRATURE:
        return noise + intensity * dt
    prob = intensity * dt
    if np.any(prob > MAX_JUMP_PROBABILITY):
        raise JumpRateError(
            f"jump probability {np.max(prob):.3g} exceeds bound {MAX_JUMP_PROBABILITY}"
        )
    return (noise < prob).astype(float)


def _intensity(kind: str, rho: np.ndarray, lb: np.ndarray):
    """Predictable compensator rate: m for quadrature, r for counting."""
    if kind == QUADRATURE:
        return _btrace(lb @ rho + rho @ dagger(lb)).real
    return _btrace(lb @ rho @ dagger(lb)).real


def simulate_record(
    model: HPModel,
    beta: CoherentInput,
    rho0: np.ndarray,
    kind: str,
    grid: TimeGrid,
    seed: int,
):
    """Generate a measurement record and the co-evolved filter states.

    Deterministic given (seed, grid, model); the filter states are the
    conditional states of the very record being generated.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown measurement kind {kind!r}")
    rng = np.random.default_rng(seed)
    noise = _draw_noise(rng, kind, grid)
    rho = np.asarray(rho0, dtype=complex)
    dt = grid.dt
    states = [FilterState(rho=rho, t=grid.t0)]
    increments = np.empty(grid.steps)
    for k in range(grid.steps):
        t = grid.t0 + k * dt
        lb, hb = _step_operators(model, beta, t)
        dy = _record_increment(kind, noise[k], _intensity(kind, rho, lb), dt)
        if kind == QUADRATURE:
            rho, _ = quad_step_arrays(rho, dy, lb, hb, dt)
        else:
            rho, _ = count_step_arrays(rho, dy, lb, hb, dt)
        increments[k] = dy
        states.append(FilterState(rho=rho, t=t + dt))
    record = MeasurementRecord(kind=kind, grid=grid, increments=increments)
    return record, states


def filter_record(
    model: HPModel, beta: CoherentInput, rho0: np.ndarray, record: MeasurementRecord
):
    """Replay the filter against a stored record.

    Uses the same stepping as simulate_record, so replaying a simulated
    record reproduces the co-evolved states exactly.
    """
    rho = np.asarray(rho0, dtype=complex)
    grid = record.grid
    dt = grid.dt
    states = [FilterState(rho=rho, t=grid.t0)]
    for k in range(grid.steps):
        t = grid.t0 + k * dt
        lb, hb = _step_operators(model, beta, t)
        if record.kind == QUADRATURE:
            rho, _ = quad_step_arrays(rho, record.increments[k], lb, hb, dt)
        else:
            rho, _ = count_step_arrays(rho, record.increments[k], lb, hb, dt)
        states.append(FilterState(rho=rho, t=t + dt))
    return states


def innovations(
    record: MeasurementRecord, states, model: HPModel, beta: CoherentInput
) -> InnovationsPath:
    """dI_k = dY_k - intensity(state before step k) dt."""
    grid = record.grid
    if len(states) != grid.steps + 1:
        raise ValueError("states are not aligned with the record")
    dt = grid.dt
    incs = np.empty(grid.steps)
    for k in range(grid.steps):
        t = grid.t0 + k * dt
        lb, _ = _step_operators(model, beta, t)
        incs[k] = record.increments[k] - float(_intensity(record.kind, states[k].rho, lb)) * dt
    return InnovationsPath(grid=grid, increments=incs)
