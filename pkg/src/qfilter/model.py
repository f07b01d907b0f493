"""The system model: (S, L, H) triple, coherent input, modulated operators.

S is the scattering unitary, L the coupling (units time^-1/2), H the
Hamiltonian (units time^-1).  The coherent input amplitude beta(t) carries
units time^-1/2, so all generator terms scale as time^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    as_operator,
    check_dims,
    commutator,
    dagger,
    is_hermitian,
    is_unitary,
)


@dataclass(frozen=True)
class HPModel:
    """System triple (S, L, H) on a dim-dimensional Hilbert space."""

    S: np.ndarray
    L: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        s = as_operator(self.S)
        l = as_operator(self.L)
        h = as_operator(self.H)
        check_dims(s, l, h)
        if not is_unitary(s, 1e-9):
            raise ValueError("S is not unitary within tolerance")
        if not is_hermitian(h, 1e-9):
            raise ValueError("H is not Hermitian within tolerance")
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "L", l)
        object.__setattr__(self, "H", h)

    @property
    def dim(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class CoherentInput:
    """Coherent-state amplitude beta(t).

    kind is one of "constant", "samples" (piecewise constant on a uniform
    grid, left endpoints) or "sinusoid" (a * exp(i omega t) + c).
    """

    kind: str
    value_const: complex = 0.0
    amplitude: complex = 0.0
    frequency: float = 0.0
    offset: complex = 0.0
    t0: float = 0.0
    sample_dt: float = 0.0
    samples: tuple = ()

    @classmethod
    def constant(cls, value: complex) -> "CoherentInput":
        return cls(kind="constant", value_const=complex(value))

    @classmethod
    def vacuum(cls) -> "CoherentInput":
        return cls.constant(0.0)

    @classmethod
    def sinusoid(cls, amplitude: complex, frequency: float, offset: complex = 0.0) -> "CoherentInput":
        return cls(
            kind="sinusoid",
            amplitude=complex(amplitude),
            frequency=float(frequency),
            offset=complex(offset),
        )

    @classmethod
    def piecewise(cls, t0: float, sample_dt: float, samples) -> "CoherentInput":
        samples = tuple(complex(v) for v in samples)
        if sample_dt <= 0 or not samples:
            raise ValueError("piecewise input needs sample_dt > 0 and samples")
        return cls(kind="samples", t0=float(t0), sample_dt=float(sample_dt), samples=samples)

    def value(self, t: float) -> complex:
        if self.kind == "constant":
            return self.value_const
        if self.kind == "sinusoid":
            return self.amplitude * np.exp(1j * self.frequency * t) + self.offset
        if self.kind == "samples":
            idx = int(np.floor((t - self.t0) / self.sample_dt))
            idx = min(max(idx, 0), len(self.samples) - 1)
            return self.samples[idx]
        raise ValueError(f"unknown coherent input kind {self.kind!r}")


@dataclass(frozen=True)
class ModulatedOperators:
    """Effective coupling and total Hamiltonian at a fixed time."""

    Lbeta: np.ndarray
    Hbeta_total: np.ndarray


def modulated_coupling(model: HPModel, beta: CoherentInput, t: float) -> np.ndarray:
    """L^beta(t) = S beta(t) + L."""
    return model.S * beta.value(t) + model.L


def modulated_hamiltonian(model: HPModel, beta: CoherentInput, t: float) -> np.ndarray:
    """H + (1/2i)(beta L†S - beta* S†L).

    The S factors are forced by matching the Lindblad form of the
    coherent-state generator against the Evans-Hudson sum; for S = I this
    reduces to H + (1/2i)(beta L† - beta* L).
    """
    b = beta.value(t)
    cross = b * (dagger(model.L) @ model.S) - np.conj(b) * (dagger(model.S) @ model.L)
    return model.H + cross / 2j


def modulated_operators(model: HPModel, beta: CoherentInput, t: float) -> ModulatedOperators:
    return ModulatedOperators(
        Lbeta=modulated_coupling(model, beta, t),
        Hbeta_total=modulated_hamiltonian(model, beta, t),
    )


def evans_hudson(model: HPModel, index: tuple, x: np.ndarray) -> np.ndarray:
    """The four coefficient maps of the quantum Langevin equation."""
    x = as_operator(x)
    check_dims(x, model.S)
    s, l, h = model.S, model.L, model.H
    if index == (1, 1):
        return dagger(s) @ x @ s - x
    if index == (1, 0):
        return dagger(s) @ commutator(x, l)
    if index == (0, 1):
        return commutator(dagger(l), x) @ s
    if index == (0, 0):
        return lindblad_heisenberg(l, h, x)
    raise ValueError(f"invalid Evans-Hudson index {index!r}")


def lindblad_heisenberg(l: np.ndarray, h: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(1/2) L†[X, L] + (1/2)[L†, X] L - i[X, H]."""
    ld = dagger(l)
    return 0.5 * ld @ commutator(x, l) + 0.5 * commutator(ld, x) @ l - 1j * commutator(x, h)


def heisenberg_generator(model: HPModel, beta: CoherentInput, t: float, x: np.ndarray) -> np.ndarray:
    """L_00 X + beta* L_10 X + beta L_01 X + |beta|^2 L_11 X."""
    b = beta.value(t)
    out = evans_hudson(model, (0, 0), x)
    if b != 0:
        out = (
            out
            + np.conj(b) * evans_hudson(model, (1, 0), x)
            + b * evans_hudson(model, (0, 1), x)
            + abs(b) ** 2 * evans_hudson(model, (1, 1), x)
        )
    return out


def lindblad_adjoint(l: np.ndarray, h: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """-i[H, rho] + L rho L† - (1/2){L†L, rho}.

    Accepts batched rho of shape (..., d, d).
    """
    ld = dagger(l)
    ldl = ld @ l
    return -1j * (h @ rho - rho @ h) + l @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl)


def adjoint_generator(model: HPModel, beta: CoherentInput, t: float, rho: np.ndarray) -> np.ndarray:
    """Schroedinger-picture generator dual to heisenberg_generator.

    L'rho = -i[H^beta, rho] + L^beta rho L^beta† - (1/2){L^beta† L^beta, rho}.
    """
    ops = modulated_operators(model, beta, t)
    return lindblad_adjoint(ops.Lbeta, ops.Hbeta_total, np.asarray(rho, dtype=complex))
