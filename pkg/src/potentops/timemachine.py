"""Superpositions of time evolutions realized as potent operators, and the
post-selected time-translation machine (effective evolution over
T' = sum_i c_i T_i, which may be zero or negative)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import (
    as_operator,
    as_state,
    basis_state,
    hermitian_exponential,
    require_hermitian,
    tensor_product,
)
from .pps import PotentOperator, PrePostSelection, potent_operator

COEFF_SUM_TOL = 1e-12
EMPTY_STATE_TOL = 1e-14


@dataclass(frozen=True)
class EvolutionFamily:
    """Hamiltonians H(a_i) indexed by real parameters, each applied for the
    same duration T. Repeated parameters are allowed (a degenerate family
    collapses to a single evolution)."""

    parameters: tuple
    generator: Callable[[float], np.ndarray]
    duration: float

    def __post_init__(self):
        params = tuple(float(a) for a in self.parameters)
        if len(params) == 0:
            raise ValueError("need at least one parameter")
        if not self.duration >= 0:
            raise ValueError("duration must be >= 0")
        object.__setattr__(self, "parameters", params)
        for a in params:
            require_hermitian(self.generator(a), name=f"H({a})")

    @classmethod
    def from_matrices(cls, parameters, matrices, duration: float) -> "EvolutionFamily":
        """Family defined only at the listed parameters, by lookup."""
        params = tuple(float(a) for a in parameters)
        mats = [as_operator(m) for m in matrices]
        if len(params) != len(mats):
            raise ValueError(f"{len(params)} parameters but {len(mats)} matrices")

        def lookup(a: float) -> np.ndarray:
            for p, m in zip(params, mats):
                if abs(a - p) <= 1e-12:
                    return m
            raise KeyError(f"generator defined only at {params}, not {a}")

        return cls(parameters=params, generator=lookup, duration=duration)

    def branch_unitaries(self) -> list[np.ndarray]:
        return [hermitian_exponential(self.generator(a), -1j * self.duration)
                for a in self.parameters]


@dataclass(frozen=True)
class SuperpositionSpec:
    """Superposition coefficients with the sum-to-one convention that makes
    the post-selected construction reproduce sum_i c_i U_i exactly."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-D sequence")
        total = complex(np.sum(c))
        if abs(total - 1.0) > COEFF_SUM_TOL:
            raise ValueError(f"coefficients sum to {total}, not 1")
        object.__setattr__(self, "coefficients", c)

    def __len__(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class TimeTranslationSpec:
    """One Hamiltonian run for several durations T_i, superposed with
    coefficients c_i; the effective duration is sum_i c_i T_i."""

    durations: tuple
    coefficients: SuperpositionSpec
    hamiltonian: np.ndarray

    def __post_init__(self):
        ts = tuple(float(t) for t in self.durations)
        if len(ts) != len(self.coefficients):
            raise ValueError(f"{len(ts)} durations but {len(self.coefficients)} coefficients")
        object.__setattr__(self, "durations", ts)
        object.__setattr__(self, "hamiltonian", require_hermitian(self.hamiltonian, name="H"))

    @property
    def effective_duration(self) -> float:
        total = complex(np.dot(self.coefficients.coefficients, self.durations))
        if abs(total.imag) > 1e-12:
            raise ValueError(f"effective duration {total} is not real")
        return total.real


def superposed_evolution(family: EvolutionFamily, spec: SuperpositionSpec, Phi: np.ndarray):
    """sum_i c_i exp(-i H(a_i) T)|Phi>, unnormalized, plus its norm.

    The squared norm is the probability cost of realizing the superposition by
    post-selection.
    """
    if len(spec) != len(family.parameters):
        raise ValueError(f"{len(family.parameters)} parameters but {len(spec)} coefficients")
    Phi = as_state(Phi)
    if abs(np.linalg.norm(Phi) - 1.0) > 1e-10:
        raise ValueError("Phi must be normalized")
    state = sum(c * (u @ Phi)
                for c, u in zip(spec.coefficients, family.branch_unitaries()))
    return state, float(np.linalg.norm(state))


def control_register_unitary(branch_unitaries) -> np.ndarray:
    """sum_i |i><i| (x) U_i: a control register steering which evolution runs."""
    unis = [as_operator(u) for u in branch_unitaries]
    n = len(unis)
    da = unis[0].shape[0]
    joint = np.zeros((n * da, n * da), dtype=complex)
    for i, u in enumerate(unis):
        proj = np.outer(basis_state(n, i), basis_state(n, i).conj())
        joint += tensor_product(proj, u)
    return joint


def _superposition_selection(spec: SuperpositionSpec) -> PrePostSelection:
    n = len(spec)
    psi = spec.coefficients / np.linalg.norm(spec.coefficients)
    phi = np.ones(n, dtype=complex) / np.sqrt(n)
    return PrePostSelection(psi=psi, phi=phi)


def potent_time_superposition(family: EvolutionFamily, spec: SuperpositionSpec) -> PotentOperator:
    """Realize sum_i c_i exp(-i H(a_i) T) as the potent operator of a control
    register pre-selected along the coefficients and post-selected on the
    uniform superposition.

    The selection ratio is scale invariant, so normalizing the pre-selected
    state internally still reproduces the coefficient sum exactly (this is
    where sum_i c_i = 1 matters).
    """
    if len(spec) != len(family.parameters):
        raise ValueError(f"{len(family.parameters)} parameters but {len(spec)} coefficients")
    joint = control_register_unitary(family.branch_unitaries())
    sel = _superposition_selection(spec)
    return potent_operator(joint, sel, tag=f"time superposition, {len(spec)} branches")


def effective_parameter_fit(family: EvolutionFamily, spec: SuperpositionSpec,
                            Phi: np.ndarray, interval):
    """Search for the single parameter a' whose evolution best matches the
    superposed one, maximizing |<Phi_target(a')|Phi_super>| over the interval.

    A 1000-point scan brackets the optimum and golden-section refines it. When
    the magnitude objective is flat (phase-only action, e.g. eigenstate
    meters), the refinement switches to the real part of the overlap, which
    picks the a' whose phase matches; the reported fidelity is still the
    phase-invariant magnitude. No claim that the fidelity is near 1 in general.
    """
    a_lo, a_hi = (float(interval[0]), float(interval[1]))
    if not (np.isfinite(a_lo) and np.isfinite(a_hi) and a_hi > a_lo):
        raise ValueError(f"bad search interval [{a_lo}, {a_hi}]")
    state, success = superposed_evolution(family, spec, Phi)
    if success <= EMPTY_STATE_TOL:
        raise ValueError("superposed state is numerically zero; nothing to fit")
    super_state = state / success
    Phi = as_state(Phi)

    def overlap(a: float) -> complex:
        target = hermitian_exponential(family.generator(a), -1j * family.duration) @ Phi
        return complex(np.vdot(target, super_state))

    grid = np.linspace(a_lo, a_hi, 1000)
    overlaps = np.array([overlap(a) for a in grid])
    mags = np.abs(overlaps)
    flat = mags.max() - mags.min() <= 1e-12
    if flat:
        objective = lambda a: overlap(a).real
        best = int(np.argmax(overlaps.real))
    else:
        objective = lambda a: abs(overlap(a))
        best = int(np.argmax(mags))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    a_star = _golden_section_max(objective, lo, hi)
    return a_star, abs(overlap(a_star))


def _golden_section_max(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    ratio = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - ratio * (b - a), a + ratio * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    return (a + b) / 2


def time_translation_machine(spec: TimeTranslationSpec, Phi: np.ndarray):
    """Superpose evolutions of one Hamiltonian over durations T_i.

    Returns (unnormalized state, T', fidelity against exp(-i H T')|Phi>,
    success norm). T' = sum_i c_i T_i may be negative: post-selection can
    steer the meter toward its past.
    """
    Phi = as_state(Phi)
    if abs(np.linalg.norm(Phi) - 1.0) > 1e-10:
        raise ValueError("Phi must be normalized")
    branch = [hermitian_exponential(spec.hamiltonian, -1j * t) for t in spec.durations]
    state = sum(c * (u @ Phi) for c, u in zip(spec.coefficients.coefficients, branch))
    success = float(np.linalg.norm(state))
    t_eff = spec.effective_duration
    if success <= EMPTY_STATE_TOL:
        raise ValueError("superposed state is numerically zero")
    target = hermitian_exponential(spec.hamiltonian, -1j * t_eff) @ Phi
    fid = float(abs(np.vdot(target, state)) / success)
    return state, t_eff, fid, success


def time_machine_control_unitary(spec: TimeTranslationSpec) -> np.ndarray:
    """Control-register unitary whose potent operator is the time machine."""
    branch = [hermitian_exponential(spec.hamiltonian, -1j * t) for t in spec.durations]
    return control_register_unitary(branch)


def time_machine_selection(spec: TimeTranslationSpec) -> PrePostSelection:
    """The pre/post-selection realizing the machine on the control register."""
    return _superposition_selection(spec.coefficients)
