"""Weak values, modular values, potent values, and potent operators for
pre- and post-selected systems.

Every reduction in this module (weak-coupling limit, qubit-meter formulas,
conditional-unitary forms) can be cross-checked against
:func:`joint_evolve_and_postselect`, the brute-force evolve-then-project
oracle. The tests do exactly that; nothing here trusts a shortcut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import (
    as_operator,
    as_state,
    basis_state,
    general_exponential,
    hermitian_exponential,
    inner_product,
    normalize,
    partial_matrix_element,
    require_hermitian,
    require_orthonormal_basis,
    require_unitary,
    tensor_product,
)

EPS_OVERLAP = 1e-10
NORMALIZED_TOL = 1e-10
WEAK_SUM_TOL = 1e-12
PROJECTOR_TOL = 1e-10


class OrthogonalSelectionError(ValueError):
    """Pre- and post-selected states are (numerically) orthogonal, so
    selection-conditioned values are undefined."""


def _require_normalized(v: np.ndarray, name: str) -> np.ndarray:
    v = as_state(v)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > NORMALIZED_TOL:
        raise ValueError(f"{name} must be normalized (norm = {n!r})")
    return v


@dataclass(frozen=True)
class PrePostSelection:
    """A pre-selected state psi and post-selected state phi on the system.

    Neither state needs to be normalized: all selection-conditioned values are
    invariant under rescaling of psi or phi. Construction fails when the
    overlap <phi|psi> is below eps_overlap, where amplified values stop being
    numerically meaningful.
    """

    psi: np.ndarray
    phi: np.ndarray
    eps_overlap: float = EPS_OVERLAP
    overlap: complex = field(init=False)

    def __post_init__(self):
        psi, phi = as_state(self.psi), as_state(self.phi)
        if psi.size != phi.size:
            raise ValueError(f"psi dim {psi.size} != phi dim {phi.size}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)
        ov = inner_product(phi, psi)
        if abs(ov) <= self.eps_overlap:
            raise OrthogonalSelectionError(
                f"|<phi|psi>| = {abs(ov):.3e} <= {self.eps_overlap:.1e}; "
                "weak/modular/potent values need non-orthogonal selections"
            )
        object.__setattr__(self, "overlap", ov)

    @property
    def dim(self) -> int:
        return self.psi.size


@dataclass(frozen=True)
class CouplingSpec:
    """Impulsive coupling g * A (x) P between a system observable A and an
    apparatus observable P."""

    g: float
    A: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.g):
            raise ValueError("coupling strength g must be finite")
        object.__setattr__(self, "A", require_hermitian(self.A, name="A"))
        object.__setattr__(self, "P", require_hermitian(self.P, name="P"))

    def joint_unitary(self) -> np.ndarray:
        """exp(-i g A (x) P) on the system-major joint space."""
        return hermitian_exponential(tensor_product(self.A, self.P), -1j * self.g)


@dataclass(frozen=True)
class PotentValueSet:
    """The complex coefficients the selected system imprints on the apparatus,
    one per apparatus basis vector."""

    basis: np.ndarray          # columns are the apparatus basis vectors
    values: np.ndarray
    selection: PrePostSelection
    meter_state: np.ndarray


@dataclass(frozen=True)
class PotentOperator:
    """<phi|U|psi>/<phi|psi>: the generally non-unitary operator the selected
    system applies to the apparatus."""

    matrix: np.ndarray
    selection: PrePostSelection
    joint_unitary_tag: str = ""

    def apply(self, Phi: np.ndarray) -> np.ndarray:
        return self.matrix @ as_state(Phi)


def weak_value(A: np.ndarray, sel: PrePostSelection) -> complex:
    """<phi|A|psi> / <phi|psi>; complex in general, unbounded by A's spectrum."""
    A = as_operator(A)
    if A.shape[0] != sel.dim:
        raise ValueError(f"operator dim {A.shape[0]} != selection dim {sel.dim}")
    return complex(np.vdot(sel.phi, A @ sel.psi)) / sel.overlap


def modular_value(A: np.ndarray, g: float, sel: PrePostSelection) -> complex:
    """<phi|exp(-i g A)|psi> / <phi|psi> for Hermitian A."""
    A = require_hermitian(A, name="A")
    if A.shape[0] != sel.dim:
        raise ValueError(f"operator dim {A.shape[0]} != selection dim {sel.dim}")
    u = hermitian_exponential(A, -1j * g)
    return complex(np.vdot(sel.phi, u @ sel.psi)) / sel.overlap


def joint_evolve_and_postselect(U: np.ndarray, psi: np.ndarray, Phi: np.ndarray,
                                phi: np.ndarray, check_unitary: bool = True):
    """Evolve |psi>(x)|Phi> under U and project the system onto <phi|.

    Returns the unnormalized apparatus state (<phi| (x) I) U (|psi> (x) |Phi>)
    and its squared norm, the exact post-selection probability. This is the
    oracle every reduction in the package is checked against.
    """
    U = as_operator(U)
    psi = _require_normalized(psi, "psi")
    phi = _require_normalized(phi, "phi")
    Phi = _require_normalized(Phi, "Phi")
    ds, da = psi.size, Phi.size
    if phi.size != ds:
        raise ValueError(f"phi dim {phi.size} != psi dim {ds}")
    if U.shape[0] != ds * da:
        raise ValueError(f"joint dim {U.shape[0]} != {ds} * {da}")
    if check_unitary:
        require_unitary(U, name="joint evolution")
    evolved = (U @ tensor_product(psi, Phi)).reshape(ds, da)
    apparatus = phi.conj() @ evolved
    p_exact = float(np.linalg.norm(apparatus) ** 2)
    return apparatus, p_exact


def postselection_probability_weak(coupling: CouplingSpec, sel: PrePostSelection,
                                   Phi: np.ndarray, literal_system_expectation: bool = False):
    """First-order and exact post-selection probabilities for exp(-i g A (x) P).

    The first-order formula is |<phi|psi>|^2 (1 + 2 g Im(A_w) <P>), with
    <P> = <Phi|P|Phi> by default. ``literal_system_expectation`` switches to
    <psi|P|psi>, which only makes sense when system and apparatus dimensions
    coincide, and is exposed purely for comparison.
    """
    psi = _require_normalized(sel.psi, "psi")
    phi = _require_normalized(sel.phi, "phi")
    Phi = _require_normalized(Phi, "Phi")
    if literal_system_expectation:
        if coupling.P.shape[0] != psi.size:
            raise ValueError(
                "literal <psi|P|psi> needs system and apparatus dims to match; "
                f"got {psi.size} and {coupling.P.shape[0]}"
            )
        p_expect = float(np.vdot(psi, coupling.P @ psi).real)
    else:
        p_expect = float(np.vdot(Phi, coupling.P @ Phi).real)
    a_w = weak_value(coupling.A, sel)
    ov2 = abs(sel.overlap) ** 2
    p_first_order = ov2 * (1.0 + 2.0 * coupling.g * a_w.imag * p_expect)
    _, p_exact = joint_evolve_and_postselect(
        coupling.joint_unitary(), psi, Phi, phi, check_unitary=False)
    return p_first_order, p_exact


def kraus_slices(U: np.ndarray, Phi: np.ndarray, basis: np.ndarray) -> list[np.ndarray]:
    """System-side slices <k|U|Phi> over a complete orthonormal apparatus basis.

    For unitary U they satisfy sum_k A_k^dag A_k = I.
    """
    U = as_operator(U)
    Phi = _require_normalized(Phi, "Phi")
    basis = require_orthonormal_basis(basis)
    da = basis.shape[0]
    if Phi.size != da:
        raise ValueError(f"Phi dim {Phi.size} != basis dim {da}")
    if U.shape[0] % da != 0:
        raise ValueError(f"joint dim {U.shape[0]} not divisible by apparatus dim {da}")
    ds = U.shape[0] // da
    u4 = U.reshape(ds, da, ds, da)
    stacked = np.einsum("ak,satb,b->kst", basis.conj(), u4, Phi)
    return list(stacked)


def potent_values(U: np.ndarray, Phi: np.ndarray, basis: np.ndarray,
                  sel: PrePostSelection) -> PotentValueSet:
    """<phi|A_k|psi> / <phi|psi> for every Kraus slice A_k = <k|U|Phi>."""
    slices = np.asarray(kraus_slices(U, Phi, basis))
    if slices.shape[1] != sel.dim:
        raise ValueError(f"system dim {slices.shape[1]} != selection dim {sel.dim}")
    values = np.einsum("s,kst,t->k", sel.phi.conj(), slices, sel.psi) / sel.overlap
    return PotentValueSet(basis=np.asarray(basis, dtype=complex), values=values,
                          selection=sel, meter_state=as_state(Phi))


def apparatus_state_from_potent_values(pvs: PotentValueSet) -> np.ndarray:
    """Normalized apparatus state sum_k value_k |k>, phase-canonicalized."""
    state = pvs.basis @ pvs.values
    if np.linalg.norm(pvs.values) <= linalg.ZERO_NORM_TOL:
        raise ValueError("all potent values vanish: post-selection probability is zero")
    return normalize(state)


def weak_limit_potent_values(coupling: CouplingSpec, Phi: np.ndarray, basis: np.ndarray,
                             sel: PrePostSelection):
    """First-order-in-g approximations to the potent values and final state.

    Per basis vector: <k|Phi> * exp(-i g A_w P_w(k|Phi)), where P_w(k|Phi) is
    the weak value of P pre-selected on Phi and post-selected on |k>; basis
    vectors with |<k|Phi>| <= 1e-12 get the value 0 (P_w is undefined there).
    The approximate final state is exp(-i g A_w P)|Phi>, normalized; A_w is
    complex in general so the generator is not anti-Hermitian.
    """
    Phi = _require_normalized(Phi, "Phi")
    basis = require_orthonormal_basis(basis)
    a_w = weak_value(coupling.A, sel)
    meter_amps = basis.conj().T @ Phi
    p_amps = basis.conj().T @ (coupling.P @ Phi)
    values = np.zeros(basis.shape[1], dtype=complex)
    significant = np.abs(meter_amps) > 1e-12
    p_w = p_amps[significant] / meter_amps[significant]
    values[significant] = meter_amps[significant] * np.exp(-1j * coupling.g * a_w * p_w)
    state = general_exponential(coupling.P, -1j * coupling.g * a_w) @ Phi
    return values, normalize(state)


def potent_operator(U: np.ndarray, sel: PrePostSelection, tag: str = "") -> PotentOperator:
    """<phi|U|psi> / <phi|psi> as an operator on the apparatus factor."""
    U = as_operator(U)
    if U.shape[0] % sel.dim != 0:
        raise ValueError(f"joint dim {U.shape[0]} not divisible by system dim {sel.dim}")
    matrix = partial_matrix_element(U, sel.phi, sel.psi, "system") / sel.overlap
    if not tag:
        tag = f"joint unitary on {sel.dim}x{U.shape[0] // sel.dim}"
    return PotentOperator(matrix=matrix, selection=sel, joint_unitary_tag=tag)


def potent_completeness_residual(U: np.ndarray, phi: np.ndarray, basis: np.ndarray) -> float:
    """Deviation from sum_n |<phi|psi_n>|^2 U_P(phi|psi_n) U_P(phi|psi_n)^dag = I.

    Each term is evaluated in the overlap-free form <phi|U|psi_n><psi_n|U^dag|phi>,
    so orthogonal selections contribute cleanly. Returns the max-entry residual,
    which is <= 1e-10 for any unitary U and complete orthonormal {psi_n}.
    """
    U = require_unitary(U, name="joint evolution")
    phi = _require_normalized(phi, "phi")
    basis = require_orthonormal_basis(basis)
    ds = basis.shape[0]
    if phi.size != ds:
        raise ValueError(f"phi dim {phi.size} != basis dim {ds}")
    da = U.shape[0] // ds
    if ds * da != U.shape[0]:
        raise ValueError(f"joint dim {U.shape[0]} not divisible by system dim {ds}")
    total = np.zeros((da, da), dtype=complex)
    for n in range(basis.shape[1]):
        m_n = partial_matrix_element(U, phi, basis[:, n], "system")
        total += m_n @ m_n.conj().T
    return float(np.max(np.abs(total - np.eye(da))))


def _require_projector_decomposition(projectors, dim: int, name: str) -> list[np.ndarray]:
    projs = [as_operator(p) for p in projectors]
    if not projs:
        raise ValueError(f"{name}: need at least one projector")
    for p in projs:
        if p.shape[0] != dim:
            raise ValueError(f"{name}: projector dim {p.shape[0]} != {dim}")
        if linalg.hermiticity_defect(p) > PROJECTOR_TOL:
            raise ValueError(f"{name}: projector is not Hermitian")
    for i, p in enumerate(projs):
        for j, q in enumerate(projs):
            product = p @ q
            expected = p if i == j else 0.0
            if np.max(np.abs(product - expected)) > PROJECTOR_TOL:
                raise ValueError(f"{name}: projectors {i},{j} violate P_i P_j = delta_ij P_i")
    if np.max(np.abs(sum(projs) - np.eye(dim))) > PROJECTOR_TOL:
        raise ValueError(f"{name}: projectors do not sum to the identity")
    return projs


def potent_operator_system_controlled(projectors, unitaries, sel: PrePostSelection):
    """Potent operator of U = sum_n Pi_n (x) U_n: the weak values of the
    control projectors weight the branch unitaries.

    Returns (PotentOperator, list of <Pi_n>_w). The weak values of a complete
    projector family sum to 1; that is verified to 1e-12 here.
    """
    projs = _require_projector_decomposition(projectors, sel.dim, "system projectors")
    unis = [require_unitary(u, name=f"U_{n}") for n, u in enumerate(unitaries)]
    if len(unis) != len(projs):
        raise ValueError(f"{len(projs)} projectors but {len(unis)} unitaries")
    da = unis[0].shape[0]
    if any(u.shape[0] != da for u in unis):
        raise ValueError("apparatus unitaries must share one dimension")
    weak_vals = [weak_value(p, sel) for p in projs]
    total = sum(weak_vals)
    if abs(total - 1.0) > WEAK_SUM_TOL:
        raise ValueError(f"projector weak values sum to {total}, not 1")
    matrix = sum(w * u for w, u in zip(weak_vals, unis))
    op = PotentOperator(matrix=matrix, selection=sel,
                        joint_unitary_tag=f"system-controlled, {len(projs)} blocks")
    return op, weak_vals


def potent_operator_apparatus_controlled(generators, projectors, lam: float,
                                         sel: PrePostSelection):
    """Potent operator of U = sum_n exp(-i lam A_n) (x) P_n: the modular values
    of the branch generators weight the apparatus projectors.

    Returns (PotentOperator, list of <A_n>_M).
    """
    gens = [require_hermitian(a, name=f"A_{n}") for n, a in enumerate(generators)]
    if any(a.shape[0] != sel.dim for a in gens):
        raise ValueError("system generators must match the selection dimension")
    if not projectors:
        raise ValueError("need at least one apparatus projector")
    da = as_operator(projectors[0]).shape[0]
    projs = _require_projector_decomposition(projectors, da, "apparatus projectors")
    if len(gens) != len(projs):
        raise ValueError(f"{len(projs)} projectors but {len(gens)} generators")
    modular_vals = [modular_value(a, lam, sel) for a in gens]
    matrix = sum(m * p for m, p in zip(modular_vals, projs))
    op = PotentOperator(matrix=matrix, selection=sel,
                        joint_unitary_tag=f"apparatus-controlled, {len(projs)} blocks")
    return op, modular_vals


def system_controlled_unitary(projectors, unitaries) -> np.ndarray:
    """Assemble sum_n Pi_n (x) U_n on the joint space."""
    return sum(tensor_product(as_operator(p), as_operator(u))
               for p, u in zip(projectors, unitaries))


def apparatus_controlled_unitary(generators, projectors, lam: float) -> np.ndarray:
    """Assemble sum_n exp(-i lam A_n) (x) P_n on the joint space."""
    return sum(tensor_product(hermitian_exponential(a, -1j * lam), as_operator(p))
               for a, p in zip(generators, projectors))


def computational_basis(dim: int) -> np.ndarray:
    """Identity matrix viewed as basis columns."""
    return np.eye(dim, dtype=complex)


__all__ = [
    "EPS_OVERLAP",
    "OrthogonalSelectionError",
    "PrePostSelection",
    "CouplingSpec",
    "PotentValueSet",
    "PotentOperator",
    "weak_value",
    "modular_value",
    "joint_evolve_and_postselect",
    "postselection_probability_weak",
    "kraus_slices",
    "potent_values",
    "apparatus_state_from_potent_values",
    "weak_limit_potent_values",
    "potent_operator",
    "potent_completeness_residual",
    "potent_operator_system_controlled",
    "potent_operator_apparatus_controlled",
    "system_controlled_unitary",
    "apparatus_controlled_unitary",
    "computational_basis",
    "basis_state",
]
