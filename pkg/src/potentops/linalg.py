"""Dense complex linear algebra substrate: tensor products, Hermitian and
general matrix exponentials, partial matrix elements, and normalization.

Conventions used throughout the package:

- States are 1-D complex ndarrays, operators are square 2-D complex ndarrays.
- Planck's constant is 1; Hamiltonians and couplings are dimensionless.
- Composite indices are system-major: the joint index of (system s, apparatus a)
  is ``s * apparatus_dim + a``, matching ``np.kron(system, apparatus)``.
- Global-phase canonicalization happens only in :func:`normalize` (the
  comparison convention), never inside the algebraic operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
ZERO_NORM_TOL = 1e-14
PHASE_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10

# exp(scale * M) is refused beyond this 1-norm; scaling-and-squaring loses
# accuracy and overflow sets in well before double-precision infinities.
EXP_NORM_CAP = 128.0


@dataclass(frozen=True)
class JointSpace:
    """Bipartite space of dimension system_dim * apparatus_dim, system-major."""

    system_dim: int
    apparatus_dim: int

    def __post_init__(self):
        if self.system_dim < 1 or self.apparatus_dim < 1:
            raise ValueError("factor dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.system_dim * self.apparatus_dim

    def flat_index(self, s: int, a: int) -> int:
        return s * self.apparatus_dim + a


def as_state(v) -> np.ndarray:
    """Coerce to a 1-D complex state vector."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"state must be a 1-D vector, got shape {v.shape}")
    return v


def as_operator(m) -> np.ndarray:
    """Coerce to a square 2-D complex operator."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    m = as_operator(m)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL, name: str = "operator") -> np.ndarray:
    m = as_operator(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"{name} is not Hermitian (max |M - M^dag| = {defect:.3e} > {tol:.1e})")
    return m


def unitarity_defect(m: np.ndarray) -> float:
    m = as_operator(m)
    eye = np.eye(m.shape[0])
    return float(np.max(np.abs(m.conj().T @ m - eye)))


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_defect(m) <= tol


def require_unitary(m: np.ndarray, tol: float = UNITARY_TOL, name: str = "operator") -> np.ndarray:
    m = as_operator(m)
    defect = unitarity_defect(m)
    if defect > tol:
        raise ValueError(f"{name} is not unitary (max |U^dag U - I| = {defect:.3e} > {tol:.1e})")
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    """(M + M^dag)/2; exactly Hermitian in floating point."""
    m = as_operator(m)
    return (m + m.conj().T) / 2


def tensor_product(x, y) -> np.ndarray:
    """Kronecker product of two states or two operators (system-major order)."""
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    if x.ndim == 1 and y.ndim == 1:
        return np.kron(as_state(x), as_state(y))
    if x.ndim == 2 and y.ndim == 2:
        return np.kron(as_operator(x), as_operator(y))
    raise ValueError(
        f"tensor_product needs two states or two operators, got ndim {x.ndim} and {y.ndim}"
    )


def hermitian_exponential(h: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H, via eigendecomposition.

    Unitary (to tolerance) whenever scale is purely imaginary. The scale may be
    any complex number; the spectrum is exponentiated directly.
    """
    h = require_hermitian(h, name="exponential generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def hermitian_exponentials(h: np.ndarray, scales) -> list[np.ndarray]:
    """exp(scale * H) for several scales, sharing one eigendecomposition."""
    h = require_hermitian(h, name="exponential generator")
    w, v = np.linalg.eigh(h)
    vd = v.conj().T
    return [(v * np.exp(s * w)) @ vd for s in np.asarray(scales, dtype=complex)]


def general_exponential(m: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * M) for an arbitrary square M (scaling-and-squaring Pade).

    Rejects arguments with 1-norm above EXP_NORM_CAP, where the rational
    approximation degrades.
    """
    m = as_operator(m)
    scaled = scale * m
    norm = float(np.linalg.norm(scaled, 1))
    if not np.isfinite(norm) or norm > EXP_NORM_CAP:
        raise ValueError(f"1-norm of scale*M is {norm:.3e}, above the cap {EXP_NORM_CAP}")
    return scipy.linalg.expm(scaled)


def partial_matrix_element(u: np.ndarray, bra: np.ndarray, ket: np.ndarray, factor: str) -> np.ndarray:
    """Contract a joint operator with <bra| ... |ket> on the named factor.

    ``factor`` names the factor bra and ket live on; the result acts on the
    other factor. With factor="system" and (bra, ket) = (phi, psi) this is
    <phi|U|psi>, an operator on the apparatus; with factor="apparatus" and
    (bra, ket) = (k, Phi) it is the Kraus slice <k|U|Phi> on the system.
    Linear in U, conjugate-linear in bra, linear in ket.
    """
    u = as_operator(u)
    bra, ket = as_state(bra), as_state(ket)
    if bra.size != ket.size:
        raise ValueError(f"bra dim {bra.size} != ket dim {ket.size}")
    n = u.shape[0]
    d = bra.size
    if n % d != 0:
        raise ValueError(f"joint dim {n} is not divisible by factor dim {d}")
    other = n // d
    if factor == "system":
        u4 = u.reshape(d, other, d, other)
        return np.einsum("s,satb,t->ab", bra.conj(), u4, ket)
    if factor == "apparatus":
        u4 = u.reshape(other, d, other, d)
        return np.einsum("a,satb,b->st", bra.conj(), u4, ket)
    raise ValueError(f"factor must be 'system' or 'apparatus', got {factor!r}")


def inner_product(u: np.ndarray, v: np.ndarray) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    u, v = as_state(u), as_state(v)
    if u.size != v.size:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    return complex(np.vdot(u, v))


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(as_state(v)))


def normalize(v: np.ndarray) -> np.ndarray:
    """Unit-norm copy with the comparison phase convention applied.

    The first amplitude of modulus > PHASE_TOL is made real and positive, so
    normalize(lam * v) == normalize(v) for any nonzero complex lam.
    """
    v = as_state(v)
    n = np.linalg.norm(v)
    if n <= ZERO_NORM_TOL:
        raise ValueError("cannot normalize a (numerically) zero vector")
    u = v / n
    sig = np.flatnonzero(np.abs(u) > PHASE_TOL)
    if sig.size:
        pivot = u[sig[0]]
        u = u * (pivot.conjugate() / abs(pivot))
    return u


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|<u|v>| after normalizing both states (global-phase invariant)."""
    u, v = as_state(u), as_state(v)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= ZERO_NORM_TOL or nv <= ZERO_NORM_TOL:
        raise ValueError("fidelity of a zero vector is undefined")
    return float(abs(np.vdot(u, v)) / (nu * nv))


def basis_state(dim: int, k: int) -> np.ndarray:
    if not 0 <= k < dim:
        raise ValueError(f"basis index {k} out of range for dim {dim}")
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


def orthonormality_defect(basis: np.ndarray) -> float:
    """Max entry of |B^dag B - I| for a (dim x n) matrix of basis columns."""
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2:
        raise ValueError("basis must be a 2-D array with basis vectors as columns")
    gram = basis.conj().T @ basis
    return float(np.max(np.abs(gram - np.eye(basis.shape[1]))))


def require_orthonormal_basis(basis: np.ndarray, tol: float = ORTHONORMAL_TOL,
                              complete: bool = True) -> np.ndarray:
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2:
        raise ValueError("basis must be a 2-D array with basis vectors as columns")
    if complete and basis.shape[0] != basis.shape[1]:
        raise ValueError(
            f"basis with {basis.shape[1]} vectors is incomplete for dim {basis.shape[0]}"
        )
    defect = orthonormality_defect(basis)
    if defect > tol:
        raise ValueError(f"basis is not orthonormal (Gram defect {defect:.3e} > {tol:.1e})")
    return basis
