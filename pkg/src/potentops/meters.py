"""Concrete apparatus models: a two-level meter coupled through the |1><1|
projector, and a Gaussian pointer on a periodic position grid whose momentum
operator is built spectrally (exact translation generator on the grid, so
pointer-shift checks are not polluted by finite-difference error)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pauli
from .linalg import (
    as_operator,
    as_state,
    fidelity,
    general_exponential,
    hermitian_exponential,
    hermitian_exponentials,
    hermitize,
    require_hermitian,
    tensor_product,
)
from .pps import PrePostSelection, joint_evolve_and_postselect, weak_value

# Dense joint evolution stays sub-second below this size.
JOINT_DIM_CAP = 4096

GRID_NORM_TOL = 1e-10


@dataclass(frozen=True)
class QubitMeter:
    """Two-level meter alpha|0> + beta|1>, coupled via the |1><1| projector
    in the sigma_z eigenbasis."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {total!r}, not 1")

    @property
    def state(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def coupling_projector(self) -> np.ndarray:
        return pauli.PROJECT_1.copy()

    def coupling_unitary(self, A: np.ndarray, g: float) -> np.ndarray:
        """exp(-i g A (x) |1><1|) on the system-major joint space."""
        A = require_hermitian(A, name="A")
        return hermitian_exponential(tensor_product(A, pauli.PROJECT_1), -1j * g)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic position grid on [x_min, x_max), right endpoint excluded."""

    grid_size: int
    x_min: float
    x_max: float

    def __post_init__(self):
        n = self.grid_size
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"grid_size must be a power of two >= 2, got {n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.grid_size

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.grid_size)

    @property
    def momentum_lattice(self) -> np.ndarray:
        """2*pi*m / length in FFT ordering."""
        return 2 * np.pi * np.fft.fftfreq(self.grid_size, d=self.dx)


@dataclass(frozen=True)
class GaussianPointer:
    """Gaussian wavepacket exp(-(x - x0)^2 / (4 sigma^2)) on a Grid, normalized
    under the grid inner product sum |Phi|^2 dx = 1."""

    grid: Grid
    sigma: float
    x0: float
    amplitudes: np.ndarray

    @property
    def unit_amplitudes(self) -> np.ndarray:
        """l2-normalized amplitudes, the form joint evolutions consume."""
        return self.amplitudes * np.sqrt(self.grid.dx)


@dataclass(frozen=True)
class MomentumOperator:
    grid: Grid
    matrix: np.ndarray


def build_gaussian_pointer(grid_size: int, x_min: float, x_max: float,
                           sigma: float, x0: float) -> GaussianPointer:
    """Construct a grid-normalized Gaussian pointer.

    Rejects packets the grid cannot resolve: sigma must span at least 4 grid
    steps, and the +-6 sigma support must lie inside [x_min, x_max], keeping
    periodic wrap-around (aliasing) below the tolerances this package tests at.
    """
    grid = Grid(grid_size, float(x_min), float(x_max))
    sigma, x0 = float(sigma), float(x0)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if sigma < 4 * grid.dx:
        raise ValueError(f"sigma = {sigma} under-resolved: needs at least 4*dx = {4 * grid.dx}")
    if x0 - 6 * sigma < grid.x_min or x0 + 6 * sigma > grid.x_max:
        raise ValueError("packet support (+-6 sigma) leaves the grid; widen the extent")
    amp = np.exp(-((grid.x - x0) ** 2) / (4 * sigma ** 2)).astype(complex)
    amp /= np.sqrt(np.sum(np.abs(amp) ** 2) * grid.dx)
    return GaussianPointer(grid=grid, sigma=sigma, x0=x0, amplitudes=amp)


def momentum_operator(grid: Grid) -> MomentumOperator:
    """Dense spectral momentum P = F^dag diag(p_m) F on the periodic grid.

    Plane waves on the momentum lattice are exact eigenvectors, so
    exp(-i c P) translates grid functions by exactly c (modulo the period).
    """
    n = grid.grid_size
    j = np.arange(n)
    f = np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    matrix = (f.conj().T * grid.momentum_lattice) @ f
    return MomentumOperator(grid=grid, matrix=hermitize(matrix))


def pointer_statistics(state: np.ndarray, grid: Grid):
    """(mean position, position variance, mean momentum) of a grid state.

    Probability weights are renormalized internally, so grid-normalized and
    l2-normalized amplitudes give identical statistics. The momentum mean is
    computed in Fourier space, independently of the dense momentum matrix.
    """
    state = as_state(state)
    if state.size != grid.grid_size:
        raise ValueError(f"state dim {state.size} != grid size {grid.grid_size}")
    weights = np.abs(state) ** 2
    total = weights.sum()
    if total <= 0:
        raise ValueError("state has zero norm")
    weights = weights / total
    mean_x = float(np.dot(grid.x, weights))
    var_x = float(np.dot((grid.x - mean_x) ** 2, weights))
    spectrum = np.abs(np.fft.fft(state)) ** 2
    mean_p = float(np.dot(grid.momentum_lattice, spectrum) / spectrum.sum())
    return mean_x, var_x, mean_p


@dataclass(frozen=True)
class PointerShiftReport:
    """Exact-evolution read-out of one weak-coupling pointer experiment."""

    g: float
    weak_val: complex
    probability: float
    mean_shift: float
    predicted_shift: float          # g * Re(weak value)
    momentum_shift: float
    predicted_momentum_shift: float  # 2 g Im(weak value) Var_p
    fidelity: float                  # against exp(-i g A_w P)|Phi>
    fidelity_gap: float
    oracle_residual: float           # joint-exponential vs spectral-sum route

    @property
    def shift_error(self) -> float:
        return abs(self.mean_shift - self.predicted_shift)

    @property
    def momentum_error(self) -> float:
        return abs(self.momentum_shift - self.predicted_momentum_shift)


def pointer_shift_sweep(A: np.ndarray, sel: PrePostSelection, gs,
                        pointer: GaussianPointer,
                        momentum: MomentumOperator | None = None,
                        joint_dim_cap: int = JOINT_DIM_CAP) -> list[PointerShiftReport]:
    """Run the exact joint evolution exp(-i g A (x) P) for each coupling in
    ``gs``, post-select, and compare the pointer against the weak-value
    predictions (position shift g*Re(A_w), momentum shift from Im(A_w), and
    the effective-evolution state exp(-i g A_w P)|Phi>).

    The post-selected state is computed twice: from the joint matrix
    exponential, and as the eigenbasis-of-A sum of translated packets. The
    max-entry disagreement is each report's oracle_residual.
    """
    A = require_hermitian(A, name="A")
    if A.shape[0] != sel.dim:
        raise ValueError(f"observable dim {A.shape[0]} != selection dim {sel.dim}")
    grid = pointer.grid
    joint_dim = sel.dim * grid.grid_size
    if joint_dim > joint_dim_cap:
        raise ValueError(f"joint dimension {joint_dim} exceeds cap {joint_dim_cap}")
    if momentum is None:
        momentum = momentum_operator(grid)
    p_mat = as_operator(momentum.matrix)

    gs = [float(g) for g in np.atleast_1d(gs)]
    psi = sel.psi / np.linalg.norm(sel.psi)
    phi = sel.phi / np.linalg.norm(sel.phi)
    meter_state = pointer.unit_amplitudes
    a_w = weak_value(A, sel)
    mean_p0, var_p0 = momentum_moments(pointer.amplitudes, grid)

    # One eigendecomposition of the joint generator serves the whole sweep.
    joint_h = tensor_product(A, p_mat)
    joint_exps = hermitian_exponentials(joint_h, [-1j * g for g in gs])

    # Spectral route: A = sum_n lam_n |v_n><v_n| turns the evolution into a
    # sum of pointer translations weighted by <phi|v_n><v_n|psi>.
    lam, vecs = np.linalg.eigh(A)
    amps = (phi.conj() @ vecs) * (vecs.conj().T @ psi)
    branch_exps = hermitian_exponentials(
        p_mat, [-1j * g * l for g in gs for l in lam])

    reports = []
    for i, g in enumerate(gs):
        oracle_state, p_exact = joint_evolve_and_postselect(
            joint_exps[i], psi, meter_state, phi, check_unitary=False)
        spectral_state = sum(
            amps[n] * (branch_exps[i * lam.size + n] @ meter_state)
            for n in range(lam.size))
        residual = float(np.max(np.abs(oracle_state - spectral_state)))

        mean_x, _, mean_p = pointer_statistics(oracle_state, grid)
        target = general_exponential(p_mat, -1j * g * a_w) @ meter_state
        fid = fidelity(oracle_state, target) if p_exact > 0 else 0.0
        reports.append(PointerShiftReport(
            g=g,
            weak_val=a_w,
            probability=p_exact,
            mean_shift=mean_x - pointer.x0,
            predicted_shift=g * a_w.real,
            momentum_shift=mean_p - mean_p0,
            predicted_momentum_shift=2.0 * g * a_w.imag * var_p0,
            fidelity=fid,
            fidelity_gap=1.0 - fid,
            oracle_residual=residual,
        ))
    return reports


def momentum_moments(state: np.ndarray, grid: Grid):
    """(mean, variance) of momentum, from the Fourier spectrum."""
    spectrum = np.abs(np.fft.fft(as_state(state))) ** 2
    spectrum = spectrum / spectrum.sum()
    p = grid.momentum_lattice
    mean_p = float(np.dot(p, spectrum))
    return mean_p, float(np.dot((p - mean_p) ** 2, spectrum))


def pointer_shift_experiment(A: np.ndarray, sel: PrePostSelection, g: float,
                             pointer: GaussianPointer,
                             momentum: MomentumOperator | None = None,
                             joint_dim_cap: int = JOINT_DIM_CAP) -> PointerShiftReport:
    """Single-coupling version of :func:`pointer_shift_sweep`."""
    return pointer_shift_sweep(A, sel, [g], pointer, momentum, joint_dim_cap)[0]
