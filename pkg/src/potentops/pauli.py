"""Qubit constants: Pauli matrices, projectors, and the stock amplification
pre/post-selection pair (weak value of sigma_z equal to 2)."""

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

# |1><1|, the qubit-meter coupling projector.
PROJECT_1 = np.outer(KET_1, KET_1.conj())

# Pre/post-selected pair with <phi|psi> = 1/2 and sigma_z weak value 2.
AMPLIFICATION_PSI = np.array([np.sqrt(3) / 2, 1 / 2], dtype=complex)
AMPLIFICATION_PHI = np.array([np.sqrt(3) / 2, -1 / 2], dtype=complex)
