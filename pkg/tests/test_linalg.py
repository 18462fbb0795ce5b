import numpy as np
import pytest

from potentops import linalg
from potentops.linalg import (
    JointSpace,
    basis_state,
    fidelity,
    general_exponential,
    hermitian_exponential,
    hermitian_exponentials,
    inner_product,
    norm,
    normalize,
    orthonormality_defect,
    partial_matrix_element,
    require_orthonormal_basis,
    tensor_product,
)
from potentops.pauli import IDENTITY_2, KET_PLUS, PROJECT_1, SIGMA_X, SIGMA_Z
from potentops.sampling import complex_gaussian, random_hermitian, random_state, random_unitary


def test_joint_space_indexing():
    space = JointSpace(system_dim=3, apparatus_dim=4)
    assert space.dim == 12
    assert space.flat_index(2, 1) == 9
    with pytest.raises(ValueError):
        JointSpace(system_dim=0, apparatus_dim=4)


class TestTensorProduct:
    def test_identity_case(self):
        np.testing.assert_array_equal(tensor_product(np.eye(2), np.eye(3)), np.eye(6))

    def test_basis_bookkeeping(self):
        joint = tensor_product(basis_state(2, 0), basis_state(2, 1))
        np.testing.assert_array_equal(joint, [0, 1, 0, 0])

    def test_sigma_z_with_projector(self):
        # 4x4 Kronecker product expanded by hand
        np.testing.assert_allclose(tensor_product(SIGMA_Z, PROJECT_1),
                                   np.diag([0, 1, 0, -1]), atol=1e-15)

    def test_kind_mismatch(self):
        with pytest.raises(ValueError, match="two states or two operators"):
            tensor_product(SIGMA_Z, basis_state(2, 0))

    def test_associativity(self):
        rng = np.random.default_rng(0)
        a, b, c = (complex_gaussian(rng, (d, d)) for d in (2, 3, 2))
        left = tensor_product(tensor_product(a, b), c)
        right = tensor_product(a, tensor_product(b, c))
        assert np.max(np.abs(left - right)) <= 1e-12


class TestHermitianExponential:
    def test_zero_exponent(self):
        h = random_hermitian(5, np.random.default_rng(1))
        np.testing.assert_allclose(hermitian_exponential(h, 0.0), np.eye(5), atol=1e-14)

    def test_sigma_z_quarter_turn(self):
        # closed-form 2x2 diagonal exponential
        np.testing.assert_allclose(hermitian_exponential(SIGMA_Z, -1j * np.pi / 2),
                                   np.diag([-1j, 1j]), atol=1e-14)

    def test_identity_generator_global_phase(self):
        out = hermitian_exponential(IDENTITY_2, -0.3j)
        np.testing.assert_allclose(out, np.exp(-0.3j) * np.eye(2), atol=1e-14)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            hermitian_exponential(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)

    @pytest.mark.parametrize("dim", [2, 5, 16])
    def test_unitary_for_imaginary_scale(self, dim):
        rng = np.random.default_rng(dim)
        for _ in range(5):
            h = random_hermitian(dim, rng)
            g = float(rng.uniform(-10, 10))
            u = hermitian_exponential(h, -1j * g)
            assert linalg.unitarity_defect(u) <= 1e-10

    def test_exponential_inverse(self):
        rng = np.random.default_rng(9)
        h = random_hermitian(6, rng)
        scale = complex(0.4, -0.8)
        prod = hermitian_exponential(h, scale) @ hermitian_exponential(h, -scale)
        assert np.max(np.abs(prod - np.eye(6))) <= 1e-10

    def test_shared_eigendecomposition(self):
        h = random_hermitian(4, np.random.default_rng(3))
        scales = [-0.2j, 0.5, 1j]
        batch = hermitian_exponentials(h, scales)
        for s, m in zip(scales, batch):
            np.testing.assert_allclose(m, hermitian_exponential(h, s), atol=1e-13)


class TestGeneralExponential:
    def test_zero(self):
        np.testing.assert_allclose(general_exponential(np.zeros((3, 3))), np.eye(3), atol=1e-15)

    def test_matches_hermitian_route(self):
        rng = np.random.default_rng(4)
        for dim in (2, 5, 8):
            h = random_hermitian(dim, rng)
            diff = general_exponential(h, -1j * 1.7) - hermitian_exponential(h, -1j * 1.7)
            assert np.max(np.abs(diff)) <= 1e-10

    def test_nilpotent_two_term_series(self):
        n = np.array([[0, 1], [0, 0]], dtype=complex)
        np.testing.assert_allclose(general_exponential(n), [[1, 1], [0, 1]], atol=1e-15)

    def test_norm_cap(self):
        with pytest.raises(ValueError, match="cap"):
            general_exponential(np.eye(2), 1e6)


def _pme_bruteforce(u, bra, ket, factor):
    # explicit index-sum definition of the contraction
    d = bra.size
    other = u.shape[0] // d
    if factor == "system":
        out = np.zeros((other, other), dtype=complex)
        for a in range(other):
            for b in range(other):
                for s in range(d):
                    for t in range(d):
                        out[a, b] += bra[s].conjugate() * u[s * other + a, t * other + b] * ket[t]
    else:
        out = np.zeros((other, other), dtype=complex)
        for s in range(other):
            for t in range(other):
                for a in range(d):
                    for b in range(d):
                        out[s, t] += bra[a].conjugate() * u[s * d + a, t * d + b] * ket[b]
    return out


class TestPartialMatrixElement:
    def test_identity_contraction(self):
        u = np.eye(6, dtype=complex)
        out = partial_matrix_element(u, basis_state(2, 0), basis_state(2, 0), "system")
        np.testing.assert_allclose(out, np.eye(3), atol=1e-15)

    def test_factorized_operator(self):
        rng = np.random.default_rng(5)
        b = complex_gaussian(rng, (3, 3))
        psi = random_state(2, rng)
        out = partial_matrix_element(tensor_product(np.eye(2), b), psi, psi, "system")
        np.testing.assert_allclose(out, b, atol=1e-14)

    def test_cnot_on_plus(self):
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                        dtype=complex)
        out = partial_matrix_element(cnot, KET_PLUS, KET_PLUS, "system")
        # explicit 4x4 contraction gives (I + X)/2
        np.testing.assert_allclose(out, (np.eye(2) + SIGMA_X) / 2, atol=1e-15)

    @pytest.mark.parametrize("factor", ["system", "apparatus"])
    @pytest.mark.parametrize("dims", [(2, 2), (3, 4), (4, 3)])
    def test_against_bruteforce(self, factor, dims):
        rng = np.random.default_rng(hash((factor, dims)) % 2 ** 32)
        ds, da = dims
        u = complex_gaussian(rng, (ds * da, ds * da))
        d = ds if factor == "system" else da
        bra, ket = complex_gaussian(rng, d), complex_gaussian(rng, d)
        out = partial_matrix_element(u, bra, ket, factor)
        np.testing.assert_allclose(out, _pme_bruteforce(u, bra, ket, factor), atol=1e-12)

    def test_linear_in_u_sesquilinear_in_states(self):
        rng = np.random.default_rng(6)
        u1, u2 = (complex_gaussian(rng, (6, 6)) for _ in range(2))
        bra, ket = complex_gaussian(rng, 2), complex_gaussian(rng, 2)
        lam, mu = 0.3 - 1.1j, -0.7 + 0.2j
        combined = partial_matrix_element(lam * u1 + mu * u2, bra, ket, "system")
        split = (lam * partial_matrix_element(u1, bra, ket, "system")
                 + mu * partial_matrix_element(u2, bra, ket, "system"))
        np.testing.assert_allclose(combined, split, atol=1e-12)
        scaled = partial_matrix_element(u1, lam * bra, mu * ket, "system")
        np.testing.assert_allclose(
            scaled, np.conj(lam) * mu * partial_matrix_element(u1, bra, ket, "system"),
            atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="not divisible"):
            partial_matrix_element(np.eye(6), basis_state(4, 0), basis_state(4, 0), "system")


class TestInnerProductAndNorm:
    def test_orthogonal_basis(self):
        assert inner_product(basis_state(2, 0), basis_state(2, 1)) == 0

    def test_self_overlap(self):
        psi = random_state(5, np.random.default_rng(7))
        assert abs(inner_product(psi, psi) - 1) <= 1e-14

    def test_amplification_pair_overlap(self):
        psi = np.array([np.sqrt(3) / 2, 1 / 2])
        phi = np.array([np.sqrt(3) / 2, -1 / 2])
        assert abs(inner_product(phi, psi) - 0.5) <= 1e-15

    def test_conjugate_linear_first_argument(self):
        rng = np.random.default_rng(8)
        u, v = complex_gaussian(rng, 4), complex_gaussian(rng, 4)
        lam = 0.6 + 0.9j
        assert abs(inner_product(lam * u, v) - np.conj(lam) * inner_product(u, v)) <= 1e-12

    def test_norm(self):
        assert abs(norm(np.array([3.0, 4.0])) - 5.0) <= 1e-15


class TestNormalize:
    def test_zero_vector(self):
        with pytest.raises(ValueError, match="zero vector"):
            normalize(np.zeros(3))

    def test_unit_norm_and_positive_pivot(self):
        v = normalize(np.array([-2j, 1.0]))
        assert abs(np.linalg.norm(v) - 1) <= 1e-14
        assert v[0].imag == pytest.approx(0, abs=1e-14)
        assert v[0].real > 0

    def test_idempotent_and_phase_canonical(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            v = complex_gaussian(rng, 6)
            lam = complex(rng.uniform(0.5, 2), rng.uniform(-2, 2))
            np.testing.assert_allclose(normalize(lam * v), normalize(v), atol=1e-12)
            np.testing.assert_allclose(normalize(normalize(v)), normalize(v), atol=1e-14)

    def test_skips_tiny_leading_amplitude(self):
        v = normalize(np.array([1e-16 + 0j, 0.0, -1.0]))
        assert v[2].real > 0


class TestBasisHelpers:
    def test_orthonormality_defect(self):
        u = random_unitary(4, np.random.default_rng(11))
        assert orthonormality_defect(u) <= 1e-12
        with pytest.raises(ValueError, match="incomplete"):
            require_orthonormal_basis(u[:, :2])
        skewed = u.copy()
        skewed[:, 0] *= 1.5
        with pytest.raises(ValueError, match="not orthonormal"):
            require_orthonormal_basis(skewed)

    def test_fidelity_phase_invariant(self):
        rng = np.random.default_rng(12)
        v = complex_gaussian(rng, 5)
        assert fidelity(v, np.exp(1.3j) * v) == pytest.approx(1.0, abs=1e-12)
