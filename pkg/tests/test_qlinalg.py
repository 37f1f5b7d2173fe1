import numpy as np
import pytest

from qschur.errors import NumericError, PrecondError, ShapeError
from qschur.qlinalg import (
    QMatrix,
    SignatureMatrix,
    check_colligation,
    complex_adjoint,
    from_complex_adjoint,
    herm_eigen_neg,
    orthonormalize_columns,
    qmatrix_inv,
    random_qmatrix,
)
from qschur.quat import I, J, Quaternion


def test_complex_adjoint_examples():
    assert np.allclose(complex_adjoint(QMatrix.scalar(J)), [[0, 1], [-1, 0]])
    assert np.allclose(complex_adjoint(QMatrix.scalar(I)), [[1j, 0], [0, -1j]])
    eigs = np.linalg.eigvals(complex_adjoint(QMatrix.scalar(2.0)))
    assert np.allclose(sorted(eigs.real), [2.0, 2.0]) and np.allclose(eigs.imag, 0.0)


def test_complex_adjoint_homomorphism(rng):
    for _ in range(15):
        m = random_qmatrix(rng, 3, 4)
        n = random_qmatrix(rng, 4, 2)
        lhs = complex_adjoint(m @ n)
        rhs = complex_adjoint(m) @ complex_adjoint(n)
        assert np.max(np.abs(lhs - rhs)) < 1e-11
        assert np.max(np.abs(complex_adjoint(m.adjoint()) - complex_adjoint(m).conj().T)) < 1e-13


def test_complex_adjoint_roundtrip(rng):
    m = random_qmatrix(rng, 3, 5)
    back = from_complex_adjoint(complex_adjoint(m))
    assert (back - m).norm() < 1e-13


def test_herm_eigen_examples():
    eigs, neg = herm_eigen_neg(QMatrix.diag([1.0, -1.0]))
    assert np.allclose(eigs, [-1.0, 1.0]) and neg == 1

    h = QMatrix.from_entries([[Quaternion(), J], [-J, Quaternion()]])
    # independent route: eigenvalues of the explicit 4x4 complex adjoint
    brute = np.linalg.eigvalsh(complex_adjoint(h))
    eigs, neg = herm_eigen_neg(h)
    assert np.allclose(np.repeat(eigs, 2), brute, atol=1e-12)
    assert np.allclose(eigs, [-1.0, 1.0]) and neg == 1

    eigs, neg = herm_eigen_neg(QMatrix.zeros(3, 3))
    assert neg == 0 and np.allclose(eigs, 0.0)


def test_herm_eigen_pairing(rng):
    for _ in range(10):
        m = random_qmatrix(rng, 5, 5)
        h = QMatrix(0.5 * (m.data + m.adjoint().data))
        lam = np.sort(np.linalg.eigvalsh(complex_adjoint(h)))
        rho = max(1.0, np.max(np.abs(lam)))
        assert np.max(np.abs(lam[0::2] - lam[1::2])) < 1e-9 * rho
        herm_eigen_neg(h)  # must not raise


def test_herm_eigen_rejects_non_hermitian(rng):
    m = random_qmatrix(rng, 3, 3)
    with pytest.raises(PrecondError):
        herm_eigen_neg(m)


def test_signature_invariance_under_unitary(rng):
    for _ in range(8):
        m = random_qmatrix(rng, 4, 4)
        h = QMatrix(0.5 * (m.data + m.adjoint().data))
        u = orthonormalize_columns(random_qmatrix(rng, 4, 4))
        _, neg = herm_eigen_neg(h)
        _, neg2 = herm_eigen_neg(u.adjoint() @ h @ u)
        assert neg == neg2


def test_inverse_examples(rng):
    assert (qmatrix_inv(QMatrix.eye(3)) - QMatrix.eye(3)).norm() < 1e-14
    inv = qmatrix_inv(QMatrix.diag([I, J]))
    assert inv.entry(0, 0).isclose(-I) and inv.entry(1, 1).isclose(-J)
    for _ in range(10):
        m = random_qmatrix(rng, 4, 4)
        minv = qmatrix_inv(m)
        assert (m @ minv - QMatrix.eye(4)).norm() < 1e-10


def test_inverse_rejects_singular():
    with pytest.raises(NumericError):
        qmatrix_inv(QMatrix.zeros(2, 2))


def test_check_colligation_examples():
    one = SignatureMatrix.identity(1)
    assert check_colligation(QMatrix.scalar(I), one, one) < 1e-15
    assert abs(check_colligation(QMatrix.scalar(0.5), one, one) - 0.75) < 1e-15
    with pytest.raises(ShapeError):
        check_colligation(QMatrix.zeros(2, 3), SignatureMatrix.identity(3), one)


def test_signature_matrix_validation():
    SignatureMatrix.from_signs([1.0, -1.0]).index() == 1
    with pytest.raises(PrecondError):
        SignatureMatrix(QMatrix.scalar(0.5))
    with pytest.raises(PrecondError):
        SignatureMatrix(QMatrix.scalar(I))


def test_qmatrix_json_roundtrip(rng):
    m = random_qmatrix(rng, 2, 3)
    back = QMatrix.from_json(m.to_json())
    assert (back - m).norm() == 0.0


def test_adjoint_involution(rng):
    m = random_qmatrix(rng, 3, 2)
    n = random_qmatrix(rng, 2, 4)
    assert (m.adjoint().adjoint() - m).norm() == 0.0
    assert ((m @ n).adjoint() - n.adjoint() @ m.adjoint()).norm() < 1e-12
