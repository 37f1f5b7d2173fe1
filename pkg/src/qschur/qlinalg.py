"""Quaternionic matrices via the complex-adjoint representation.

A QMatrix keeps its entries as a float64 array of shape (rows, cols, 4).
Writing an entry as p = A + B j with complex A = x0 + i x1, B = x2 + i x3
gives the complex adjoint

    chi(M) = [[A, B], [-conj(B), conj(A)]]

of doubled size, a *-algebra homomorphism: chi(MN) = chi(M) chi(N) and
chi(M^*) = chi(M)^*.  Hermitian eigenvalues, inversion, and condition
estimates all route through chi; eigenvalues of chi(H) come in exact
pairs and one representative per pair is reported.
"""

import numpy as np

from . import _accel
from .errors import DomainError, NumericError, PrecondError, ShapeError
from .quat import Quaternion

# refuse inversion beyond this 1-norm condition estimate on chi(M)
COND_LIMIT = 1e12


def qmatmul_arr(a, b):
    """Quaternion matrix product on component arrays (..., r, t, 4) x (..., t, c, 4)."""
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
            a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
            a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
            a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
        ],
        axis=-1,
    )


def qadjoint_arr(a):
    """Conjugate transpose on a component array (..., r, c, 4)."""
    out = np.swapaxes(a, -3, -2).copy()
    out[..., 1:] = -out[..., 1:]
    return out


class QMatrix:
    """Dense rectangular quaternion matrix; immutable after construction."""

    __slots__ = ("_d",)

    def __init__(self, data):
        d = np.array(data, dtype=np.float64)
        if d.ndim != 3 or d.shape[2] != 4:
            raise ShapeError("QMatrix data must have shape (rows, cols, 4)")
        d.flags.writeable = False
        self._d = d

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def eye(cls, n):
        d = np.zeros((n, n, 4))
        d[np.arange(n), np.arange(n), 0] = 1.0
        return cls(d)

    @classmethod
    def from_real(cls, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError("expected a 2-d real array")
        d = np.zeros(arr.shape + (4,))
        d[..., 0] = arr
        return cls(d)

    @classmethod
    def from_entries(cls, rows_of_quats):
        rows = [[q.as_array() for q in row] for row in rows_of_quats]
        return cls(np.array(rows, dtype=np.float64))

    @classmethod
    def scalar(cls, q):
        q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
        return cls(q.as_array().reshape(1, 1, 4))

    @classmethod
    def diag(cls, quats):
        n = len(quats)
        d = np.zeros((n, n, 4))
        for i, q in enumerate(quats):
            q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
            d[i, i] = q.as_array()
        return cls(d)

    # -- shape and access ----------------------------------------------------

    @property
    def rows(self):
        return self._d.shape[0]

    @property
    def cols(self):
        return self._d.shape[1]

    @property
    def shape(self):
        return (self._d.shape[0], self._d.shape[1])

    @property
    def data(self):
        return self._d

    def entry(self, i, j):
        return Quaternion.from_array(self._d[i, j])

    def is_scalar(self):
        return self.shape == (1, 1)

    def as_quaternion(self):
        if not self.is_scalar():
            raise ShapeError("only 1x1 matrices convert to a quaternion")
        return Quaternion.from_array(self._d[0, 0])

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeError("addition needs equal shapes %s vs %s" % (self.shape, other.shape))
        return QMatrix(self._d + other._d)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ShapeError("subtraction needs equal shapes %s vs %s" % (self.shape, other.shape))
        return QMatrix(self._d - other._d)

    def __neg__(self):
        return QMatrix(-self._d)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ShapeError("matmul mismatch %s @ %s" % (self.shape, other.shape))
        return QMatrix(qmatmul_arr(self._d, other._d))

    def adjoint(self):
        return QMatrix(qadjoint_arr(self._d))

    def scale_left(self, q):
        """q * M with a scalar quaternion (or real) acting entrywise from the left."""
        q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
        return QMatrix(_accel.qmul(q.as_array(), self._d))

    def scale_right(self, q):
        q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
        return QMatrix(_accel.qmul(self._d, q.as_array()))

    def norm(self):
        """Frobenius norm over all real components."""
        return float(np.sqrt(np.sum(self._d * self._d)))

    def herm_residual(self):
        return (self - self.adjoint()).norm()

    def isclose(self, other, tol=1e-12):
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    def __repr__(self):
        return "QMatrix(shape=%dx%d)" % self.shape

    # -- JSON -----------------------------------------------------------------

    def to_json(self):
        entries = [
            [float(self._d[i, j, k]) for k in range(4)]
            for i in range(self.rows)
            for j in range(self.cols)
        ]
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise DomainError("QMatrix JSON must be an object")
        try:
            rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
        except (KeyError, TypeError):
            raise DomainError("QMatrix JSON needs rows, cols, entries")
        if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
            raise DomainError("rows and cols must be positive integers")
        if len(entries) != rows * cols:
            raise DomainError("expected %d entries, got %d" % (rows * cols, len(entries)))
        quats = [Quaternion.from_json(e) for e in entries]
        d = np.array([q.as_array() for q in quats]).reshape(rows, cols, 4)
        return cls(d)


def hstack(mats):
    return QMatrix(np.concatenate([m.data for m in mats], axis=1))


def vstack(mats):
    return QMatrix(np.concatenate([m.data for m in mats], axis=0))


def block_diag(mats):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    d = np.zeros((rows, cols, 4))
    r = c = 0
    for m in mats:
        d[r : r + m.rows, c : c + m.cols] = m.data
        r += m.rows
        c += m.cols
    return QMatrix(d)


# ---------------------------------------------------------------------------
# complex adjoint
# ---------------------------------------------------------------------------

def complex_adjoint(m):
    """chi(M): complex matrix of doubled size with chi(MN) = chi(M) chi(N)."""
    d = m.data if isinstance(m, QMatrix) else np.asarray(m)
    a = d[..., 0] + 1j * d[..., 1]
    b = d[..., 2] + 1j * d[..., 3]
    top = np.concatenate([a, b], axis=1)
    bot = np.concatenate([-np.conj(b), np.conj(a)], axis=1)
    return np.concatenate([top, bot], axis=0)


def from_complex_adjoint(z):
    """Inverse of chi; averages the two structured blocks for robustness."""
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim != 2 or z.shape[0] % 2 or z.shape[1] % 2:
        raise ShapeError("complex adjoint must be 2r x 2c")
    r, c = z.shape[0] // 2, z.shape[1] // 2
    a = 0.5 * (z[:r, :c] + np.conj(z[r:, c:]))
    b = 0.5 * (z[:r, c:] - np.conj(z[r:, :c]))
    d = np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
    return QMatrix(d)


class SignatureMatrix:
    """Self-adjoint unitary quaternionic matrix (a signature matrix)."""

    __slots__ = ("_m",)

    def __init__(self, matrix, tol=1e-12):
        m = matrix if isinstance(matrix, QMatrix) else QMatrix(matrix)
        if m.rows != m.cols:
            raise ShapeError("signature matrix must be square")
        scale = max(1.0, m.norm())
        if m.herm_residual() > tol * scale:
            raise PrecondError("signature matrix must be self-adjoint")
        if (m @ m - QMatrix.eye(m.rows)).norm() > tol * scale:
            raise PrecondError("signature matrix must be unitary (J^2 = I)")
        self._m = m

    @classmethod
    def identity(cls, n):
        return cls(QMatrix.eye(n))

    @classmethod
    def from_signs(cls, signs):
        return cls(QMatrix.from_real(np.diag(np.asarray(signs, dtype=np.float64))))

    @property
    def matrix(self):
        return self._m

    @property
    def n(self):
        return self._m.rows

    def index(self, cutoff=1e-8):
        """Number of strictly negative eigenvalues of J."""
        _, neg = herm_eigen_neg(self._m, cutoff)
        return neg

    def to_json(self):
        return self._m.to_json()

    @classmethod
    def from_json(cls, obj):
        return cls(QMatrix.from_json(obj))


# ---------------------------------------------------------------------------
# spectral operations
# ---------------------------------------------------------------------------

def herm_eigen_neg(h, cutoff=1e-8, pairing_rtol=1e-9):
    """Eigenvalues of a Hermitian quaternionic matrix and the negative count.

    Works on chi(H); its 2n real eigenvalues occur in exact pairs and the
    returned array keeps one representative per pair (ascending).  The
    negative count applies the relative cutoff against the spectral radius,
    since kernel Gram matrices are frequently near-singular and a raw sign
    test is noise.
    """
    if h.rows != h.cols:
        raise ShapeError("Hermitian eigenvalues need a square matrix")
    scale = max(1.0, h.norm())
    if h.herm_residual() > 1e-10 * scale:
        raise PrecondError("matrix is not Hermitian within 1e-10 relative")
    z = complex_adjoint(h)
    z = 0.5 * (z + z.conj().T)
    try:
        lam = np.linalg.eigvalsh(z)
    except np.linalg.LinAlgError as exc:
        raise NumericError("eigenvalue solver failed: %s" % exc)
    lam = np.sort(lam)
    rho = max(1.0, float(np.max(np.abs(lam))) if lam.size else 0.0)
    pairs = lam.reshape(-1, 2)
    gap = float(np.max(np.abs(pairs[:, 0] - pairs[:, 1]))) if pairs.size else 0.0
    if gap > pairing_rtol * rho:
        raise NumericError("chi eigenvalue pairing violated (gap %.3e)" % gap)
    reps = 0.5 * (pairs[:, 0] + pairs[:, 1])
    negatives = int(np.sum(reps < -cutoff * rho))
    return reps, negatives


def qmatrix_inv(m):
    """Inverse through chi(M); refuses condition estimates beyond 1e12."""
    if m.rows != m.cols:
        raise ShapeError("inversion needs a square matrix")
    z = complex_adjoint(m)
    try:
        zinv = np.linalg.inv(z)
    except np.linalg.LinAlgError:
        raise NumericError("matrix is numerically singular", condition=np.inf)
    cond = float(np.linalg.norm(z, 1) * np.linalg.norm(zinv, 1))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericError(
            "matrix too ill-conditioned to invert (cond~%.3e)" % cond, condition=cond
        )
    return from_complex_adjoint(zinv)


def check_colligation(m, j1, j2, mode="coisometry"):
    """Residual of the signature identity for an operator matrix.

    For an (n+r) x (n+s) block matrix M the coisometry residual is
    || M diag(I_n, J1) M^* - diag(I_n, J2) ||; isometry transposes the
    roles, unitary takes the max of both.  Zero means the defining
    identity holds exactly.
    """
    j1m = j1.matrix if isinstance(j1, SignatureMatrix) else j1
    j2m = j2.matrix if isinstance(j2, SignatureMatrix) else j2
    s, r = j1m.rows, j2m.rows
    n = m.rows - r
    if n < 0 or m.cols - s != n:
        raise ShapeError(
            "operator matrix %sx%s incompatible with J1 (%d) and J2 (%d)"
            % (m.rows, m.cols, s, r)
        )
    d1 = block_diag([QMatrix.eye(n), j1m]) if n else j1m
    d2 = block_diag([QMatrix.eye(n), j2m]) if n else j2m
    if mode == "coisometry":
        return (m @ d1 @ m.adjoint() - d2).norm()
    if mode == "isometry":
        return (m.adjoint() @ d2 @ m - d1).norm()
    if mode == "unitary":
        return max(
            (m @ d1 @ m.adjoint() - d2).norm(),
            (m.adjoint() @ d2 @ m - d1).norm(),
        )
    raise DomainError("mode must be coisometry, isometry, or unitary")


def orthonormalize_columns(m):
    """Right-quaternionic Gram-Schmidt; returns a matrix with orthonormal columns."""
    d = np.array(m.data)
    rows, cols = d.shape[0], d.shape[1]
    out = np.zeros_like(d)
    kept = 0
    for j in range(cols):
        v = d[:, j].copy()
        for i in range(kept):
            u = out[:, i]
            # s = <u, v> = sum conj(u_k) v_k ; subtract u * s (right scaling)
            s = np.zeros(4)
            for k in range(rows):
                s = s + _accel.qmul(_accel.qconj(u[k]), v[k])
            for k in range(rows):
                v[k] = v[k] - _accel.qmul(u[k], s)
        nrm = np.sqrt(np.sum(v * v))
        if nrm < 1e-12:
            continue
        out[:, kept] = v / nrm
        kept += 1
    if kept < cols:
        raise NumericError("columns were numerically dependent")
    return QMatrix(out)


def random_qmatrix(rng, rows, cols, scale=1.0):
    """Dense matrix with components uniform in [-scale, scale]."""
    return QMatrix(rng.uniform(-scale, scale, size=(rows, cols, 4)))
