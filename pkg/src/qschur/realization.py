"""Colligation-backed realizations S(p) = D + p C * (I - pA)^{-*} B.

The slice extension of C(I - xA)^{-1} off the real axis is

    C * (I - pA)^{-*} = (C - conj(p) C A)(I - 2 Re(p) A + |p|^2 A^2)^{-1},

so ball evaluation needs the resolvent I - 2Re(p)A + |p|^2 A^2 to be
invertible (p outside the S-spectrum spheres of A).  Half-space
colligations carry blocks (F, G, H) with the derived block
B = -(I + x0 A) making up the coisometric operator matrix.

State spaces are plain quaternionic coordinate spaces; indefinite
metrics appear only through finite Gram matrices handled elsewhere.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    ExpansionError,
    IllPosedError,
    NumericError,
    PoleError,
    ShapeError,
    SpectrumError,
)
from .qlinalg import (
    QMatrix,
    SignatureMatrix,
    check_colligation,
    complex_adjoint,
    from_complex_adjoint,
    herm_eigen_neg,
    hstack,
    qmatrix_inv,
    vstack,
)
from .quat import Quaternion, qdecompose

BALL = "ball"
HALFSPACE = "halfspace"


@dataclass
class Colligation:
    """Operator matrix (A, B, C, D) with signature data.

    Ball: the operator matrix is [[A, B], [C, D]].  Half-space: the
    stored blocks are read as (A, F, G, H) with positive x0, and the
    operator matrix is [[-(I + x0 A), F], [G, H]].
    """

    A: QMatrix
    B: QMatrix
    C: QMatrix
    D: QMatrix
    J1: SignatureMatrix = None
    J2: SignatureMatrix = None
    domain: str = BALL
    x0: float = None

    def __post_init__(self):
        n = self.A.rows
        if self.A.cols != n:
            raise ShapeError("A must be square")
        if self.B.rows != n or self.C.cols != n:
            raise ShapeError("B and C must match the state dimension")
        if self.D.shape != (self.C.rows, self.B.cols):
            raise ShapeError("D must be C.rows x B.cols")
        if self.J1 is None:
            self.J1 = SignatureMatrix.identity(self.B.cols)
        if self.J2 is None:
            self.J2 = SignatureMatrix.identity(self.C.rows)
        if self.domain not in (BALL, HALFSPACE):
            raise DomainError("domain must be 'ball' or 'halfspace'")
        if self.domain == HALFSPACE:
            if self.x0 is None or not self.x0 > 0.0:
                raise DomainError("half-space colligations need x0 > 0")

    # half-space aliases: stored B, C, D blocks play the roles F, G, H
    @property
    def F(self):
        return self.B

    @property
    def G(self):
        return self.C

    @property
    def H(self):
        return self.D

    @property
    def state_dim(self):
        return self.A.rows

    def b_block(self):
        """Half-space operator matrix block -(I + x0 A)."""
        if self.domain != HALFSPACE:
            raise DomainError("b_block is a half-space notion")
        eye = QMatrix.eye(self.state_dim)
        return -(eye + self.A.scale_left(self.x0))

    def operator_matrix(self):
        if self.domain == BALL:
            top = hstack([self.A, self.B])
        else:
            top = hstack([self.b_block(), self.F])
        bot = hstack([self.C, self.D])
        return vstack([top, bot])

    def coisometry_residual(self, mode="coisometry"):
        return check_colligation(self.operator_matrix(), self.J1, self.J2, mode)

    def to_json(self):
        out = {
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "C": self.C.to_json(),
            "D": self.D.to_json(),
            "J1": self.J1.to_json(),
            "J2": self.J2.to_json(),
            "domain": self.domain,
        }
        if self.x0 is not None:
            out["x0"] = float(self.x0)
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise DomainError("Colligation JSON must be an object")
        return cls(
            A=QMatrix.from_json(obj["A"]),
            B=QMatrix.from_json(obj["B"]),
            C=QMatrix.from_json(obj["C"]),
            D=QMatrix.from_json(obj["D"]),
            J1=SignatureMatrix.from_json(obj["J1"]) if "J1" in obj else None,
            J2=SignatureMatrix.from_json(obj["J2"]) if "J2" in obj else None,
            domain=obj.get("domain", BALL),
            x0=obj.get("x0"),
        )


def _resolvent_inverse(a, p):
    """(I - 2 Re(p) A + |p|^2 A^2)^{-1}, raising SpectrumError when p lies
    on an S-spectrum sphere of A."""
    n = a.rows
    eye = QMatrix.eye(n)
    res = eye - (a.scale_left(2.0 * p.re)) + (a @ a).scale_left(p.normsq())
    try:
        return qmatrix_inv(res)
    except NumericError as exc:
        rep = qdecompose(p)
        raise SpectrumError(
            "resolvent singular at sphere (x=%.6g, y=%.6g): %s" % (rep.x, rep.y, exc)
        )


def realize_eval(col, p):
    """Evaluate the transfer function of a colligation at a quaternion.

    Ball:  D + p (C - conj(p) C A)(I - 2Re(p)A + |p|^2 A^2)^{-1} B,
    which reduces to D + x C (I - xA)^{-1} B at real x.  Half-space:
    H - (p - x0)(G - phib G A)(|phi|^2 A^2 - 2Re(phi) A + I)^{-1} F with
    phi = (p - x0)(p + x0)^{-1} and phib its conjugate; the (p - x0)
    prefactor annihilates the second term at p = x0, so S(x0) = H.
    """
    p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
    if col.domain == BALL:
        rinv = _resolvent_inverse(col.A, p)
        ca = col.C @ col.A
        left = col.C - ca.scale_left(p.conj())
        return col.D + (left @ rinv @ col.B).scale_left(p)

    x0 = float(col.x0)
    shift = p + Quaternion.from_real(x0)
    if shift.norm() <= 1e-13 * max(1.0, p.norm()):
        rep = qdecompose(p)
        raise PoleError(rep.x, rep.y, "half-space evaluation at p = -x0")
    phi = (p - Quaternion.from_real(x0)) * shift.inverse()
    rinv = _resolvent_inverse(col.A, phi)
    ga = col.G @ col.A
    left = col.G - ga.scale_left(phi.conj())
    term = (left @ rinv @ col.F).scale_left(p - Quaternion.from_real(x0))
    return col.H - term


def colligation_from_blaschke_factor(a, domain=BALL):
    """One-dimensional unitary colligation whose transfer function is B_a.

    Coefficients sit on the slice of a so the geometric series in
    A = conj(a) reproduces (1 - 2Re(a)p + |a|^2 p^2)^{-1}-type data; the
    classical disk formulas guide the ansatz and the result is verified
    numerically, with D = B_a(0) = |a|.
    """
    if domain != BALL:
        raise DomainError("factor colligations are built on the ball")
    a = a if isinstance(a, Quaternion) else Quaternion.from_real(a)
    r = a.norm()
    if not 0.0 < r < 1.0:
        raise DomainError("need 0 < |a| < 1")
    root = float(np.sqrt(1.0 - r * r))
    amat = QMatrix.scalar(a.conj())
    bmat = QMatrix.scalar(root)
    cmat = QMatrix.scalar(a.conj() * (-root / r))
    dmat = QMatrix.scalar(r)
    return Colligation(A=amat, B=bmat, C=cmat, D=dmat, domain=BALL)


def backward_shift_colligation(s, n):
    """Matrix shadow of the backward-shift realization on Taylor data.

    The state space is the truncated coefficient space of dimension n*r:
    A shifts coefficients down ((Af)_k = f_{k+1}, top row zero), B loads
    the shifted Taylor coefficients of S, C reads f(0), and D = s_0.  The
    transfer function reproduces the degree-n Taylor polynomial of S
    exactly (A is nilpotent, so the series is finite).
    """
    if n < 1:
        raise DomainError("truncation must be at least 1")
    try:
        coeffs = s.taylor(n)
    except AttributeError:
        raise ExpansionError("source provides no Taylor data")
    coeffs = np.asarray(coeffs if isinstance(coeffs, np.ndarray) else coeffs.coeffs)
    r, scols = coeffs.shape[1], coeffs.shape[2]

    adata = np.zeros((n * r, n * r, 4))
    for blk in range(n - 1):
        for u in range(r):
            adata[blk * r + u, (blk + 1) * r + u, 0] = 1.0
    bdata = np.zeros((n * r, scols, 4))
    for blk in range(n):
        bdata[blk * r : (blk + 1) * r] = coeffs[blk + 1]
    cdata = np.zeros((r, n * r, 4))
    for u in range(r):
        cdata[u, u, 0] = 1.0
    return Colligation(
        A=QMatrix(adata), B=QMatrix(bdata), C=QMatrix(cdata), D=QMatrix(coeffs[0]),
        domain=BALL,
    )


def solve_stein(a, c, residual_tol=1e-9):
    """Unique Hermitian P with A^* P A = P - C^* C, negative semidefinite.

    Requires every eigenvalue of chi(A) strictly outside the closed unit
    disk; solved by vectorizing the equation over the complex adjoint.
    """
    if a.rows != a.cols:
        raise ShapeError("A must be square")
    if c.cols != a.rows:
        raise ShapeError("C must have as many columns as A")
    alpha = complex_adjoint(a)
    lam = np.linalg.eigvals(alpha)
    if np.min(np.abs(lam)) <= 1.0 + 1e-12:
        raise IllPosedError(
            "spectral hypothesis violated: chi(A) has an eigenvalue of modulus "
            "%.6f inside the closed unit disk" % float(np.min(np.abs(lam)))
        )
    gamma = complex_adjoint(c)
    qmat = gamma.conj().T @ gamma
    m = alpha.shape[0]
    eye = np.eye(m * m)
    op = eye - np.kron(alpha.T, alpha.conj().T)
    try:
        vec = np.linalg.solve(op, qmat.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise NumericError("Stein system singular: %s" % exc)
    pmat = vec.reshape(m, m, order="F")
    pmat = 0.5 * (pmat + pmat.conj().T)
    p = from_complex_adjoint(pmat)
    p = QMatrix(0.5 * (p.data + p.adjoint().data))
    resid = (a.adjoint() @ p @ a - p + c.adjoint() @ c).norm()
    scale = max(1.0, p.norm(), (c.adjoint() @ c).norm())
    if resid > residual_tol * scale:
        raise NumericError("Stein residual %.3e exceeds tolerance" % resid)
    return p


def stein_is_negative(p, cutoff=1e-8):
    """True when the Stein solution is negative semidefinite."""
    eigs, _ = herm_eigen_neg(p, cutoff)
    lam_max = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    return bool(np.all(eigs <= cutoff * max(1.0, lam_max)))


def random_halfspace_colligation(rng, n, r, s, x0):
    """Coisometric half-space colligation from a random unitary operator
    matrix; A is recovered from the B-block relation B = -(I + x0 A)."""
    from .qlinalg import orthonormalize_columns, random_qmatrix

    m = orthonormalize_columns(random_qmatrix(rng, n + r, n + s))
    bblk = QMatrix(m.data[:n, :n])
    f = QMatrix(m.data[:n, n:])
    g = QMatrix(m.data[n:, :n])
    h = QMatrix(m.data[n:, n:])
    amat = (-(bblk + QMatrix.eye(n))).scale_left(1.0 / x0)
    return Colligation(A=amat, B=f, C=g, D=h, domain=HALFSPACE, x0=x0)
