"""Schur kernels, Gram assembly, and negative-squares estimation.

The generalized Schur kernel on the unit ball is the truncated series

    K_S(p, q) = sum_{n <= N} p^n (J2 - S(p) J1 S(q)^*) conj(q)^n

with N chosen so the geometric tail ||M|| rho^(N+1) / (1 - rho) stays
below the requested tolerance (rho = |p||q|).  Gram matrices built from
kernel sections drive two estimators:

* estimate_neg_squares: kappa-hat as the max count of strictly negative
  Gram eigenvalues over seeded random trials.  By construction this is a
  lower bound for the true number of negative squares; acceptance pairs
  it with a known target instead of claiming certification.
* estimate_dim_HB: the numerical rank of the Gram of K_B.

Double power series sum p^N C_{NM} conj(q)^M represent difference
kernels; the left factor of the factorization identity convolves Taylor
coefficients on the p-index and the adjoint coefficients on the
conj(q)-index, which is the operational meaning given to the left and
right star products appearing in that identity.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .blaschke import BALL, HALFSPACE, FactoredProduct
from .errors import (
    DivergenceError,
    DomainError,
    ExpansionError,
    PoleError,
    PrecondError,
    ShapeError,
)
from .qlinalg import QMatrix, SignatureMatrix, herm_eigen_neg, qadjoint_arr, qmatmul_arr
from .quat import Quaternion, qdecompose, sample_ball_point
from .starpoly import SliceRational

MAX_SERIES_TERMS = 4000


def as_points(points):
    """Normalize a list of Quaternion (or an (B,4) array) to an (B,4) array."""
    if isinstance(points, np.ndarray):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ShapeError("points array must have shape (B, 4)")
        return pts
    return np.array([p.as_array() for p in points], dtype=np.float64)


def tail_terms(rho, mnorm, tol):
    """Smallest N with mnorm * rho^(N+1) / (1 - rho) < tol (rho = |p||q|)."""
    if rho >= 1.0:
        raise DivergenceError("kernel series diverges: |p||q| = %.4f >= 1" % rho)
    if rho == 0.0 or mnorm == 0.0:
        return 0
    n = int(np.ceil(np.log(tol * (1.0 - rho) / mnorm) / np.log(rho))) - 1
    return min(max(n, 0), MAX_SERIES_TERMS)


# ---------------------------------------------------------------------------
# Schur functions
# ---------------------------------------------------------------------------

class SchurFunction:
    """Matrix-valued function with signature data and swappable value sources.

    A source supplies batch evaluation and, when available, Taylor
    coefficients at 0.  Extra sources can be attached for cross-checks;
    they must agree with the primary one at shared sample points.
    """

    def __init__(self, domain, rows, cols, eval_many_fn, taylor_fn=None,
                 J1=None, J2=None, rational=None, extra_eval_fns=(), label=""):
        if domain not in (BALL, HALFSPACE):
            raise DomainError("domain must be 'ball' or 'halfspace'")
        self.domain = domain
        self.rows = int(rows)
        self.cols = int(cols)
        self.J1 = J1 if J1 is not None else SignatureMatrix.identity(self.cols)
        self.J2 = J2 if J2 is not None else SignatureMatrix.identity(self.rows)
        self._eval_many = eval_many_fn
        self._taylor = taylor_fn
        self.rational = rational
        self.extra_eval_fns = tuple(extra_eval_fns)
        self.label = label

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_rational(cls, rat, domain=BALL, J1=None, J2=None, label=""):
        r, s = rat.shape
        return cls(
            domain, r, s,
            eval_many_fn=rat.eval_many,
            taylor_fn=lambda n: rat.taylor(n).coeffs,
            J1=J1, J2=J2, rational=rat, label=label,
        )

    @classmethod
    def from_product(cls, product, J1=None, J2=None, label=""):
        rat = product.rational
        out = cls.from_rational(rat, product.domain, J1, J2, label or "blaschke-product")
        return out

    @classmethod
    def constant(cls, value, domain=BALL, J1=None, J2=None, label="constant"):
        value = value if isinstance(value, QMatrix) else QMatrix.scalar(value)
        rat = SliceRational.constant(value)
        return cls.from_rational(rat, domain, J1, J2, label)

    @classmethod
    def from_colligation(cls, col, label="realization"):
        from .realization import realize_eval

        def eval_many(points):
            pts = as_points(points)
            out = np.empty((pts.shape[0], col.C.rows, col.B.cols, 4))
            for idx in range(pts.shape[0]):
                out[idx] = realize_eval(col, Quaternion.from_array(pts[idx])).data
            return out

        def taylor(n):
            if col.domain != BALL:
                raise ExpansionError("Taylor data needs a ball colligation")
            coeffs = np.zeros((n + 1, col.C.rows, col.B.cols, 4))
            coeffs[0] = col.D.data
            power = col.B
            for k in range(1, n + 1):
                coeffs[k] = (col.C @ power).data
                power = col.A @ power
            return coeffs

        return cls(
            col.domain, col.C.rows, col.B.cols,
            eval_many_fn=eval_many, taylor_fn=taylor,
            J1=col.J1, J2=col.J2, label=label,
        )

    @classmethod
    def star_quotient(cls, left_scalar_rational, s0, label="star-quotient"):
        """Lazy star product f * S0 with a scalar left factor.

        Evaluation uses the pointwise law f(p) S0(f(p)^{-1} p f(p)); the
        Taylor data convolves the two truncated expansions.  The fully
        multiplied rational is attached as a cross-check source when S0
        carries a rational representation.
        """
        if not left_scalar_rational.is_scalar():
            raise ShapeError("the left quotient factor must be scalar")
        f = left_scalar_rational

        def eval_many(points):
            pts = as_points(points)
            fv = f.eval_many(pts)[:, 0, 0, :]
            fmag = np.sqrt(np.sum(fv * fv, axis=-1))
            zero = fmag <= 1e-14
            finv = np.where(zero[:, None], np.array([1.0, 0, 0, 0]), _accel.qinv(fv))
            moved = _accel.qmul(_accel.qmul(finv, pts), fv)
            sv = s0.eval_many(moved)
            out = _accel.qmul(fv[:, None, None, :], sv)
            out[zero] = 0.0
            return out

        def taylor(n):
            fc = f.taylor(n).coeffs
            sc = s0.taylor(n)
            out = np.zeros((n + 1,) + sc.shape[1:])
            for a in range(n + 1):
                for b in range(n + 1 - a):
                    out[a + b] += _accel.qmul(fc[a, 0, 0], sc[b])
            return out

        extra = ()
        rational = None
        if s0.rational is not None:
            rational = f.star(s0.rational)
            extra = (rational.eval_many,)
        return cls(
            s0.domain, s0.rows, s0.cols,
            eval_many_fn=eval_many, taylor_fn=taylor,
            J1=s0.J1, J2=s0.J2, rational=rational,
            extra_eval_fns=extra, label=label,
        )

    @classmethod
    def compose_real_mobius(cls, s, alpha, beta, gamma, delta, domain=None, label=""):
        """S after the real Mobius map (alpha + beta p)(gamma + delta p)^{-1}."""
        domain = domain or s.domain
        if s.rational is not None:
            rat = s.rational.compose_real_mobius(alpha, beta, gamma, delta)
            return cls.from_rational(rat, domain, s.J1, s.J2, label or s.label)

        def eval_many(points):
            pts = as_points(points)
            num = np.zeros_like(pts)
            num[:, 0] = alpha
            num += beta * pts
            den = np.zeros_like(pts)
            den[:, 0] = gamma
            den += delta * pts
            moved = _accel.qmul(num, _accel.qinv(den))
            return s.eval_many(moved)

        return cls(domain, s.rows, s.cols, eval_many_fn=eval_many,
                   J1=s.J1, J2=s.J2, label=label or s.label)

    # -- evaluation -------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def eval_many(self, points):
        return self._eval_many(as_points(points))

    def evaluate(self, p):
        p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
        return QMatrix(self.eval_many(p.as_array().reshape(1, 4))[0])

    def taylor(self, n):
        if self._taylor is None:
            raise ExpansionError("no Taylor source attached to %r" % (self.label,))
        return self._taylor(n)

    def source_agreement(self, points):
        """Max deviation between the primary and any extra value sources."""
        if not self.extra_eval_fns:
            return 0.0
        pts = as_points(points)
        base = self._eval_many(pts)
        worst = 0.0
        for fn in self.extra_eval_fns:
            dev = np.max(np.abs(fn(pts) - base)) if pts.size else 0.0
            worst = max(worst, float(dev))
        return worst

    def __repr__(self):
        return "SchurFunction(%s, %dx%d, %s)" % (
            self.domain, self.rows, self.cols, self.label or "unlabeled",
        )


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def base_kernel(domain, p, q):
    """Positive base kernel: sum p^n conj(q)^n on the ball, its half-space
    counterpart (conj(p)+conj(q)) (|p|^2 + 2 Re(p) conj(q) + conj(q)^2)^{-1}."""
    p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
    q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
    if domain == BALL:
        if p.norm() * q.norm() >= 1.0:
            raise DivergenceError("ball kernel needs |p||q| < 1")
        den = Quaternion.from_real(1.0) - p * (2.0 * q.re) + (p * p) * q.normsq()
        return den.inverse() * (Quaternion.from_real(1.0) - p * q)
    if domain == HALFSPACE:
        qc = q.conj()
        den = Quaternion.from_real(p.normsq()) + (2.0 * p.re) * qc + qc * qc
        if den.norm() <= 1e-14 * max(1.0, p.normsq() + q.normsq()):
            rep = qdecompose(p)
            raise PoleError(rep.x, rep.y, "half-space kernel denominator vanished")
        return (p.conj() + qc) * den.inverse()
    raise DomainError("domain must be 'ball' or 'halfspace'")


def series_sum_pair(p, mid, q, tol=1e-12):
    """Truncated sum_n p^n M conj(q)^n for one pair of points."""
    p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
    q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
    rho = p.norm() * q.norm()
    n = tail_terms(rho, max(mid.norm(), 1e-300), tol)
    pw = _accel.qpow_table(p.as_array().reshape(1, 4), n)
    qw = _accel.qpow_table(q.as_array().reshape(1, 4), n)
    out = _accel.series_sandwich(pw, mid.data[None, None], _accel.qconj(qw))
    return QMatrix(out[0, 0])


def schur_kernel_eval(s, p, q, tol=1e-10):
    """K_S(p, q) truncated so the geometric tail stays below tol."""
    if s.domain != BALL:
        raise DomainError("direct kernel series applies on the ball; transport first")
    sp = s.evaluate(p)
    sq = s.evaluate(q)
    mid = s.J2.matrix - sp @ s.J1.matrix @ sq.adjoint()
    return series_sum_pair(p, mid, q, tol)


def _mid_matrices(svals, j1, j2):
    """M[l, j] = J2 - S_l J1 S_j^* from batched values svals (B, r, s, 4)."""
    t = qmatmul_arr(svals, np.broadcast_to(j1.data, svals.shape[:1] + j1.data.shape))
    sadj = qadjoint_arr(svals)
    mid = qmatmul_arr(t[:, None], sadj[None, :])
    return j2.data[None, None] - mid


def gram(s, points, vectors, tol=1e-9, hermitize=True):
    """Hermitian Gram matrix with entries c_l^* K_S(w_l, w_j) c_j.

    vectors is an (B, r, 4) array (or list of r x 1 QMatrix columns).
    """
    pts = as_points(points)
    if isinstance(vectors, np.ndarray):
        vecs = np.asarray(vectors, dtype=np.float64)
    else:
        vecs = np.array([v.data[:, 0, :] for v in vectors], dtype=np.float64)
    if vecs.shape[0] != pts.shape[0]:
        raise ShapeError("need one vector per point")
    if vecs.shape[1] != s.rows:
        raise ShapeError("vectors must have length %d" % s.rows)

    svals = s.eval_many(pts)
    mid = _mid_matrices(svals, s.J1.matrix, s.J2.matrix)

    mags = np.sqrt(np.sum(pts * pts, axis=1))
    rho = float(np.max(mags)) ** 2 if pts.size else 0.0
    mnorm = float(np.max(np.sqrt(np.sum(mid * mid, axis=(2, 3, 4)))))
    n = tail_terms(rho, max(mnorm, 1e-300), tol)

    pw = _accel.qpow_table(pts, n)
    kmat = _accel.series_sandwich(pw, mid, _accel.qconj(pw))

    cadj = qadjoint_arr(vecs[:, :, None, :])      # (B, 1, r, 4)
    cvec = vecs[:, :, None, :]                    # (B, r, 1, 4)
    gdata = qmatmul_arr(cadj[:, None], qmatmul_arr(kmat, cvec[None, :]))[..., 0, 0, :]
    g = QMatrix(gdata)
    if hermitize:
        g = QMatrix(0.5 * (g.data + g.adjoint().data))
    return g


def _kernel_block_gram(s, points, tol):
    """Unrolled (B r) x (B r) Gram of kernel blocks K_S(w_l, w_j)."""
    pts = as_points(points)
    svals = s.eval_many(pts)
    mid = _mid_matrices(svals, s.J1.matrix, s.J2.matrix)
    mags = np.sqrt(np.sum(pts * pts, axis=1))
    rho = float(np.max(mags)) ** 2
    mnorm = float(np.max(np.sqrt(np.sum(mid * mid, axis=(2, 3, 4)))))
    n = tail_terms(rho, max(mnorm, 1e-300), tol)
    pw = _accel.qpow_table(pts, n)
    kmat = _accel.series_sandwich(pw, mid, _accel.qconj(pw))
    b, r = pts.shape[0], s.rows
    gdata = np.transpose(kmat, (0, 2, 1, 3, 4)).reshape(b * r, b * r, 4)
    return QMatrix(0.5 * (gdata + qadjoint_arr(gdata)))


def sample_gram_vectors(rng, batch, r):
    """Random unit column vectors, one per sampled point."""
    v = rng.normal(size=(batch, r, 4))
    nrm = np.sqrt(np.sum(v * v, axis=(1, 2)))[:, None, None]
    return v / nrm


@dataclass
class NegSquaresReport:
    """Sampling-based lower bound for the number of negative squares."""

    kappa_hat: int
    trials: int
    batch: int
    cutoff: float
    seed: int
    witness_points: list
    witness_vectors: list
    witness_eigenvalues: list

    def to_json(self):
        return {
            "kappa_hat": self.kappa_hat,
            "trials": self.trials,
            "cutoff": self.cutoff,
            "witness": {
                "points": self.witness_points,
                "vectors": self.witness_vectors,
                "eigenvalues": self.witness_eigenvalues,
            },
        }


def estimate_neg_squares(s, trials=200, batch=40, seed=0x5C05, rho=0.9,
                         cutoff=1e-8, tol=1e-9):
    """Max negative Gram eigenvalue count over seeded random trials.

    Points are sampled in |p| <= rho on the ball; each trial derives its
    generator from (seed, trial-index) so runs are schedule independent.
    The estimate never decreases as trials grow and is a lower bound of
    the true count by construction.
    """
    if s.domain != BALL:
        raise DomainError("negative-squares sampling runs on the ball; "
                          "use cayley_transport for half-space functions")
    if trials < 1:
        raise DomainError("need at least one trial")
    best = -1
    witness = None
    for t in range(trials):
        rng = np.random.default_rng([int(seed), t])
        pts = np.array([sample_ball_point(rng, rho).as_array() for _ in range(batch)])
        vecs = sample_gram_vectors(rng, batch, s.rows)
        g = gram(s, pts, vecs, tol=tol)
        eigs, neg = herm_eigen_neg(g, cutoff)
        if neg > best:
            best = neg
            witness = (pts, vecs, eigs)
    pts, vecs, eigs = witness
    return NegSquaresReport(
        kappa_hat=int(best),
        trials=int(trials),
        batch=int(batch),
        cutoff=float(cutoff),
        seed=int(seed),
        witness_points=[list(map(float, row)) for row in pts],
        witness_vectors=[[list(map(float, q)) for q in vec] for vec in vecs],
        witness_eigenvalues=[float(x) for x in eigs],
    )


@dataclass
class DimHBReport:
    dim: int
    eigenvalues: list
    warning: str = None

    def to_json(self):
        out = {"dim": self.dim, "eigenvalues": self.eigenvalues}
        if self.warning:
            out["warning"] = self.warning
        return out


def estimate_dim_HB(b, points=None, cutoff=1e-8, seed=17, radius=0.75, tol=1e-11):
    """Numerical rank of the Gram of K_B; equals deg B for Blaschke products.

    Needs a genuine product (kind-2/3 Potapov factors would put poles
    inside the ball).  With fewer than 3 deg(B) points the result carries
    an instability warning.
    """
    for f in b.factors:
        kind = getattr(f, "kind", None)
        if kind in (2, 3) or getattr(f, "inverted", False):
            raise DomainError("dim H(B) needs a genuine Blaschke product")
        center = getattr(f, "a", None) or getattr(f, "c", None)
        if center is not None:
            inside = center.norm() < 1.0 if b.domain == BALL else center.re > 0.0
            if not inside:
                raise DomainError("dim H(B) needs zeros inside the domain")
    deg = b.degree()
    if deg == 0:
        return DimHBReport(0, [])
    s = SchurFunction.from_product(b)
    if points is None:
        rng = np.random.default_rng(seed)
        count = 3 * deg + 3
        points = np.array(
            [sample_ball_point(rng, radius).as_array() for _ in range(count)]
        )
    pts = as_points(points)
    warning = None
    if pts.shape[0] * s.rows < 3 * deg:
        warning = "fewer than 3 deg(B) kernel sections; rank may be unstable"
    g = _kernel_block_gram(s, pts, tol)
    eigs, _ = herm_eigen_neg(g, cutoff)
    lam_max = float(np.max(eigs)) if eigs.size else 0.0
    dim = int(np.sum(eigs > cutoff * max(lam_max, 1e-300)))
    return DimHBReport(dim, [float(x) for x in eigs], warning)


# ---------------------------------------------------------------------------
# double power series kernels
# ---------------------------------------------------------------------------

class DoubleSeriesKernel:
    """Finite expansion sum_{n,m <= N} p^n C[n][m] conj(q)^m."""

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=np.float64)
        if c.ndim != 5 or c.shape[0] != c.shape[1] or c.shape[4] != 4:
            raise ShapeError("coefficients must have shape (N+1, N+1, r, c, 4)")
        self.coeffs = c

    @property
    def trunc(self):
        return self.coeffs.shape[0] - 1

    @property
    def block_shape(self):
        return (self.coeffs.shape[2], self.coeffs.shape[3])

    @classmethod
    def from_schur_taylor(cls, taylor, j1, j2, trunc):
        """Kernel coefficients C_{NM} = J2 delta_{NM} - sum_c s_{N-c} J1 s_{M-c}^*."""
        s = np.asarray(taylor, dtype=np.float64)
        r = s.shape[1]
        t = trunc + 1
        sj = qmatmul_arr(s, np.broadcast_to(j1.data, s.shape[:1] + j1.data.shape))
        sadj = qadjoint_arr(s)
        c = np.zeros((t, t, r, r, 4))
        for nn in range(t):
            c[nn, nn] += j2.data
            for mm in range(t):
                kmax = min(nn, mm)
                for k in range(kmax + 1):
                    c[nn, mm] -= qmatmul_arr(sj[nn - k], sadj[mm - k])
        return cls(c)

    def hermitian_residual(self):
        swapped = np.transpose(self.coeffs, (1, 0, 3, 2, 4)).copy()
        swapped[..., 1:] = -swapped[..., 1:]
        return float(np.max(np.abs(self.coeffs - swapped)))

    def __sub__(self, other):
        if self.coeffs.shape != other.coeffs.shape:
            raise ShapeError("kernel truncations differ")
        return DoubleSeriesKernel(self.coeffs - other.coeffs)

    def sandwich(self, left_taylor):
        """B(p) * K(p,q) *_r B(q)^*: convolve Taylor coefficients of B on
        the p-index from the left and their adjoints on the conj(q)-index
        from the right."""
        b = np.asarray(left_taylor, dtype=np.float64)
        t = self.trunc + 1
        r = b.shape[1]
        badj = qadjoint_arr(b)
        rc, cc = self.block_shape
        tmp = np.zeros((t, t, r, cc, 4))
        for a in range(min(t, b.shape[0])):
            if a == 0:
                tmp += qmatmul_arr(np.broadcast_to(b[0], (t, t) + b[0].shape), self.coeffs)
            else:
                tmp[a:] += qmatmul_arr(
                    np.broadcast_to(b[a], (t - a, t) + b[a].shape), self.coeffs[: t - a]
                )
        out = np.zeros((t, t, r, r, 4))
        for bb in range(min(t, b.shape[0])):
            if bb == 0:
                out += qmatmul_arr(tmp, np.broadcast_to(badj[0], (t, t) + badj[0].shape))
            else:
                out[:, bb:] += qmatmul_arr(
                    tmp[:, : t - bb], np.broadcast_to(badj[bb], (t, t - bb) + badj[bb].shape)
                )
        return DoubleSeriesKernel(out)

    def max_coeff_norm(self):
        return float(np.max(np.sqrt(np.sum(self.coeffs**2, axis=(2, 3, 4)))))

    def weighted_norms(self, radius):
        """Coefficient norms scaled by radius^(N+M), the natural magnitude
        of each term on the bidisk of that radius."""
        mags = np.sqrt(np.sum(self.coeffs**2, axis=(2, 3, 4)))
        t = self.trunc + 1
        w = radius ** (np.arange(t)[:, None] + np.arange(t)[None, :])
        return mags * w

    def boundary_band_norm(self, radius):
        """Summed weighted norms along the truncation boundary band."""
        wn = self.weighted_norms(radius)
        t = self.trunc
        return float(np.sum(wn[t, :]) + np.sum(wn[:, t]) - wn[t, t])

    def eval_gram(self, points, vectors=None):
        """Hermitianized Gram of the truncated kernel at the given points."""
        pts = as_points(points)
        pw = _accel.qpow_table(pts, self.trunc)
        kmat = _accel.double_series(pw, self.coeffs, _accel.qconj(pw))
        if vectors is None:
            b, r = pts.shape[0], self.block_shape[0]
            gdata = np.transpose(kmat, (0, 2, 1, 3, 4)).reshape(b * r, b * r, 4)
        else:
            vecs = np.asarray(vectors, dtype=np.float64)
            cadj = qadjoint_arr(vecs[:, :, None, :])
            cvec = vecs[:, :, None, :]
            gdata = qmatmul_arr(cadj[:, None], qmatmul_arr(kmat, cvec[None, :]))[..., 0, 0, :]
        return QMatrix(0.5 * (gdata + qadjoint_arr(gdata)))


@dataclass
class KernelIdentityReport:
    """Outcome of the factorization kernel identity at finite truncation."""

    status: str                 # "ok" or "inconclusive"
    max_coeff_dev: float
    min_gram_eig: float
    hermitian_residual: float
    trunc: int
    tail_bound: float

    def to_json(self):
        return {
            "status": self.status,
            "max_coeff_dev": self.max_coeff_dev,
            "min_gram_eig": self.min_gram_eig,
            "hermitian_residual": self.hermitian_residual,
            "trunc": self.trunc,
            "tail_bound": self.tail_bound,
        }


def _min_pole_radius(rational):
    """Smallest modulus among the complex roots of the real denominator."""
    dv = rational.den.real_vector()
    nz = np.nonzero(np.abs(dv) > 1e-300)[0]
    if nz.size == 0 or nz[-1] == 0:
        return np.inf
    roots = np.roots(dv[: nz[-1] + 1][::-1])
    mags = np.abs(roots)
    mags = mags[mags > 1e-12]
    return float(np.min(mags)) if mags.size else np.inf


def kernel_identity_check(s, b0, s0, trunc=48, gram_points=12, gram_radius=None,
                          seed=11, tail_tol=1e-9, dev_tol=1e-9):
    """Check K_S - K_B = B(p) * (K_{S0}) *_r B(q)^* with B = B0^{-*}.

    Both sides are built as double power series at the given truncation.
    B0^{-*} has poles exactly at the zeros of B0, inside the ball, so its
    Taylor coefficients grow like (pole radius)^(-n); the comparison and
    the tail bound are therefore taken in the radius-weighted norm
    ||C_{NM}|| rho^(N+M), with the Gram sample radius pulled strictly
    inside the smallest pole sphere.  The report carries the weighted
    coefficient deviation, the Hermitian symmetry residual, and the
    minimum Gram eigenvalue of the difference kernel (its positivity is
    the content of the factorization step).  If the truncation cannot
    bound the tail below tail_tol the status is 'inconclusive', never a
    silent pass.
    """
    if not isinstance(b0, FactoredProduct):
        raise ShapeError("b0 must be a FactoredProduct")
    eye_r = SignatureMatrix.identity(s.rows)
    eye_s = SignatureMatrix.identity(s.cols)
    if (s.J1.matrix - eye_s.matrix).norm() > 1e-12 or \
       (s.J2.matrix - eye_r.matrix).norm() > 1e-12:
        raise PrecondError("the factorization identity applies to identity signatures")

    binv = b0.inverse().rational
    if binv.shape == (1, 1) and s.rows > 1:
        from .starpoly import scalar_poly_times_matrix
        binv = SliceRational(
            scalar_poly_times_matrix(binv.num, QMatrix.eye(s.rows)), binv.den
        )
    if gram_radius is None:
        pole = _min_pole_radius(binv)
        gram_radius = 0.6 if not np.isfinite(pole) else min(0.6, 0.45 * pole)
    btay = binv.taylor(trunc).coeffs

    k_s = DoubleSeriesKernel.from_schur_taylor(s.taylor(trunc), eye_s.matrix,
                                               eye_r.matrix, trunc)
    k_b = DoubleSeriesKernel.from_schur_taylor(btay, eye_r.matrix, eye_r.matrix, trunc)
    lhs = k_s - k_b

    k_s0 = DoubleSeriesKernel.from_schur_taylor(s0.taylor(trunc), s0.J1.matrix,
                                                eye_r.matrix, trunc)
    rhs = k_s0.sandwich(btay)

    diff = DoubleSeriesKernel(lhs.coeffs - rhs.coeffs)
    dev = float(np.max(diff.weighted_norms(gram_radius)))
    t1 = trunc + 1
    w = gram_radius ** (np.arange(t1)[:, None, None, None, None]
                        + np.arange(t1)[None, :, None, None, None])
    herm = max(
        float(np.max(np.abs((lhs.coeffs - _swap_adj(lhs.coeffs)) * w))),
        float(np.max(np.abs((rhs.coeffs - _swap_adj(rhs.coeffs)) * w))),
    )

    rng = np.random.default_rng(seed)
    pts = np.array(
        [sample_ball_point(rng, gram_radius).as_array() for _ in range(gram_points)]
    )
    g = lhs.eval_gram(pts)
    eigs, _ = herm_eigen_neg(g)
    min_eig = float(np.min(eigs))

    band = max(lhs.boundary_band_norm(gram_radius), rhs.boundary_band_norm(gram_radius))
    inner = max(lhs.weighted_norms(gram_radius)[: trunc, : trunc].max(),
                rhs.weighted_norms(gram_radius)[: trunc, : trunc].max(), 1e-300)
    ratio = min(band / inner, 0.97) if inner > 0 else 0.0
    tail_bound = band / max(1.0 - ratio, 0.03) ** 2
    status = "ok" if tail_bound <= tail_tol and dev <= dev_tol else "inconclusive"
    return KernelIdentityReport(
        status=status,
        max_coeff_dev=dev,
        min_gram_eig=min_eig,
        hermitian_residual=herm,
        trunc=trunc,
        tail_bound=float(tail_bound),
    )


def _swap_adj(coeffs):
    out = np.transpose(coeffs, (1, 0, 3, 2, 4)).copy()
    out[..., 1:] = -out[..., 1:]
    return out


def moebius_identity_check(s, x0, p, q, tol=1e-12):
    """Residual of the index-preserving Mobius identity at one point pair.

    With b(p) = (p + x0)(1 + p x0)^{-1} the kernel of S o b factors as
    (1 - x0^2)(1 + p x0)^{-1} K_S(b(p), b(q)) (1 + conj(q) x0)^{-1};
    both sides are evaluated by truncated series and the norm of the
    difference is returned.
    """
    if not (-1.0 < x0 < 1.0):
        raise DomainError("x0 must lie in (-1, 1)")
    p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
    q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)

    def mob(v):
        den = Quaternion.from_real(1.0) + v * x0
        if den.norm() <= 1e-13 * max(1.0, v.norm()):
            rep = qdecompose(v)
            raise PoleError(rep.x, rep.y, "Mobius pole at p = -1/x0")
        return (v + Quaternion.from_real(x0)) * den.inverse()

    bp, bq = mob(p), mob(q)
    sp = s.evaluate(bp)
    sq = s.evaluate(bq)
    mid = s.J2.matrix - sp @ s.J1.matrix @ sq.adjoint()

    lhs = series_sum_pair(p, mid, q, tol)
    inner = series_sum_pair(bp, mid, bq, tol)
    left = (Quaternion.from_real(1.0) + p * x0).inverse() * (1.0 - x0 * x0)
    right = (Quaternion.from_real(1.0) + q.conj() * x0).inverse()
    rhs = inner.scale_left(left).scale_right(right)
    return (lhs - rhs).norm()
