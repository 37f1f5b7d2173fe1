"""Matrix polynomials and slice-rational functions under the star product.

A StarPoly stores coefficients on the right of the powers,

    f(p) = sum_n p^n f_n,      f_n in H^{r x s},

so the star product is plain coefficient convolution,
(f * g)_k = sum_{n+m=k} f_n g_m.  Left evaluation at a real point equals
ordinary matrix polynomial evaluation, and for scalar f, g the pointwise
law  (f * g)(p) = f(p) g(f(p)^{-1} p f(p))  (with value 0 when f(p) = 0)
ties the star product back to ordinary products.

A SliceRational is a pair (num, den) with a matrix numerator and a 1x1
denominator with *real* coefficients.  Real-coefficient scalars are
central for the star product and commute with p, so the value is simply
den(p)^{-1} num(p); this representation is closed under star products
and covers every factor used downstream (denominators always arise from
symmetrizations, which are real).
"""

import numpy as np

from . import _accel
from .errors import (
    DomainError,
    ExpansionError,
    NotARootError,
    PoleError,
    ShapeError,
)
from .qlinalg import QMatrix, qmatmul_arr
from .quat import Quaternion, qdecompose

# imaginary residue allowed when a polynomial claims real coefficients
REAL_COEFF_RTOL = 1e-13
# default tolerance for root and divisibility decisions, relative to scale
ROOT_RTOL = 1e-10


class StarPoly:
    """Polynomial with quaternion-matrix coefficients under the star product."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        if isinstance(coeffs, np.ndarray):
            c = np.array(coeffs, dtype=np.float64)
        else:
            blocks = [b.data if isinstance(b, QMatrix) else np.asarray(b) for b in coeffs]
            c = np.array(blocks, dtype=np.float64)
        if c.ndim != 4 or c.shape[3] != 4:
            raise ShapeError("StarPoly coefficients must have shape (deg+1, r, s, 4)")
        if c.shape[0] == 0:
            c = np.zeros((1,) + c.shape[1:])
        c.flags.writeable = False
        self._c = c

    # -- constructors --------------------------------------------------------

    @classmethod
    def scalar(cls, values):
        """1x1 polynomial from a list of Quaternion or real coefficients."""
        rows = []
        for v in values:
            q = v if isinstance(v, Quaternion) else Quaternion.from_real(v)
            rows.append(q.as_array().reshape(1, 1, 4))
        return cls(np.array(rows))

    @classmethod
    def constant(cls, block):
        block = block if isinstance(block, QMatrix) else QMatrix.scalar(block)
        return cls(block.data[None, ...])

    @classmethod
    def one(cls, n=1):
        return cls.constant(QMatrix.eye(n))

    @classmethod
    def variable(cls):
        """The scalar polynomial p."""
        return cls.scalar([0.0, 1.0])

    @classmethod
    def zero(cls, rows=1, cols=1):
        return cls(np.zeros((1, rows, cols, 4)))

    # -- structure -----------------------------------------------------------

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return self._c.shape[0] - 1

    @property
    def shape(self):
        return (self._c.shape[1], self._c.shape[2])

    def coeff(self, n):
        if n < 0 or n > self.degree:
            return QMatrix.zeros(*self.shape)
        return QMatrix(self._c[n])

    def coeff_scale(self):
        """Largest coefficient Frobenius norm (at least a tiny floor)."""
        mags = np.sqrt(np.sum(self._c * self._c, axis=(1, 2, 3)))
        return float(max(np.max(mags), 1e-300))

    def trim(self, rtol=0.0):
        """Drop trailing coefficients of norm <= rtol * scale."""
        mags = np.sqrt(np.sum(self._c * self._c, axis=(1, 2, 3)))
        cut = rtol * self.coeff_scale()
        d = self._c.shape[0] - 1
        while d > 0 and mags[d] <= cut:
            d -= 1
        return StarPoly(self._c[: d + 1])

    def is_zero(self, rtol=1e-14):
        return float(np.max(np.abs(self._c))) <= rtol

    def is_scalar(self):
        return self.shape == (1, 1)

    def is_real_coeff(self, rtol=REAL_COEFF_RTOL):
        resid = float(np.max(np.abs(self._c[..., 1:])))
        return resid <= rtol * self.coeff_scale()

    def realified(self, rtol=REAL_COEFF_RTOL):
        """Copy with imaginary residues zeroed; requires real coefficients."""
        if not self.is_real_coeff(rtol):
            raise DomainError("polynomial does not have real coefficients")
        c = np.array(self._c)
        c[..., 1:] = 0.0
        return StarPoly(c)

    def real_vector(self):
        """Real coefficient list c_0..c_d for a real scalar polynomial."""
        if not (self.is_scalar() and self.is_real_coeff()):
            raise DomainError("need a real scalar polynomial")
        return np.array(self._c[:, 0, 0, 0])

    # -- arithmetic ------------------------------------------------------------

    def _padded(self, d):
        if self.degree >= d:
            return self._c
        pad = np.zeros((d + 1,) + self._c.shape[1:])
        pad[: self._c.shape[0]] = self._c
        return pad

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeError("polynomial shapes differ")
        d = max(self.degree, other.degree)
        return StarPoly(self._padded(d) + other._padded(d))

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ShapeError("polynomial shapes differ")
        d = max(self.degree, other.degree)
        return StarPoly(self._padded(d) - other._padded(d))

    def __neg__(self):
        return StarPoly(-self._c)

    def scale(self, x):
        """Multiply by a real number."""
        return StarPoly(self._c * float(x))

    def scale_left(self, q):
        q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
        return StarPoly(_accel.qmul(q.as_array(), self._c))

    def scale_right(self, q):
        q = q if isinstance(q, Quaternion) else Quaternion.from_real(q)
        return StarPoly(_accel.qmul(self._c, q.as_array()))

    def star(self, other):
        """Star product by coefficient convolution; degrees add."""
        if isinstance(other, SliceRational):
            return SliceRational(self.star(other.num), other.den)
        if self.shape[1] != other.shape[0]:
            raise ShapeError(
                "star product mismatch %s * %s" % (self.shape, other.shape)
            )
        df, dg = self.degree, other.degree
        out = np.zeros((df + dg + 1, self.shape[0], other.shape[1], 4))
        for n in range(df + 1):
            fn = self._c[n]
            for m in range(dg + 1):
                out[n + m] += qmatmul_arr(fn, other._c[m])
        return StarPoly(out)

    def shift(self, k):
        """Multiply by p^k (k >= 0)."""
        out = np.zeros((self.degree + k + 1,) + self._c.shape[1:])
        out[k:] = self._c
        return StarPoly(out)

    def conj(self):
        """Conjugate polynomial (coefficients conjugated); scalar only."""
        if not self.is_scalar():
            raise ShapeError("conjugate polynomial is unsupported for matrix input")
        c = np.array(self._c)
        c[..., 1:] = -c[..., 1:]
        return StarPoly(c)

    def coeff_adjoints(self):
        """Array of adjoint coefficients f_n^* with shape (deg+1, s, r, 4)."""
        out = np.swapaxes(self._c, 1, 2).copy()
        out[..., 1:] = -out[..., 1:]
        return out

    # -- evaluation -------------------------------------------------------------

    def eval_left(self, p):
        """Left evaluation sum_n p^n f_n as a QMatrix."""
        p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
        pts = p.as_array().reshape(1, 4)
        return QMatrix(_accel.polyval_batch(self._c, pts)[0])

    def eval_many(self, points):
        """Batch left evaluation; points is an (B, 4) array."""
        pts = np.ascontiguousarray(points, dtype=np.float64)
        return _accel.polyval_batch(self._c, pts)

    def eval_scalar(self, p):
        if not self.is_scalar():
            raise ShapeError("scalar evaluation needs a 1x1 polynomial")
        return self.eval_left(p).as_quaternion()

    def eval_scale(self, p):
        """Magnitude scale sum_n |f_n| max(1,|p|)^n used for zero tests."""
        p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
        base = max(1.0, p.norm())
        mags = np.sqrt(np.sum(self._c * self._c, axis=(1, 2, 3)))
        return float(sum(m * base**n for n, m in enumerate(mags)) + 1e-300)

    # -- JSON ---------------------------------------------------------------------

    def to_json(self):
        return {
            "shape": [self.shape[0], self.shape[1]],
            "coeffs": [self.coeff(n).to_json() for n in range(self.degree + 1)],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "shape" not in obj or "coeffs" not in obj:
            raise DomainError("StarPoly JSON needs shape and coeffs")
        blocks = [QMatrix.from_json(c) for c in obj["coeffs"]]
        if not blocks:
            raise DomainError("StarPoly JSON needs at least one coefficient")
        r, s = obj["shape"]
        for b in blocks:
            if b.shape != (r, s):
                raise DomainError("coefficient shape disagrees with declared shape")
        return cls(blocks)

    def __repr__(self):
        return "StarPoly(shape=%dx%d, degree=%d)" % (self.shape + (self.degree,))


# -------------------------------------------------------------------------------
# star-algebra operations
# -------------------------------------------------------------------------------

def star_mul(f, g):
    """Star product of StarPoly / SliceRational operands (mixed allowed)."""
    if isinstance(f, SliceRational) or isinstance(g, SliceRational):
        fr = f if isinstance(f, SliceRational) else SliceRational.from_poly(f)
        gr = g if isinstance(g, SliceRational) else SliceRational.from_poly(g)
        return fr.star(gr)
    return f.star(g)


def star_conj_sym(f):
    """Conjugate f^c and symmetrization f^s = f * f^c of a scalar polynomial.

    The symmetrization always has real coefficients; it is returned with
    imaginary residues zeroed after a tolerance check.
    """
    if not f.is_scalar():
        raise ShapeError("conjugate/symmetrization is unsupported for matrix input")
    fc = f.conj()
    fs = f.star(fc).realified()
    return fc, fs


def star_inv_scalar(f, rtol=1e-12):
    """Star inverse of a scalar polynomial as the rational (f^c, f^s)."""
    ft = f.trim(rtol)
    if ft.is_zero():
        raise DomainError("zero polynomial has no star inverse")
    fc, fs = star_conj_sym(ft)
    return SliceRational(fc, fs)


def left_root_extract(f, a, tol=ROOT_RTOL):
    """Factor f = (p - a) * g when f(a) = 0; returns g of one lower degree.

    Coefficient recursion from the top degree down:
    g_{d-1} = f_d, then g_{k-1} = f_k + a g_k.
    """
    if not f.is_scalar():
        raise ShapeError("root extraction works on scalar polynomials")
    a = a if isinstance(a, Quaternion) else Quaternion.from_real(a)
    val = f.eval_scalar(a)
    if val.norm() > tol * f.eval_scale(a):
        raise NotARootError(
            "f(a) = %r is not zero within tolerance at a = %r" % (val, a)
        )
    d = f.degree
    if d == 0:
        # constant vanishing at a is the zero polynomial
        return StarPoly.zero()
    g = [None] * d
    g[d - 1] = f.coeff(d).as_quaternion()
    for k in range(d - 1, 0, -1):
        g[k - 1] = f.coeff(k).as_quaternion() + a * g[k]
    return StarPoly.scalar(g)


def sphere_poly(a):
    """Real quadratic p^2 - 2 Re(a) p + |a|^2 vanishing on the sphere [a]."""
    a = a if isinstance(a, Quaternion) else Quaternion.from_real(a)
    return StarPoly.scalar([a.normsq(), -2.0 * a.re, 1.0])


def scalar_poly_times_matrix(poly, m):
    """Scalar polynomial times a constant matrix: coefficients c_n M."""
    if not poly.is_scalar():
        raise ShapeError("need a scalar polynomial")
    md = m.data if isinstance(m, QMatrix) else np.asarray(m)
    out = _accel.qmul(poly.coeffs[:, 0, 0, None, None, :], md[None])
    return StarPoly(out)


def mul_real_poly(mp, rp):
    """Matrix polynomial times a central real scalar polynomial."""
    w = rp.real_vector()
    out = np.zeros((mp.degree + len(w),) + mp.coeffs.shape[1:])
    for n, wn in enumerate(w):
        if wn != 0.0:
            out[n : n + mp.degree + 1] += wn * mp.coeffs
    return StarPoly(out[: mp.degree + len(w) - 1 + 1])


def divmod_real(f, d):
    """Polynomial division of f by a real scalar polynomial d.

    Real-coefficient scalars are central, so left and right division agree.
    Returns (quotient, remainder) with deg(remainder) < deg(d).
    """
    dv = d.real_vector()
    dd = len(dv) - 1
    while dd > 0 and dv[dd] == 0.0:
        dd -= 1
    lead = dv[dd]
    if lead == 0.0:
        raise DomainError("division by the zero polynomial")
    rem = np.array(f.coeffs)
    df = rem.shape[0] - 1
    if df < dd:
        return StarPoly.zero(*f.shape), StarPoly(rem)
    qc = np.zeros((df - dd + 1,) + rem.shape[1:])
    for k in range(df, dd - 1, -1):
        c = rem[k] / lead
        qc[k - dd] = c
        for i in range(dd + 1):
            rem[k - dd + i] -= dv[i] * c
    return StarPoly(qc), StarPoly(rem[:dd] if dd > 0 else rem[:1])


def _slice_pair_values(f, x, y, axis):
    """Values (f(x+Iy), f(x-Iy)) on the complex slice spanned by axis."""
    zp = Quaternion.from_real(x) + axis.q * y
    zm = Quaternion.from_real(x) - axis.q * y
    return f.eval_scalar(zp), f.eval_scalar(zm)


def find_sphere_zero(f, x, y, tol=ROOT_RTOL):
    """Zero of a scalar polynomial on the sphere (x, y), or None.

    On [p] the structure formula gives f(x+Jy) = alpha + J beta with slice
    data alpha, beta; a zero needs J = -alpha beta^{-1} to be an imaginary
    unit, and the candidate is confirmed by direct evaluation.  Returns the
    string "sphere" when f vanishes identically on the sphere.
    """
    from .quat import I as _I, ImaginaryUnit

    axis = ImaginaryUnit(_I)
    vp, vm = _slice_pair_values(f, x, y, axis)
    alpha = (vp + vm) / 2.0
    beta = (axis.q * (vm - vp)) / 2.0
    probe = Quaternion.from_real(x) + axis.q * y
    scale = f.eval_scale(probe)
    if beta.norm() <= tol * scale:
        if alpha.norm() <= tol * scale:
            return "sphere"
        return None
    jcand = -(alpha * beta.inverse())
    if abs(jcand.re) > 1e-6 or abs(jcand.norm() - 1.0) > 1e-6:
        return None
    jn = Quaternion(0.0, jcand.x1, jcand.x2, jcand.x3)
    m = jn.norm()
    if m == 0.0:
        return None
    q = Quaternion.from_real(x) + jn * (y / m)
    if f.eval_scalar(q).norm() <= 10.0 * tol * scale:
        return q
    return None


def zero_multiplicity(f, a, tol=ROOT_RTOL):
    """Kind and count of the zero of a scalar polynomial at a (or at [a]).

    Spherical zeros are powers of p^2 - 2 Re(a) p + |a|^2 dividing f; the
    count stops at the first non-dividing power.  Point zeros are counted
    by successive left root extraction, following the chain of zeros on
    [a] while it stays there.
    """
    if not f.is_scalar():
        raise ShapeError("zero multiplicity works on scalar polynomials")
    a = a if isinstance(a, Quaternion) else Quaternion.from_real(a)
    f = f.trim(1e-13)
    rep = qdecompose(a)

    m = 0
    h = f
    if rep.axis is not None:
        sp = sphere_poly(a)
        while h.degree >= 2:
            q, r = divmod_real(h, sp)
            if r.coeff_scale() > tol * max(1.0, h.coeff_scale()):
                break
            m += 1
            h = q.trim(1e-13)

    count = 0
    g = h
    if g.eval_scalar(a).norm() <= tol * g.eval_scale(a) and not g.is_zero():
        g = left_root_extract(g, a, tol)
        count = 1
        while g.degree >= 1:
            if rep.axis is None:
                if g.eval_scalar(a).norm() > tol * g.eval_scale(a):
                    break
                z = a
            else:
                z = find_sphere_zero(g, rep.x, rep.y, tol)
                if z is None or z == "sphere":
                    break
            g = left_root_extract(g, z, 10.0 * tol)
            count += 1

    if count > 0:
        return "point", count
    if m > 0:
        return "spherical", m
    raise NotARootError("polynomial does not vanish at %r or on its sphere" % (a,))


def taylor_coeffs(r, n):
    """Degree-n Taylor truncation of a SliceRational at the origin."""
    return r.taylor(n)


def extend_from_slice(h, axis, q):
    """Left slice extension of a function known on the slice of ``axis``.

    Evaluates ext(h)(x+Jy) = [h(x+Iy) + h(x-Iy) + J I (h(x-Iy) - h(x+Iy))]/2
    where q = x + Jy with y >= 0 canonically (qdecompose supplies y >= 0).
    h maps slice points to Quaternion or QMatrix values.
    """
    rep = qdecompose(q)
    zp = Quaternion.from_real(rep.x) + axis.q * rep.y
    zm = Quaternion.from_real(rep.x) - axis.q * rep.y
    vp = h(zp)
    vm = h(zm)
    if rep.axis is None:
        half = 0.5
        if isinstance(vp, QMatrix):
            return QMatrix((vp.data + vm.data) * half)
        return (vp + vm) / 2.0
    ji = rep.axis.q * axis.q
    if isinstance(vp, QMatrix):
        diff = vm - vp
        return QMatrix((vp.data + vm.data + diff.scale_left(ji).data) * 0.5)
    return (vp + vm + ji * (vm - vp)) / 2.0


# -------------------------------------------------------------------------------
# slice-rational functions
# -------------------------------------------------------------------------------

class SliceRational:
    """Quotient den(p)^{-1} num(p) with a real scalar denominator."""

    __slots__ = ("_num", "_den")

    def __init__(self, num, den):
        if not isinstance(num, StarPoly) or not isinstance(den, StarPoly):
            raise ShapeError("SliceRational needs StarPoly numerator and denominator")
        if not den.is_scalar():
            raise ShapeError("denominator must be 1x1")
        den = den.realified().trim(1e-15)
        if den.is_zero():
            raise DomainError("denominator is identically zero")
        self._num = num
        self._den = den

    @classmethod
    def from_poly(cls, p):
        return cls(p, StarPoly.one())

    @classmethod
    def one(cls, n=1):
        return cls(StarPoly.one(n), StarPoly.one())

    @classmethod
    def constant(cls, block):
        return cls(StarPoly.constant(block), StarPoly.one())

    @property
    def num(self):
        return self._num

    @property
    def den(self):
        return self._den

    @property
    def shape(self):
        return self._num.shape

    def is_scalar(self):
        return self._num.is_scalar()

    # -- evaluation ------------------------------------------------------------

    def eval_left(self, p, pole_rtol=1e-12):
        """Value den(p)^{-1} num(p); raises PoleError on the denominator's zero spheres."""
        p = p if isinstance(p, Quaternion) else Quaternion.from_real(p)
        d = self._den.eval_scalar(p)
        if d.norm() <= pole_rtol * self._den.eval_scale(p):
            rep = qdecompose(p)
            raise PoleError(rep.x, rep.y)
        return self._num.eval_left(p).scale_left(d.inverse())

    def eval_scalar(self, p):
        return self.eval_left(p).as_quaternion()

    def eval_many(self, points, pole_rtol=1e-12):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        dv = self._den.eval_many(pts)[:, 0, 0, :]
        dmag = np.sqrt(np.sum(dv * dv, axis=-1))
        scale = np.array([self._den.eval_scale(Quaternion.from_array(x)) for x in pts])
        bad = np.nonzero(dmag <= pole_rtol * scale)[0]
        if bad.size:
            rep = qdecompose(Quaternion.from_array(pts[bad[0]]))
            raise PoleError(rep.x, rep.y)
        nv = self._num.eval_many(pts)
        dinv = _accel.qinv(dv)
        return _accel.qmul(dinv[:, None, None, :], nv)

    # -- algebra -----------------------------------------------------------------

    def star(self, other):
        """(D1^{-1} N1) * (D2^{-1} N2) = (D1 D2)^{-1} (N1 * N2)."""
        if isinstance(other, StarPoly):
            other = SliceRational.from_poly(other)
        num = self._num.star(other._num)
        den = self._den.star(other._den).realified()
        return SliceRational(num, den)

    def scale(self, x):
        return SliceRational(self._num.scale(x), self._den)

    def __add__(self, other):
        if isinstance(other, StarPoly):
            other = SliceRational.from_poly(other)
        if self.shape != other.shape:
            raise ShapeError("rational shapes differ")
        num = mul_real_poly(self._num, other._den) + mul_real_poly(other._num, self._den)
        return SliceRational(num, self._den.star(other._den).realified())

    def __sub__(self, other):
        if isinstance(other, StarPoly):
            other = SliceRational.from_poly(other)
        return self + SliceRational(-other._num, other._den)

    def __neg__(self):
        return SliceRational(-self._num, self._den)

    # -- expansions ----------------------------------------------------------------

    def taylor(self, n):
        """Taylor truncation at 0 by recursive division of real coefficients."""
        dv = self._den.real_vector()
        d0 = dv[0]
        if abs(d0) <= 1e-14 * max(1.0, float(np.max(np.abs(dv)))):
            raise ExpansionError("denominator vanishes at the expansion point 0")
        r, s = self.shape
        out = np.zeros((n + 1, r, s, 4))
        nc = self._num._padded(max(n, self._num.degree))
        for k in range(n + 1):
            acc = nc[k].copy() if k < nc.shape[0] else np.zeros((r, s, 4))
            for i in range(1, min(k, len(dv) - 1) + 1):
                acc -= dv[i] * out[k - i]
            out[k] = acc / d0
        return StarPoly(out)

    def compose_real_mobius(self, alpha, beta, gamma, delta):
        """Composition with the real Mobius map m(p) = (alpha + beta p)(gamma + delta p)^{-1}.

        Real coefficients keep every piece central, so substitution is done
        by clearing (gamma + delta p) powers against a common degree.
        """
        u = StarPoly.scalar([float(alpha), float(beta)])
        v = StarPoly.scalar([float(gamma), float(delta)])
        d = max(self._num.degree, self._den.degree)

        powers_u = [StarPoly.one()]
        powers_v = [StarPoly.one()]
        for _ in range(d):
            powers_u.append(powers_u[-1].star(u))
            powers_v.append(powers_v[-1].star(v))

        def weigh(poly):
            r, s = poly.shape
            acc = StarPoly.zero(r, s)
            for n in range(poly.degree + 1):
                w = powers_u[n].star(powers_v[d - n]).real_vector()
                block = poly.coeffs[n]
                term = np.zeros((len(w), r, s, 4))
                for k, wk in enumerate(w):
                    term[k] = wk * block
                acc = acc + StarPoly(term)
            return acc

        num2 = weigh(self._num)
        den2 = weigh(self._den).realified().trim(1e-14)
        if den2.is_zero():
            raise DomainError("composition produced a zero denominator")
        return SliceRational(num2, den2)

    def normalize(self, tol=1e-9):
        """Divide out common real-polynomial factors found by root matching.

        Factors the denominator into real linear/quadratic pieces via its
        complex roots and removes any piece that also divides every entry of
        the numerator.  Optional; star arithmetic never calls it implicitly.
        """
        num, den = self._num, self._den
        changed = True
        while changed and den.degree > 0:
            changed = False
            dv = den.real_vector()
            roots = np.roots(dv[::-1]) if den.degree >= 1 else []
            seen = []
            for z in roots:
                if any(abs(z - w) <= tol * max(1.0, abs(w)) for w in seen):
                    continue
                seen.append(z)
                if abs(z.imag) <= tol * max(1.0, abs(z)):
                    piece = StarPoly.scalar([-z.real, 1.0])
                else:
                    piece = StarPoly.scalar([abs(z) ** 2, -2.0 * z.real, 1.0])
                qd, rd = divmod_real(den, piece)
                if rd.coeff_scale() > tol * den.coeff_scale():
                    continue
                qn, rn = divmod_real(num, piece)
                if rn.coeff_scale() > tol * max(1.0, num.coeff_scale()):
                    continue
                num, den = qn, qd.realified().trim(1e-14)
                changed = True
                break
        return SliceRational(num, den)

    # -- JSON --------------------------------------------------------------------------

    def to_json(self):
        return {"num": self._num.to_json(), "den": self._den.to_json()}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "num" not in obj or "den" not in obj:
            raise DomainError("SliceRational JSON needs num and den")
        return cls(StarPoly.from_json(obj["num"]), StarPoly.from_json(obj["den"]))

    def __repr__(self):
        return "SliceRational(shape=%dx%d, deg %d/%d)" % (
            self.shape + (self._num.degree, self._den.degree)
        )


def eval_left(f, p):
    """Left evaluation of a StarPoly or SliceRational at a quaternion."""
    return f.eval_left(p)
