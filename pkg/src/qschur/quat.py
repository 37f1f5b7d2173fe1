"""Quaternion scalars, sphere decomposition, and seeded point sampling.

A quaternion p = x0 + i x1 + j x2 + k x3 is stored as a read-only float64
array of shape (4,).  The unit relations are i^2 = j^2 = k^2 = -1 and
ij = -ji = k, jk = -kj = i, ki = -ik = j.

Every nonreal p = x + I y (y > 0, I a purely imaginary unit) sweeps the
2-sphere [p] = {x + J y : J imaginary unit}, which is determined by the
pair (x, y) alone.  All randomness flows through explicitly passed
``numpy.random.Generator`` handles; there is no module-level RNG state.
"""

import numpy as np

from . import _accel
from .errors import DomainError

# a point counts as real when its imaginary modulus is below this times
# max(1, |p|); sphere membership and axis extraction are singular there
REAL_AXIS_RTOL = 1e-13


class Quaternion:
    """Immutable quaternion scalar with componentwise arithmetic."""

    __slots__ = ("_a",)

    def __init__(self, x0=0.0, x1=0.0, x2=0.0, x3=0.0):
        a = np.array([x0, x1, x2, x3], dtype=np.float64)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.shape != (4,):
            raise DomainError("quaternion array must have shape (4,), got %s" % (arr.shape,))
        return cls(arr[0], arr[1], arr[2], arr[3])

    @classmethod
    def from_real(cls, x):
        return cls(float(x), 0.0, 0.0, 0.0)

    # -- components ---------------------------------------------------------

    @property
    def x0(self):
        return float(self._a[0])

    @property
    def x1(self):
        return float(self._a[1])

    @property
    def x2(self):
        return float(self._a[2])

    @property
    def x3(self):
        return float(self._a[3])

    @property
    def re(self):
        return float(self._a[0])

    def as_array(self):
        """Read-only (4,) view of the components."""
        return self._a

    # -- algebra ------------------------------------------------------------

    def conj(self):
        return Quaternion(self._a[0], -self._a[1], -self._a[2], -self._a[3])

    def normsq(self):
        return float(np.dot(self._a, self._a))

    def norm(self):
        return float(np.sqrt(self.normsq()))

    __abs__ = norm

    def imag_modulus(self):
        v = self._a[1:]
        return float(np.sqrt(np.dot(v, v)))

    def is_real(self, rtol=REAL_AXIS_RTOL):
        return self.imag_modulus() < rtol * max(1.0, self.norm())

    def inverse(self):
        n2 = self.normsq()
        if n2 == 0.0:
            raise DomainError("zero quaternion has no inverse")
        c = self.conj()
        return Quaternion(c.x0 / n2, c.x1 / n2, c.x2 / n2, c.x3 / n2)

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion.from_array(self._a + other._a)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion.from_array(self._a - other._a)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion.from_array(-self._a)

    def __mul__(self, other):
        other = _coerce(other)
        return Quaternion.from_array(_accel.qmul(self._a, other._a))

    def __rmul__(self, other):
        return _coerce(other) * self

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self._a / float(other))
        return self * _coerce(other).inverse()

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise DomainError("quaternion powers are nonnegative integers")
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def isclose(self, other, tol=1e-12):
        other = _coerce(other)
        scale = max(1.0, self.norm(), other.norm())
        return bool(np.max(np.abs(self._a - other._a)) <= tol * scale)

    def __repr__(self):
        return "Quaternion(%r, %r, %r, %r)" % (self.x0, self.x1, self.x2, self.x3)

    # -- JSON ---------------------------------------------------------------

    def to_json(self):
        """Array encoding [x0, x1, x2, x3] of finite doubles."""
        return [self.x0, self.x1, self.x2, self.x3]

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 4:
            raise DomainError("quaternion JSON must be a 4-element array")
        vals = []
        for v in obj:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DomainError("quaternion components must be numbers")
            f = float(v)
            if not np.isfinite(f):
                raise DomainError("quaternion components must be finite")
            vals.append(f)
        return cls(*vals)


def _coerce(v):
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion.from_real(v)
    raise TypeError("cannot interpret %r as a quaternion" % (v,))


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


class ImaginaryUnit:
    """Purely imaginary unit quaternion; satisfies I^2 = -1 within 1e-14."""

    __slots__ = ("_q",)

    def __init__(self, direction):
        q = direction if isinstance(direction, Quaternion) else Quaternion.from_array(direction)
        if abs(q.re) > 1e-13 * max(1.0, q.norm()):
            raise DomainError("imaginary unit must have zero real part")
        n = q.imag_modulus()
        if n == 0.0:
            raise DomainError("imaginary unit needs a nonzero direction")
        self._q = Quaternion(0.0, q.x1 / n, q.x2 / n, q.x3 / n)

    @property
    def q(self):
        return self._q

    def as_array(self):
        return self._q.as_array()

    def __mul__(self, other):
        return self._q * other

    def __neg__(self):
        return ImaginaryUnit(-self._q)

    def __repr__(self):
        return "ImaginaryUnit(%r)" % (self._q,)


class SphereRep:
    """Sphere coordinates (x, y, axis) of p = x + axis*y with y >= 0.

    axis is None exactly when p is real; the sphere [p] is determined by
    (x, y) alone.
    """

    __slots__ = ("x", "y", "axis")

    def __init__(self, x, y, axis=None):
        self.x = float(x)
        self.y = float(y)
        self.axis = axis

    def reconstruct(self):
        if self.axis is None:
            return Quaternion.from_real(self.x)
        return Quaternion.from_real(self.x) + self.axis.q * self.y

    def same_sphere(self, other, tol=1e-12):
        scale = max(1.0, abs(self.x), abs(self.y), abs(other.x), abs(other.y))
        return abs(self.x - other.x) <= tol * scale and abs(self.y - other.y) <= tol * scale

    def __repr__(self):
        return "SphereRep(x=%r, y=%r, axis=%r)" % (self.x, self.y, self.axis)


def qproduct(a, b):
    """Hamilton product of two quaternions."""
    return _coerce(a) * _coerce(b)


def qinverse(a):
    """Multiplicative inverse conj(a)/|a|^2; zero input raises DomainError."""
    return _coerce(a).inverse()


def qdecompose(p, rtol=REAL_AXIS_RTOL):
    """Split p into SphereRep(x, y, axis); axis absent for real p."""
    p = _coerce(p)
    x = p.re
    y = p.imag_modulus()
    if y < rtol * max(1.0, p.norm()):
        return SphereRep(x, 0.0)
    axis = ImaginaryUnit(Quaternion(0.0, p.x1, p.x2, p.x3))
    return SphereRep(x, y, axis)


def same_sphere(p, q, tol=1e-12):
    """True when p and q lie on the same 2-sphere (equal x and y)."""
    return qdecompose(p).same_sphere(qdecompose(q), tol)


# ---------------------------------------------------------------------------
# seeded sampling; every caller passes its own Generator
# ---------------------------------------------------------------------------

def sample_imaginary_unit(rng):
    """Uniform random axis on the 2-sphere of imaginary units."""
    while True:
        v = rng.normal(size=3)
        n = np.sqrt(np.dot(v, v))
        if n > 1e-8:
            return ImaginaryUnit(Quaternion(0.0, v[0] / n, v[1] / n, v[2] / n))


def sample_ball_point(rng, radius=0.9):
    """Uniform random quaternion in the closed 4-ball of the given radius."""
    while True:
        v = rng.normal(size=4)
        n = np.sqrt(np.dot(v, v))
        if n > 1e-8:
            break
    r = radius * rng.random() ** 0.25
    return Quaternion.from_array(v * (r / n))

def sample_halfspace_point(rng, re_low=0.1, re_high=2.0, im_radius=2.0):
    """Random point with Re(p) in (re_low, re_high), imaginary part in a 3-ball."""
    x0 = rng.uniform(re_low, re_high)
    v = rng.normal(size=3)
    n = np.sqrt(np.dot(v, v))
    if n < 1e-12:
        v, n = np.array([1.0, 0.0, 0.0]), 1.0
    r = im_radius * rng.random() ** (1.0 / 3.0)
    v = v * (r / n)
    return Quaternion(x0, v[0], v[1], v[2])
