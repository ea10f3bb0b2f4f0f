"""Truncated Taylor series in one and two variables.

A jet stores Taylor coefficients ``c[k] = f^(k)(x0) / k!``. Coefficient axes are
the trailing axes of ``c``; everything in front of them is the value shape, so a
single object can carry a batch of scalar jets ``(n, K+1)`` or a batch of vector
jets ``(3, n, K+1)``. Arithmetic broadcasts over the value shape with the usual
numpy rules and truncates to the smaller order.
"""
from __future__ import annotations

import math

import numpy as np

K_MAX = 12
DIV_TOL = 1e-13


class JetDomainError(ArithmeticError):
    """Raised on division by ~0, sqrt of a negative value and similar."""


class _Jet:
    __array_ufunc__ = None  # make numpy arrays and scalars defer to our reflected ops
    nvar = 0

    def __init__(self, c, base=None):
        self.c = np.asarray(c, dtype=float)
        self.base = base

    # -- structure -----------------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[-1] - 1

    @property
    def shape(self) -> tuple:
        return self.c.shape[: self.c.ndim - self.nvar]

    @property
    def value(self) -> np.ndarray:
        return self.c[(...,) + (0,) * self.nvar]

    def _new(self, c):
        return type(self)(c, self.base)

    def _zero_coeffs(self, shape=None, order=None):
        K = self.order if order is None else order
        shape = self.shape if shape is None else shape
        return np.zeros(tuple(shape) + (K + 1,) * self.nvar)

    def _lift(self, x):
        if isinstance(x, _Jet):
            if type(x) is not type(self):
                raise TypeError("cannot mix jets in a different number of variables")
            return x
        x = np.asarray(x, dtype=float)
        c = self._zero_coeffs(shape=x.shape)
        c[(...,) + (0,) * self.nvar] = x
        return self._new(c)

    def _align(self, other):
        other = self._lift(other)
        K = min(self.order, other.order)
        return self.truncate(K), other.truncate(K)

    def truncate(self, K: int):
        if K == self.order:
            return self
        if K > self.order:
            raise ValueError("cannot raise the order of a jet")
        sl = (...,) + (slice(0, K + 1),) * self.nvar
        c = self.c[sl]
        if self.nvar == 2:
            c = c * _mask2(K)
        return self._new(c)

    def __getitem__(self, idx):
        return self._new(self.c[idx])

    def __len__(self):
        return self.c.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(order={self.order}, shape={self.shape})"

    # -- arithmetic ----------------------------------------------------------
    def __neg__(self):
        return self._new(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = self._align(other)
        return self._new(a.c + b.c)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(other)
        return self._new(a.c - b.c)

    def __rsub__(self, other):
        a, b = self._align(other)
        return self._new(b.c - a.c)

    def __mul__(self, other):
        if not isinstance(other, _Jet):
            x = np.asarray(other, dtype=float)
            return self._new(self.c * x[(...,) + (None,) * self.nvar])
        a, b = self._align(other)
        return self._new(self._cauchy(a.c, b.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, _Jet):
            x = np.asarray(other, dtype=float)
            if np.any(np.abs(x) < DIV_TOL):
                raise JetDomainError("division by a value below 1e-13")
            return self._new(self.c / x[(...,) + (None,) * self.nvar])
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        p = float(p)
        if p.is_integer():
            n = int(p)
            if n < 0:
                return (self ** (-n)).reciprocal()
            result = self._lift(np.ones(self.shape))
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        x0 = self.value
        if self.order > 0 and np.any(x0 <= 0.0):
            raise JetDomainError(f"non-integer power {p} of a non-positive value")
        if np.any(x0 < 0.0):
            raise JetDomainError(f"non-integer power {p} of a negative value")
        coeffs = [x0**p]
        for k in range(1, self.order + 1):
            coeffs.append(coeffs[-1] * (p - k + 1) / (k * x0))
        return self._series(coeffs)

    # -- elementary functions ------------------------------------------------
    def _series(self, coeffs):
        """Evaluate sum_k coeffs[k] * (self - x0)^k by Horner's rule."""
        h = self - self.value
        r = self._lift(coeffs[-1])
        for ck in reversed(coeffs[:-1]):
            r = r * h + ck
        return r

    def reciprocal(self):
        x0 = self.value
        if np.any(np.abs(x0) < DIV_TOL):
            raise JetDomainError("division by a value below 1e-13")
        coeffs = [1.0 / x0]
        for _ in range(self.order):
            coeffs.append(-coeffs[-1] / x0)
        return self._series(coeffs)

    def sqrt(self):
        x0 = self.value
        if np.any(x0 < 0.0):
            raise JetDomainError("sqrt of a negative value")
        if self.order > 0 and np.any(x0 == 0.0):
            raise JetDomainError("sqrt is not differentiable at 0")
        return self**0.5

    def exp(self):
        e = np.exp(self.value)
        return self._series([e / math.factorial(k) for k in range(self.order + 1)])

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (s, c, -s, -c)
        return self._series([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (c, -s, -c, s)
        return self._series([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def abs_sign(self):
        """Sign of the value, for sign-preserving roots."""
        return np.sign(self.value)


class Jet1(_Jet):
    """Univariate jet; ``c[..., k]`` is the k-th Taylor coefficient."""

    nvar = 1

    @staticmethod
    def _cauchy(a, b):
        K = a.shape[-1] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(K + 1):
            out[..., k:] += a[..., k : k + 1] * b[..., : K + 1 - k]
        return out

    @classmethod
    def variable(cls, x0, K=K_MAX):
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros(x0.shape + (K + 1,))
        c[..., 0] = x0
        if K >= 1:
            c[..., 1] = 1.0
        return cls(c, base=x0)

    @classmethod
    def constant(cls, x, K=K_MAX):
        x = np.asarray(x, dtype=float)
        c = np.zeros(x.shape + (K + 1,))
        c[..., 0] = x
        return cls(c)

    def derivatives(self) -> np.ndarray:
        """Raw derivatives f^(k)(x0), k = 0..K."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact

    def deriv(self):
        if self.order < 1:
            raise ValueError("jet order too low to differentiate")
        k = np.arange(1, self.order + 1, dtype=float)
        return self._new(self.c[..., 1:] * k)

    def integrate(self, c0=0.0):
        c = np.zeros(self.c.shape[:-1] + (self.order + 2,))
        c[..., 0] = c0
        c[..., 1:] = self.c / np.arange(1, self.order + 2, dtype=float)
        return self._new(c)

    def eval_at(self, delta):
        """Sum of the truncated series at offset ``delta`` from the base point."""
        delta = np.asarray(delta, dtype=float)
        r = np.zeros(np.broadcast_shapes(self.shape, delta.shape))
        for k in range(self.order, -1, -1):
            r = r * delta + self.c[..., k]
        return r

    def deriv_at(self, delta):
        return self.deriv().eval_at(delta)


def _mask2(K):
    i = np.arange(K + 1)
    return (i[:, None] + i[None, :] <= K).astype(float)


class Jet2(_Jet):
    """Bivariate jet; ``c[..., i, j]`` multiplies ``du^i dv^j`` (zero for i+j > K)."""

    nvar = 2

    @staticmethod
    def _cauchy(a, b):
        K = a.shape[-1] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for i in range(K + 1):
            for j in range(K + 1 - i):
                out[..., i:, j:] += a[..., i : i + 1, j : j + 1] * b[..., : K + 1 - i, : K + 1 - j]
        return out * _mask2(K)

    @classmethod
    def variables(cls, u0, v0, K=K_MAX):
        u0, v0 = np.broadcast_arrays(np.asarray(u0, float), np.asarray(v0, float))
        cu = np.zeros(u0.shape + (K + 1, K + 1))
        cv = np.zeros(u0.shape + (K + 1, K + 1))
        cu[..., 0, 0] = u0
        cv[..., 0, 0] = v0
        if K >= 1:
            cu[..., 1, 0] = 1.0
            cv[..., 0, 1] = 1.0
        return cls(cu, base=(u0, v0)), cls(cv, base=(u0, v0))

    def du(self):
        K = self.order
        c = np.zeros(self.c.shape[:-2] + (K, K))
        for i in range(1, K + 1):
            c[..., i - 1, :] = i * self.c[..., i, :K]
        return self._new(c * _mask2(K - 1))

    def dv(self):
        K = self.order
        c = np.zeros(self.c.shape[:-2] + (K, K))
        for j in range(1, K + 1):
            c[..., :, j - 1] = j * self.c[..., :K, j]
        return self._new(c * _mask2(K - 1))

    def partial(self, i, j) -> np.ndarray:
        """The raw mixed partial d^(i+j) / du^i dv^j at the base point."""
        return self.c[..., i, j] * math.factorial(i) * math.factorial(j)

    def grad(self) -> np.ndarray:
        return np.stack([self.c[..., 1, 0], self.c[..., 0, 1]], axis=-1)


def stack(jets, axis=0):
    jets = list(jets)
    K = min(j.order for j in jets)
    jets = [j.truncate(K) for j in jets]
    nvar = jets[0].nvar
    if axis < 0:
        axis -= nvar
    return type(jets[0])(np.stack([j.c for j in jets], axis=axis), jets[0].base)


def horner(coeffs, h):
    """sum_k coeffs[k] * h^k where ``h`` is any jet (usually with zero value)."""
    r = h._lift(coeffs[-1]) * 1.0
    for ck in reversed(coeffs[:-1]):
        r = r * h + ck
    return r


def compose(outer: Jet1, inner: _Jet, tol=1e-9):
    """Substitute ``inner`` for the variable of ``outer``.

    ``outer`` is expanded at ``outer.base`` (if known); the value of ``inner``
    must match it.
    """
    if outer.base is not None:
        b = np.asarray(outer.base, dtype=float)
        if np.any(np.abs(inner.value - b) > tol * np.maximum(1.0, np.abs(b))):
            raise ValueError("inner jet value does not match the outer base point")
    h = inner - inner.value
    if h.order > outer.order:
        h = h.truncate(outer.order)
    coeffs = [outer.c[..., k] for k in range(h.order + 1)]
    out = horner(coeffs, h)
    out.base = inner.base
    return out


def revert(s: Jet1, x0=None) -> Jet1:
    """Series inverse of ``s``: a jet in ``sigma`` around ``s.value`` whose value
    is ``x0`` (default ``s.base``). Needs a nonzero first coefficient."""
    K = s.order
    s1 = s.c[..., 1]
    if np.any(np.abs(s1) < DIV_TOL):
        raise JetDomainError("series with vanishing linear term cannot be inverted")
    h = s - s.value
    h.base = None
    ident = np.zeros(s.c.shape)
    ident[..., 1] = 1.0
    T = Jet1(np.zeros(s.c.shape))
    T.c[..., 1] = 1.0 / s1
    for _ in range(K):
        r = horner([h.c[..., k] for k in range(K + 1)], T)
        T = Jet1(T.c + (ident - r.c) / s1[..., None])
    c = T.c.copy()
    if x0 is None:
        x0 = s.base if s.base is not None else 0.0
    c[..., 0] = x0
    return Jet1(c, base=s.value.copy())


def compose2(J: Jet2, x, y):
    """Evaluate the bivariate jet ``J`` along (x, y), jets of equal type.

    The values of x and y must be J's base point; only the increments enter.
    """
    dx = x - x.value
    dy = y - y.value
    K = min(J.order, dx.order)
    rows = []
    for i in range(K + 1):
        rows.append(horner([J.c[..., i, j] for j in range(K + 1 - i)], dy))
    r = rows[K]
    for i in range(K - 1, -1, -1):
        r = r * dx + rows[i]
    return r


def mdot(a, b):
    """Minkowski product of vector jets (component axis first)."""
    p = a * b
    return p[1] + p[2] - p[0]


def mcross(a, b):
    """Lorentz cross product of vector jets."""
    return stack(
        [
            -(a[1] * b[2] - a[2] * b[1]),
            -(a[0] * b[2] - a[2] * b[0]),
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def edot(a, b):
    p = a * b
    return p[0] + p[1] + p[2]
