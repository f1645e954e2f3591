"""Truncated bivariate Taylor arithmetic.

A :class:`TPoly` holds the Taylor coefficients of a function of ``(u, v)`` up to
a fixed total order at a batch of base points.  Catalog surfaces are written
once in terms of these objects, so every partial derivative they report is
exact up to rounding.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def monomials(order: int) -> tuple[tuple[int, int], ...]:
    """Exponent pairs ``(a, b)`` of ``u**a v**b`` ordered by total degree."""
    return tuple((d - b, b) for d in range(order + 1) for b in range(d + 1))


@lru_cache(maxsize=None)
def _index(order: int) -> dict[tuple[int, int], int]:
    return {m: k for k, m in enumerate(monomials(order))}


@lru_cache(maxsize=None)
def _product_table(order: int) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    mons = monomials(order)
    idx = _index(order)
    table = []
    for k, (a, b) in enumerate(mons):
        pairs = []
        for i, (a1, b1) in enumerate(mons):
            j = idx.get((a - a1, b - b1))
            if j is not None and a1 <= a and b1 <= b:
                pairs.append((i, j))
        table.append((k, tuple(pairs)))
    return tuple(table)


class TPoly:
    """Taylor polynomial truncated at total degree ``order``.

    ``c[k]`` is the coefficient of ``monomials(order)[k]``; trailing axes of
    ``c`` are the batch.
    """

    __slots__ = ("c", "order")
    __array_priority__ = 100

    def __init__(self, c: np.ndarray, order: int):
        self.c = c
        self.order = order

    @classmethod
    def variables(cls, u, v, order: int) -> tuple["TPoly", "TPoly"]:
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        n = len(monomials(order))
        cu = np.zeros((n,) + u.shape)
        cv = np.zeros((n,) + u.shape)
        cu[0] = u
        cv[0] = v
        if order >= 1:
            cu[1] = 1.0
            cv[2] = 1.0
        return cls(cu, order), cls(cv, order)

    @classmethod
    def from_univariate(cls, coeffs, order: int, var: int = 0) -> "TPoly":
        """Build from Taylor coefficients in one variable (``var`` 0 = u, 1 = v)."""
        first = np.asarray(coeffs[0], float)
        c = np.zeros((len(monomials(order)),) + first.shape)
        idx = _index(order)
        for k in range(order + 1):
            key = (k, 0) if var == 0 else (0, k)
            c[idx[key]] = coeffs[k]
        return cls(c, order)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "TPoly":
        if isinstance(other, TPoly):
            return other
        c = np.zeros_like(self.c)
        c[0] = other
        return TPoly(c, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return TPoly(self.c + other.c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TPoly(-self.c, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        return TPoly(self.c - other.c, self.order)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TPoly):
            return TPoly(self.c * other, self.order)
        a, b = self.c, other.c
        out = np.empty(np.broadcast_shapes(a.shape, b.shape))
        for k, pairs in _product_table(self.order):
            acc = a[pairs[0][0]] * b[pairs[0][1]]
            for i, j in pairs[1:]:
                acc = acc + a[i] * b[j]
            out[k] = acc
        return TPoly(out, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TPoly):
            return TPoly(self.c / other, self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if isinstance(n, (int, np.integer)) and n >= 0:
            out = self._coerce(1.0)
            for _ in range(n):
                out = out * self
            return out
        return self.compose([lambda x, k=k: _falling(n, k) * x ** (n - k) for k in range(self.order + 1)])

    # -- composition with univariate functions -----------------------------
    def compose(self, derivs) -> "TPoly":
        """Return ``g(self)`` given ``derivs[k](x) = g^{(k)}(x)``."""
        a0 = self.c[0]
        h = TPoly(self.c.copy(), self.order)
        h.c[0] = 0.0
        out = self._coerce(derivs[0](a0))
        hk = None
        for k in range(1, self.order + 1):
            hk = h if hk is None else hk * h
            out = out + hk * (derivs[k](a0) / math.factorial(k))
        return out

    def reciprocal(self) -> "TPoly":
        return self.compose([lambda x, k=k: (-1) ** k * math.factorial(k) / x ** (k + 1)
                             for k in range(self.order + 1)])

    def sin(self) -> "TPoly":
        cyc = [np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)]
        return self.compose([cyc[k % 4] for k in range(self.order + 1)])

    def cos(self) -> "TPoly":
        cyc = [np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin]
        return self.compose([cyc[k % 4] for k in range(self.order + 1)])

    def sqrt(self) -> "TPoly":
        return self ** 0.5

    def exp(self) -> "TPoly":
        return self.compose([np.exp] * (self.order + 1))

    # -- derivatives --------------------------------------------------------
    def partial(self, a: int, b: int) -> np.ndarray:
        """Value of d^a/du^a d^b/dv^b at the base points."""
        return self.c[_index(self.order)[(a, b)]] * (math.factorial(a) * math.factorial(b))

    def diff(self, var: int) -> "TPoly":
        """Derivative as a TPoly of one lower order."""
        lo = self.order - 1
        idx = _index(self.order)
        c = np.zeros((len(monomials(lo)),) + self.c.shape[1:])
        for k, (a, b) in enumerate(monomials(lo)):
            if var == 0:
                c[k] = (a + 1) * self.c[idx[(a + 1, b)]]
            else:
                c[k] = (b + 1) * self.c[idx[(a, b + 1)]]
        return TPoly(c, lo)

    def integrate_u(self, value0) -> "TPoly":
        """Antiderivative in u, raising the order by one.

        Only valid for functions of u alone: pure-v coefficients are set to 0.
        """
        hi = self.order + 1
        idx = _index(self.order)
        c = np.zeros((len(monomials(hi)),) + self.c.shape[1:])
        for k, (a, b) in enumerate(monomials(hi)):
            if a >= 1:
                c[k] = self.c[idx[(a - 1, b)]] / a
        c[0] = value0
        return TPoly(c, hi)

    def raise_order(self, hi: int) -> "TPoly":
        """Same polynomial viewed at a higher truncation order.

        Exact for polynomials of degree at most ``self.order`` (such as the
        coordinate variables); otherwise the new coefficients are zero.
        """
        c = np.zeros((len(monomials(hi)),) + self.c.shape[1:])
        c[: self.c.shape[0]] = self.c
        return TPoly(c, hi)

    @property
    def value(self) -> np.ndarray:
        return self.c[0]


def _falling(x: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= x - i
    return out


def sin(x):
    return x.sin() if isinstance(x, TPoly) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, TPoly) else np.cos(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, TPoly) else np.sqrt(x)


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def dot(a, b):
    out = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        out = out + x * y
    return out


def normalize(a):
    inv = dot(a, a).sqrt().reciprocal()
    return tuple(x * inv for x in a)
