"""Forward-mode dual numbers for exact first derivatives of scalar maps.

A ``Dual(value, eps)`` carries the pair (x, dx) through arithmetic so that a
smooth expression evaluated on it returns (f(x), f'(x)·dx) with no step-size
error.  Only the operations the generator and flow functions actually use are
implemented; anything fancier should fall back to central differences.
"""

from __future__ import annotations

import math


class Dual:
    __slots__ = ("value", "eps")

    def __init__(self, value: float, eps: float = 0.0):
        self.value = float(value)
        self.eps = float(eps)

    def __repr__(self):
        return f"Dual({self.value!r}, {self.eps!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value, self.eps + other.eps)
        return Dual(self.value + other, self.eps)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.value, -self.eps)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value, self.eps - other.eps)
        return Dual(self.value - other, self.eps)

    def __rsub__(self, other):
        return Dual(other - self.value, -self.eps)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value * other.value,
                        self.eps * other.value + self.value * other.eps)
        return Dual(self.value * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            v = self.value / other.value
            return Dual(v, (self.eps - v * other.eps) / other.value)
        return Dual(self.value / other, self.eps / other)

    def __rtruediv__(self, other):
        v = other / self.value
        return Dual(v, -v * self.eps / self.value)

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise TypeError("dual exponents are not supported")
        v = self.value ** n
        return Dual(v, n * self.value ** (n - 1) * self.eps)

    def __float__(self):
        raise TypeError("Dual cannot be coerced to float; use .value")

    def __eq__(self, other):
        other_v = other.value if isinstance(other, Dual) else other
        return self.value == other_v

    def __lt__(self, other):
        other_v = other.value if isinstance(other, Dual) else other
        return self.value < other_v

    def __le__(self, other):
        other_v = other.value if isinstance(other, Dual) else other
        return self.value <= other_v

    def __gt__(self, other):
        return not self.__le__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    def __hash__(self):
        return hash((self.value, self.eps))

    def sqrt(self):
        r = math.sqrt(self.value)
        return Dual(r, 0.5 * self.eps / r)

    def exp(self):
        e = math.exp(self.value)
        return Dual(e, e * self.eps)

    def log(self):
        return Dual(math.log(self.value), self.eps / self.value)


def dsqrt(x):
    """Square root that works on floats, Duals and numpy arrays alike."""
    if isinstance(x, Dual):
        return x.sqrt()
    if isinstance(x, (float, int)):
        return math.sqrt(x)
    import numpy
    return numpy.sqrt(x)


def value_of(x):
    """Strip the derivative part, if any."""
    return x.value if isinstance(x, Dual) else x
