"""Truncated complex power series on the unit disk.

A :class:`TruncatedSeries` holds the Taylor coefficients ``c_0 .. c_N`` of an
analytic function about ``z = 0``.  Coefficients beyond ``N`` are unknown,
not zero, so binary operations on series of different orders work at the
smaller order::

    >>> one_minus_z = TruncatedSeries.from_polynomial([1, -1], order=4)
    >>> reciprocal(one_minus_z).coeffs.real
    array([1., 1., 1., 1., 1.])

Every value is immutable; every operation returns a new series.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import ConstantTermTooSmall, DivergentTail, RadiusExceeded

DEFAULT_ORDER = 256
R_CAP = 0.95
RECIPROCAL_FLOOR = 1e-8
MAX_ORDER = 8192
TAIL_WINDOW = 8
TAIL_SAFETY = 2.0

# |z| slightly above the cap from rounding of r*exp(it) is not an error.
_RADIUS_RTOL = 1e-12


def default_order() -> int:
    """Engine truncation order; ``HCONV_ORDER`` overrides the built-in 256."""
    raw = os.environ.get("HCONV_ORDER")
    if raw is None or raw == "":
        return DEFAULT_ORDER
    order = int(raw)
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"HCONV_ORDER must lie in [1, {MAX_ORDER}], got {order}")
    return order


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk, checked against the evaluation cap."""

    z: complex
    r_cap: float = R_CAP

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        _check_radius(self.z, self.r_cap)


def _check_radius(z, r_cap):
    rmax = float(np.max(np.abs(z))) if np.ndim(z) else abs(z)
    if rmax > r_cap * (1.0 + _RADIUS_RTOL):
        raise RadiusExceeded(f"|z| = {rmax!r} exceeds the evaluation cap {r_cap!r}")


class TruncatedSeries:
    """Degree-N Taylor polynomial ``sum c_n z^n`` with complex coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[complex]):
        arr = np.array(coeffs, dtype=np.complex128).reshape(-1)
        if arr.size == 0:
            raise ValueError("a series needs at least the constant coefficient")
        if arr.size - 1 > MAX_ORDER:
            raise ValueError(f"order {arr.size - 1} exceeds engine maximum {MAX_ORDER}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series coefficients must be finite")
        arr.flags.writeable = False
        self._coeffs = arr

    @classmethod
    def constant(cls, value: complex, order: int | None = None) -> "TruncatedSeries":
        order = default_order() if order is None else order
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = value
        return cls(c)

    @classmethod
    def zeros(cls, order: int | None = None) -> "TruncatedSeries":
        return cls.constant(0.0, order)

    @classmethod
    def from_polynomial(cls, coeffs, order: int | None = None) -> "TruncatedSeries":
        """Pad (or cut) a finite coefficient list to the requested order."""
        order = default_order() if order is None else order
        c = np.zeros(order + 1, dtype=np.complex128)
        src = np.asarray(coeffs, dtype=np.complex128)[: order + 1]
        c[: src.size] = src
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def order(self) -> int:
        return self._coeffs.size - 1

    def __len__(self):
        return self._coeffs.size

    def __getitem__(self, n):
        return self._coeffs[n]

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self._coeffs[:6])
        more = ", ..." if self.order > 5 else ""
        return f"TruncatedSeries(order={self.order}, [{head}{more}])"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return np.array_equal(self._coeffs, other._coeffs)

    __hash__ = None

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self._coeffs[: order + 1])

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return add(self, other)
        c = self._coeffs.copy()
        c[0] += other
        return TruncatedSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return TruncatedSeries(self._coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return divide(self, other)
        return TruncatedSeries(self._coeffs / complex(other))

    def __call__(self, z, r_cap: float = R_CAP):
        return evaluate(self, z, r_cap=r_cap)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [[float(c.real), float(c.imag)] for c in self._coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedSeries":
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        if len(coeffs) != data["order"] + 1:
            raise ValueError("coefficient count does not match the declared order")
        return cls(coeffs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        return cls.from_dict(json.loads(text))


SeriesLike = Union[TruncatedSeries, complex, float]


def _common(a: TruncatedSeries, b: TruncatedSeries):
    n = min(a.order, b.order) + 1
    return a.coeffs[:n], b.coeffs[:n]


def monomial(k: int, coeff: complex = 1.0, order: int | None = None) -> TruncatedSeries:
    """``coeff * z**k`` at the given order."""
    order = default_order() if order is None else order
    c = np.zeros(order + 1, dtype=np.complex128)
    if k <= order:
        c[k] = coeff
    return TruncatedSeries(c)


def geometric(order: int | None = None) -> TruncatedSeries:
    """The convolution identity ``z/(1-z) = z + z^2 + ...``."""
    order = default_order() if order is None else order
    c = np.ones(order + 1, dtype=np.complex128)
    c[0] = 0.0
    return TruncatedSeries(c)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    x, y = _common(a, b)
    return TruncatedSeries(x + y)


def subtract(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    x, y = _common(a, b)
    return TruncatedSeries(x - y)


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product, truncated at the common order."""
    x, y = _common(a, b)
    # np.convolve is a direct sum (no FFT), so exact products stay exact.
    return TruncatedSeries(np.convolve(x, y)[: x.size])


def reciprocal(a: TruncatedSeries, floor: float = RECIPROCAL_FLOOR) -> TruncatedSeries:
    """Series of ``1/a`` by the recurrence ``d_n = -(1/c_0) sum_{k=1..n} c_k d_{n-k}``."""
    c = a.coeffs
    if abs(c[0]) <= floor:
        raise ConstantTermTooSmall(f"|c_0| = {abs(c[0])!r} is at or below the floor {floor!r}")
    inv0 = 1.0 / c[0]
    d = np.zeros_like(c)
    d[0] = inv0
    for n in range(1, c.size):
        d[n] = -inv0 * np.dot(c[1 : n + 1], d[n - 1 :: -1])
    return TruncatedSeries(d)


def divide(a: TruncatedSeries, b: TruncatedSeries, floor: float = RECIPROCAL_FLOOR) -> TruncatedSeries:
    """Quotient ``a/b`` by forward substitution, at the common order.

    Same series as ``multiply(a, reciprocal(b))`` without rounding the
    intermediate reciprocal.
    """
    x, y = _common(a, b)
    if abs(y[0]) <= floor:
        raise ConstantTermTooSmall(f"|c_0| = {abs(y[0])!r} is at or below the floor {floor!r}")
    inv0 = 1.0 / y[0]
    q = np.zeros_like(x)
    q[0] = x[0] * inv0
    for n in range(1, x.size):
        q[n] = (x[n] - np.dot(y[1 : n + 1], q[n - 1 :: -1])) * inv0
    return TruncatedSeries(q)


def times_z(a: TruncatedSeries) -> TruncatedSeries:
    """Exact product with ``z``; the order grows by one."""
    return TruncatedSeries(np.concatenate(([0.0], a.coeffs))[: MAX_ORDER + 1])


def differentiate(a: TruncatedSeries) -> TruncatedSeries:
    c = a.coeffs
    if c.size == 1:
        return TruncatedSeries([0.0])
    n = np.arange(1, c.size)
    return TruncatedSeries(c[1:] * n)


def integrate_zero(a: TruncatedSeries) -> TruncatedSeries:
    """Antiderivative vanishing at 0; the order grows by one up to ``MAX_ORDER``."""
    c = a.coeffs
    out = np.zeros(c.size + 1, dtype=np.complex128)
    out[1:] = c / np.arange(1, c.size + 1)
    return TruncatedSeries(out[: MAX_ORDER + 1])


def hadamard(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Coefficientwise (Hadamard) product ``sum a_n b_n z^n``."""
    x, y = _common(a, b)
    return TruncatedSeries(x * y)


def shift(a: TruncatedSeries, k: int = 1) -> TruncatedSeries:
    """Multiply by ``z**k`` keeping the order fixed."""
    c = np.zeros_like(a.coeffs)
    if k < c.size:
        c[k:] = a.coeffs[: c.size - k]
    return TruncatedSeries(c)


def divide_by_z(a: TruncatedSeries) -> TruncatedSeries:
    """Exact division by ``z``; requires ``c_0 == 0`` and lowers the order by one."""
    if a.coeffs[0] != 0:
        raise ValueError("series has a nonzero constant term; not divisible by z")
    if a.order == 0:
        return TruncatedSeries([0.0])
    return TruncatedSeries(a.coeffs[1:])


def evaluate(a: TruncatedSeries, z, r_cap: float = R_CAP):
    """Horner evaluation at a point or an array of points with ``|z| <= r_cap``."""
    if isinstance(z, DiskPoint):
        z = z.z
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=np.complex128)
    _check_radius(zz, r_cap)
    c = a.coeffs
    acc = np.full(zz.shape, c[-1], dtype=np.complex128)
    for coef in c[-2::-1]:
        acc = acc * zz + coef
    return complex(acc) if scalar else acc


def tail_bound(a: TruncatedSeries, r: float, r_cap: float = R_CAP) -> float:
    """Estimate of ``|sum_{n>N} c_n z^n|`` at ``|z| = r``.

    The growth rate is taken as the largest root-test value
    ``|c_n|**(1/n)`` over the trailing window; the trailing envelope is then
    continued geometrically and doubled for safety.
    """
    if r < 0 or r > r_cap * (1.0 + _RADIUS_RTOL):
        raise RadiusExceeded(f"tail radius {r!r} outside [0, {r_cap!r}]")
    if r == 0:
        return 0.0
    c = np.abs(a.coeffs)
    N = a.order
    lo = max(1, N - TAIL_WINDOW + 1)
    idx = np.arange(lo, N + 1)
    window = c[lo:]
    if idx.size == 0 or not np.any(window > 0):
        return 0.0
    nz = window > 0
    rho = float(np.max(np.exp(np.log(window[nz]) / idx[nz])))
    q = rho * r
    if q >= 1.0:
        raise DivergentTail(f"coefficient growth {rho:.6g} gives rho*r = {q:.6g} >= 1")
    anchor = float(np.max(window * rho ** (N - idx).astype(float)))
    return TAIL_SAFETY * anchor * math.exp(N * math.log(r)) * q / (1.0 - q)
