"""Harmonic maps ``f = h + conj(g)`` built from pairs of truncated series."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ConstantTermTooSmall,
    DenominatorVanishes,
    DilatationNotBounded,
    DivergentTail,
    NotNormalized,
    NotNormalizedConvolver,
)
from .series import (
    R_CAP,
    RECIPROCAL_FLOOR,
    DiskPoint,
    TruncatedSeries,
    differentiate,
    divide,
    evaluate,
    hadamard,
    integrate_zero,
    multiply,
    tail_bound,
)

NORMALIZATION_TOL = 1e-12
DENOMINATOR_FLOOR = 1e-10
SUP_CHECK_ANGLES = 512


def cis(angle: float) -> complex:
    """``exp(i*angle)`` with components snapped to 0 or +-1 at multiples of pi/2."""
    c, s = math.cos(angle), math.sin(angle)
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    if c == 0.0:
        s = math.copysign(1.0, s)
    if s == 0.0:
        c = math.copysign(1.0, c)
    return complex(c, s)


@dataclass(frozen=True)
class Direction:
    """Convexity direction ``exp(i*gamma)`` with gamma reduced into [0, pi)."""

    gamma: float

    def __post_init__(self):
        g = math.fmod(float(self.gamma), math.pi)
        if g < 0:
            g += math.pi
        # fmod(pi, pi) lands just below pi for some representations
        if math.pi - g < 1e-15:
            g = 0.0
        object.__setattr__(self, "gamma", g)

    @property
    def unit(self) -> complex:
        return cis(self.gamma)

    @property
    def rotation(self) -> complex:
        """``exp(2i*gamma)``, the factor in ``h - exp(2i*gamma) g``."""
        return cis(2.0 * self.gamma)


DirectionLike = Union[Direction, float]


def as_direction(d: DirectionLike) -> Direction:
    return d if isinstance(d, Direction) else Direction(d)


@dataclass(frozen=True)
class ConeParams:
    eta: complex
    xi: complex
    gamma: Direction

    def __post_init__(self):
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "xi", complex(self.xi))
        object.__setattr__(self, "gamma", as_direction(self.gamma))
        for name in ("eta", "xi"):
            if abs(abs(getattr(self, name)) - 1.0) > 1e-12:
                raise ValueError(f"{name} must have unit modulus")


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """``f = h + conj(g)``; ``g`` is stored unconjugated.

    Both parts vanish at the origin.  ``h'(0)`` must be nonzero; it equals 1
    for normalized maps, but a shear with ``omega(0) != 0`` legitimately
    produces ``h'(0) != 1`` (see :func:`shear_construct`).
    """

    h: TruncatedSeries
    g: TruncatedSeries

    def __post_init__(self):
        if abs(self.h[0]) > NORMALIZATION_TOL or abs(self.g[0]) > NORMALIZATION_TOL:
            raise NotNormalized("harmonic map must satisfy f(0) = 0")
        if self.h.order < 1 or abs(self.h[1]) <= RECIPROCAL_FLOOR:
            raise NotNormalized("h'(0) must be nonzero")

    @property
    def order(self) -> int:
        return min(self.h.order, self.g.order)

    @property
    def is_normalized(self) -> bool:
        return abs(self.h[1] - 1.0) <= NORMALIZATION_TOL

    def __call__(self, z, r_cap: float = R_CAP):
        return evaluate_harmonic(self, z, r_cap=r_cap)

    def to_dict(self) -> dict:
        return {"h": self.h.to_dict(), "g": self.g.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "HarmonicMap":
        return cls(TruncatedSeries.from_dict(data["h"]), TruncatedSeries.from_dict(data["g"]))

    @classmethod
    def analytic(cls, F: TruncatedSeries) -> "HarmonicMap":
        return cls(F, TruncatedSeries.zeros(F.order))


def dilatation(f: HarmonicMap) -> TruncatedSeries:
    """Series of ``omega = g'/h'``."""
    return divide(differentiate(f.g), differentiate(f.h))


def analytic_prefunction(f: HarmonicMap, d: DirectionLike) -> TruncatedSeries:
    """``h - exp(2i*gamma) g``: univalent and convex in direction ``d`` iff ``f`` is."""
    rot = as_direction(d).rotation
    return f.h - f.g * rot


def sup_modulus_on_ring(a: TruncatedSeries, r: float = R_CAP, angles: int = SUP_CHECK_ANGLES) -> tuple[float, float]:
    """Return ``(max |a|, tail slack)`` on the ring ``|z| = r``."""
    z = r * np.exp(2j * np.pi * np.arange(angles) / angles)
    peak = float(np.max(np.abs(evaluate(a, z))))
    try:
        slack = tail_bound(a, r)
    except DivergentTail:
        slack = math.inf
    return peak, slack


def shear_construct(F: TruncatedSeries, omega: TruncatedSeries, d: DirectionLike, r_check: float = R_CAP) -> HarmonicMap:
    """Recover ``(h, g)`` from ``h - exp(2i*gamma) g = F`` and ``g' = omega h'``."""
    if abs(F[0]) > NORMALIZATION_TOL or abs(F[1] - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized("prefunction must satisfy F(0) = 0 and F'(0) = 1")
    peak, slack = sup_modulus_on_ring(omega, r_check)
    if not peak + slack < 1.0:
        raise DilatationNotBounded(
            f"|omega| on |z| = {r_check} reaches {peak:.6g} (tail slack {slack:.3g}); need < 1"
        )
    rot = as_direction(d).rotation
    denom = 1.0 - omega * rot
    if abs(denom[0]) <= RECIPROCAL_FLOOR:
        raise ConstantTermTooSmall("1 - exp(2i*gamma) omega(0) vanishes")
    dF = differentiate(F)
    dh = divide(dF, denom)
    dg = multiply(omega, dh)
    return HarmonicMap(integrate_zero(dh), integrate_zero(dg))


def check_convolver(phi: TruncatedSeries) -> None:
    if phi.order < 1 or abs(phi[0]) > NORMALIZATION_TOL or abs(phi[1] - 1.0) > NORMALIZATION_TOL:
        raise NotNormalizedConvolver("convolver must satisfy phi(0) = 0 and phi'(0) = 1")


def harmonic_convolve(f: HarmonicMap, phi: TruncatedSeries) -> HarmonicMap:
    """``f ~* phi = h*phi + conj(g*phi)``."""
    check_convolver(phi)
    return HarmonicMap(hadamard(f.h, phi), hadamard(f.g, phi))


def halfplane_transform(f: HarmonicMap, d: DirectionLike, p, r_cap: float = R_CAP):
    """``(h' + e^{2i gamma} g') / (h' - e^{2i gamma} g')`` at a point or array of points.

    A positive real part is equivalent to ``|e^{2i gamma} g'/h'| < 1`` there.
    """
    z = p.z if isinstance(p, DiskPoint) else p
    rot = as_direction(d).rotation
    dh = evaluate(differentiate(f.h), z, r_cap=r_cap)
    dg = evaluate(differentiate(f.g), z, r_cap=r_cap) * rot
    den = dh - dg
    small = np.abs(den) <= DENOMINATOR_FLOOR
    if np.any(small):
        witness = complex(np.asarray(z).reshape(-1)[int(np.argmax(np.asarray(small).reshape(-1)))])
        raise DenominatorVanishes(f"h' - e^(2i gamma) g' vanishes near z = {witness}", witness=witness)
    return (dh + dg) / den


def evaluate_harmonic(f: HarmonicMap, p, r_cap: float = R_CAP):
    z = p.z if isinstance(p, DiskPoint) else p
    value = evaluate(f.h, z, r_cap=r_cap) + np.conj(evaluate(f.g, z, r_cap=r_cap))
    return complex(value) if np.ndim(value) == 0 else value


def rotate_image(F: TruncatedSeries, angle: float) -> TruncatedSeries:
    """``exp(i*angle) * F``, turning the image of ``F`` about the origin."""
    return F * cmath.exp(1j * angle)
