"""Concrete prefunctions, convolvers and dilatations.

Every prefunction is normalized (``c_0 = 0``, ``c_1 = 1``) and is given by
its closed-form Taylor coefficients rather than by series arithmetic, so it
can serve as an independent reference for the series engine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ParamOutOfRange
from .harmonic import cis
from .series import TruncatedSeries, default_order, geometric, monomial

THETA_MIN = 0.05
THETA_MAX = math.pi - 0.05


class DcpStatus(str, enum.Enum):
    PROVEN_DCP = "PROVEN_DCP"
    CANDIDATE = "CANDIDATE"
    NOT_DCP = "NOT_DCP"


def _check_range(name, value, lo, hi):
    if not (lo <= value <= hi) or math.isnan(value):
        raise ParamOutOfRange(f"{name} = {value!r} outside [{lo!r}, {hi!r}]")


@dataclass(frozen=True)
class FamilyParams:
    alpha: float = 0.5
    beta: float = 0.0
    theta: float = math.pi / 2
    slant_alpha: float = math.pi / 4

    def __post_init__(self):
        _check_range("alpha", self.alpha, -1.0, 1.0)
        _check_range("beta", self.beta, -1.0, 1.0)
        _check_range("theta", self.theta, THETA_MIN, THETA_MAX)
        _check_range("slant_alpha", self.slant_alpha, -math.pi / 2, math.pi / 2)


def _order(order):
    return default_order() if order is None else order


def _alternating_pattern(x: float, order: int) -> TruncatedSeries:
    # z(1 - x z)/(1 - z^2): odd coefficients 1, even ones -x
    c = np.zeros(order + 1, dtype=np.complex128)
    c[1::2] = 1.0
    c[2::2] = -x
    return TruncatedSeries(c)


def f_alpha_prefunction(alpha: float, order: int | None = None) -> TruncatedSeries:
    """``z(1 - alpha z)/(1 - z^2)``, the sum ``h + g`` of the alpha family."""
    _check_range("alpha", alpha, -1.0, 1.0)
    return _alternating_pattern(alpha, _order(order))


def phi_beta(beta: float, order: int | None = None) -> TruncatedSeries:
    """``z(1 - beta z)/(1 - z^2)``; typically real, convex only for beta = +-1."""
    _check_range("beta", beta, -1.0, 1.0)
    return _alternating_pattern(beta, _order(order))


def f_theta_prefunction(theta: float, order: int | None = None) -> TruncatedSeries:
    """``log((1 + z e^{i theta})/(1 + z e^{-i theta})) / (2i sin theta)``.

    Coefficients are ``(-1)^(n+1) sin(n theta) / (n sin theta)``.
    """
    _check_range("theta", theta, THETA_MIN, THETA_MAX)
    order = _order(order)
    n = np.arange(1, order + 1)
    c = np.zeros(order + 1, dtype=np.complex128)
    c[1:] = np.where(n % 2 == 1, 1.0, -1.0) * np.sin(n * theta) / (n * math.sin(theta))
    c[1] = 1.0
    return TruncatedSeries(c)


def f_theta_rho(theta: float) -> Callable:
    """Closed form of ``(1 - z^2) F_theta'(z)``, usable up to the unit circle."""
    _check_range("theta", theta, THETA_MIN, THETA_MAX)
    u = cis(theta)

    def rho(z):
        z = np.asarray(z, dtype=np.complex128)
        return (1 - z * z) / ((1 + z * u) * (1 + z * u.conjugate()))

    return rho


def koebe_shear_prefunction(order: int | None = None) -> TruncatedSeries:
    """``z/(1 - z)^2`` with coefficients ``c_n = n``."""
    order = _order(order)
    return TruncatedSeries(np.arange(order + 1, dtype=np.complex128))


def slanted_halfplane_prefunction(slant_alpha: float, order: int | None = None) -> TruncatedSeries:
    """``z/(1 - e^{i alpha} z)`` with coefficients ``e^{i(n-1) alpha}``."""
    _check_range("slant_alpha", slant_alpha, -math.pi / 2, math.pi / 2)
    order = _order(order)
    c = np.zeros(order + 1, dtype=np.complex128)
    for n in range(1, order + 1):
        c[n] = cis((n - 1) * slant_alpha)
    return TruncatedSeries(c)


def strip_map(order: int | None = None) -> TruncatedSeries:
    """``(1/2) log((1 + z)/(1 - z)) = z + z^3/3 + z^5/5 + ...``."""
    order = _order(order)
    c = np.zeros(order + 1, dtype=np.complex128)
    odd = np.arange(1, order + 1, 2)
    c[odd] = 1.0 / odd
    return TruncatedSeries(c)


def f_alpha_closed_form_real_part(alpha: float, z):
    """``(1-|z|^2)(1+|z|^2-2 alpha Re z)/|1-z^2|^2``, equal to ``Re[(1-z^2) F_alpha'(z)]``."""
    z = np.asarray(z, dtype=np.complex128)
    r2 = np.abs(z) ** 2
    return (1 - r2) * (1 + r2 - 2 * alpha * z.real) / np.abs(1 - z * z) ** 2


class Convolver(NamedTuple):
    name: str
    series: TruncatedSeries
    status: DcpStatus


def phi_beta_status(beta: float) -> DcpStatus:
    # beta = -1 is the identity z/(1-z); beta = 1 gives f -> -f(-z), a point reflection.
    if beta in (-1.0, 1.0):
        return DcpStatus.PROVEN_DCP
    return DcpStatus.NOT_DCP


def candidate_convolvers(beta: float = 0.0, order: int | None = None) -> list[Convolver]:
    order = _order(order)
    return [
        Convolver("identity", geometric(order), DcpStatus.PROVEN_DCP),
        Convolver("linear", monomial(1, order=order), DcpStatus.PROVEN_DCP),
        Convolver("strip", strip_map(order), DcpStatus.CANDIDATE),
        Convolver("phi_beta", phi_beta(beta, order), phi_beta_status(beta)),
    ]


def convolver_by_name(name: str, beta: float = 0.0, order: int | None = None) -> Convolver:
    for conv in candidate_convolvers(beta, order):
        if conv.name == name:
            return conv
    raise KeyError(f"unknown convolver {name!r}; choose from identity, linear, strip, phi_beta")


def mobius_dilatation(a: complex, mu: float = 1.0, order: int | None = None) -> TruncatedSeries:
    """``mu (a + z)/(1 + conj(a) z)``, a disk automorphism scaled by ``|mu| <= 1``."""
    a = complex(a)
    if abs(a) >= 1:
        raise ParamOutOfRange(f"Mobius parameter |a| = {abs(a)} must be < 1")
    if abs(mu) > 1:
        raise ParamOutOfRange(f"scale |mu| = {abs(mu)} must be <= 1")
    order = _order(order)
    c = np.zeros(order + 1, dtype=np.complex128)
    c[0] = a
    n = np.arange(1, order + 1)
    c[1:] = (1 - abs(a) ** 2) * (-a.conjugate()) ** (n - 1)
    return TruncatedSeries(c * mu)


def monomial_dilatation(lam: complex, n: int, order: int | None = None) -> TruncatedSeries:
    if abs(lam) > 1:
        raise ParamOutOfRange(f"|lambda| = {abs(lam)} must be <= 1")
    if n < 1:
        raise ParamOutOfRange("monomial dilatation needs n >= 1")
    return monomial(n, lam, order=_order(order))


def dilatation_catalog(order: int | None = None) -> list[tuple[str, TruncatedSeries]]:
    order = _order(order)
    return [
        ("zero", TruncatedSeries.zeros(order)),
        ("z", monomial(1, order=order)),
        ("z2", monomial(2, order=order)),
        ("mobius:a=0.3", mobius_dilatation(0.3, order=order)),
    ]


def parse_omega(spec: str, order: int | None = None) -> TruncatedSeries:
    """Dilatation from a catalog name.

    Accepted forms: ``zero``, ``z``, ``z<k>`` (``z^k``), ``<lam>*z<k>``,
    ``mobius:a=<x>`` and ``mobius:a=<x>;mu=<y>``.
    """
    order = _order(order)
    text = spec.strip().replace(" ", "")
    if text in ("zero", "0"):
        return TruncatedSeries.zeros(order)
    if text.startswith("mobius:"):
        fields = {}
        for part in text[len("mobius:"):].split(";"):
            key, _, value = part.partition("=")
            fields[key] = complex(value.replace("i", "j"))
        if "a" not in fields or set(fields) - {"a", "mu"}:
            raise ValueError(f"bad Mobius dilatation {spec!r}; expected mobius:a=<x>[;mu=<y>]")
        return mobius_dilatation(fields["a"], fields.get("mu", 1.0).real, order)
    lam, star, mono = text.rpartition("*")
    if mono.startswith("z"):
        k = int(mono[1:]) if len(mono) > 1 else 1
        coeff = complex(lam.replace("i", "j")) if star else 1.0
        return monomial_dilatation(coeff, k, order)
    raise ValueError(f"unknown dilatation {spec!r}")


@dataclass(frozen=True)
class FamilyInfo:
    name: str
    parameter: str | None
    domain: str
    build: Callable[..., TruncatedSeries]
    formula: str


FAMILIES: dict[str, FamilyInfo] = {
    "f_alpha": FamilyInfo("f_alpha", "alpha", "[-1, 1]", f_alpha_prefunction, "z(1 - alpha z)/(1 - z^2)"),
    "f_theta": FamilyInfo(
        "f_theta", "theta", f"[{THETA_MIN}, pi - {THETA_MIN}]", f_theta_prefunction,
        "log((1 + z e^{i theta})/(1 + z e^{-i theta}))/(2i sin theta)",
    ),
    "koebe_shear": FamilyInfo("koebe_shear", None, "-", lambda order=None: koebe_shear_prefunction(order), "z/(1 - z)^2"),
    "slanted": FamilyInfo("slanted", "slant_alpha", "[-pi/2, pi/2]", slanted_halfplane_prefunction, "z/(1 - e^{i alpha} z)"),
    "phi_beta": FamilyInfo("phi_beta", "beta", "[-1, 1]", phi_beta, "z(1 - beta z)/(1 - z^2)"),
}


def build_family(name: str, param: float | None = None, order: int | None = None) -> TruncatedSeries:
    try:
        info = FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}") from None
    if info.parameter is None:
        return info.build(order=order)
    if param is None:
        raise ValueError(f"family {name} needs parameter {info.parameter}")
    return info.build(param, order=order)
