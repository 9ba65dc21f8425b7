"""Grid certification of positivity, nonvanishing, typicality and convexity claims.

Open-disk statements such as ``Re Q(z) > 0 in E`` are certified on a
compact subdisk: the expression is assembled as a truncated series where
possible (so cancellations happen at the coefficient level), evaluated on a
polar grid, and the extremal value is compared to the margin after the
truncation tail bound has been deducted.  Every report carries its witness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import (
    DegenerateProjection,
    DerivativeVanishes,
    DivergentTail,
    EvaluationFailed,
    NotNormalized,
)
from .harmonic import (
    ConeParams,
    DirectionLike,
    HarmonicMap,
    as_direction,
    dilatation,
    evaluate_harmonic,
    halfplane_transform,
)
from .series import (
    R_CAP,
    RECIPROCAL_FLOOR,
    TruncatedSeries,
    differentiate,
    divide,
    divide_by_z,
    evaluate,
    hadamard,
    multiply,
    tail_bound,
    times_z,
)

DEFAULT_MARGIN = 1e-9
DEFAULT_ANGLES = 512
CERTIFICATION_MIN_ANGLES = 256
REALNESS_TOL = 1e-12
DEAD_BAND = 1e-9
DERIVATIVE_FLOOR = 1e-10

MapLike = Union[HarmonicMap, TruncatedSeries]


def _unit_circle(n: int) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n
    c, s = np.cos(t), np.sin(t)
    # exact axis points so that real-axis samples are recognised as real
    c[np.abs(c) < 1e-15] = 0.0
    s[np.abs(s) < 1e-15] = 0.0
    return c + 1j * s


@dataclass(frozen=True)
class SamplingGrid:
    """Polar lattice ``r_j * exp(2 pi i k / angles_per_ring)`` in the open disk."""

    radii: tuple[float, ...]
    angles_per_ring: int = DEFAULT_ANGLES
    margin: float = DEFAULT_MARGIN
    r_cap: float = R_CAP

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii:
            raise ValueError("grid needs at least one radius")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("grid radii must be strictly increasing")
        if radii[0] <= 0 or radii[-1] > self.r_cap:
            raise ValueError(f"grid radii must lie in (0, {self.r_cap}]")
        if self.angles_per_ring < 4:
            raise ValueError("need at least 4 angles per ring")

    @classmethod
    def default(cls, r_max: float = 0.9, step: float = 0.05, angles: int = DEFAULT_ANGLES) -> "SamplingGrid":
        """Rings every ``step`` up to ``r_max``; 0.9 keeps N = 256 tails near 1e-10."""
        count = int(round(r_max / step))
        return cls(tuple(round(k * step, 12) for k in range(1, count + 1)), angles)

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    @property
    def is_certification_grid(self) -> bool:
        return self.angles_per_ring >= CERTIFICATION_MIN_ANGLES

    def points(self) -> np.ndarray:
        """Complex array of shape ``(len(radii), angles_per_ring)``."""
        return np.asarray(self.radii)[:, None] * _unit_circle(self.angles_per_ring)[None, :]

    def ring(self, r: float | None = None) -> np.ndarray:
        r = self.r_max if r is None else r
        return r * _unit_circle(self.angles_per_ring)

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "angles": self.angles_per_ring}


def _number(x) -> float | str:
    # JSON has no infinities; spell them out instead of emitting invalid tokens
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [_number(value.real), _number(value.imag)]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _number(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


@dataclass
class VerificationReport:
    check_name: str
    params: dict
    extremal_value: float
    witness: complex
    margin: float
    passed: bool
    tail_slack: float = 0.0
    heuristic: bool = False
    grid: dict | None = None

    def to_dict(self) -> dict:
        return {
            "check": self.check_name,
            "params": _jsonable(self.params),
            "grid": self.grid,
            "extremal_value": _number(self.extremal_value),
            "witness": [_number(self.witness.real), _number(self.witness.imag)],
            "tail_slack": _number(self.tail_slack),
            "margin": _number(self.margin),
            "pass": bool(self.passed),
            "heuristic": bool(self.heuristic),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _safe_tail(a: TruncatedSeries, r: float) -> float:
    try:
        return tail_bound(a, r)
    except DivergentTail:
        return math.inf


def _evaluate_all(evaluator: Callable, pts: np.ndarray) -> np.ndarray:
    values = np.asarray(evaluator(pts))
    bad = ~np.isfinite(values)
    if np.any(bad):
        witness = complex(pts[np.unravel_index(int(np.argmax(bad)), bad.shape)])
        raise EvaluationFailed(f"evaluator is not finite at z = {witness}", witness=witness)
    return values


def min_real_on_grid(
    evaluator: Callable,
    grid: SamplingGrid,
    *,
    check_name: str = "min_real",
    params: dict | None = None,
    tail_slack: float = 0.0,
    heuristic: bool = False,
) -> VerificationReport:
    """Minimum of ``Re evaluator(z)`` over the grid with its witness point.

    Passes when the minimum minus ``tail_slack`` exceeds ``grid.margin``.
    """
    pts = grid.points()
    values = _evaluate_all(evaluator, pts).real
    k = np.unravel_index(int(np.argmin(values)), values.shape)
    lowest = float(values[k])
    return VerificationReport(
        check_name=check_name,
        params=dict(params or {}, bound="lower"),
        extremal_value=lowest,
        witness=complex(pts[k]),
        margin=grid.margin,
        passed=bool(lowest - tail_slack > grid.margin),
        tail_slack=tail_slack,
        heuristic=heuristic,
        grid=grid.to_dict(),
    )


def series_min_real(series: TruncatedSeries, grid: SamplingGrid, check_name: str, params: dict | None = None) -> VerificationReport:
    return min_real_on_grid(
        lambda z: evaluate(series, z, r_cap=grid.r_cap),
        grid,
        check_name=check_name,
        params=params,
        tail_slack=_safe_tail(series, grid.r_max),
    )


def _as_map(f: MapLike) -> HarmonicMap:
    return f if isinstance(f, HarmonicMap) else HarmonicMap.analytic(f)


def _require_normalized(F: TruncatedSeries):
    if abs(F[0]) > 1e-12 or F.order < 1 or abs(F[1] - 1.0) > 1e-12:
        raise NotNormalized("expected F(0) = 0 and F'(0) = 1")


def one_minus_z2(order: int) -> TruncatedSeries:
    return TruncatedSeries.from_polynomial([1.0, 0.0, -1.0], order)


def theorem_a_series(F: TruncatedSeries) -> TruncatedSeries:
    dF = differentiate(F)
    return multiply(one_minus_z2(dF.order), dF)


def theorem_a_check(F: TruncatedSeries, grid: SamplingGrid) -> VerificationReport:
    """``Re[(1 - z^2) F'(z)] > 0``: univalence plus convexity along the imaginary axis."""
    _require_normalized(F)
    return series_min_real(theorem_a_series(F), grid, "theorem_a", {"expression": "(1-z^2) F'(z)", "order": F.order})


def cone_series(f: MapLike, cp: ConeParams) -> TruncatedSeries:
    f = _as_map(f)
    rot = cp.gamma.rotation
    inner = differentiate(f.h) - differentiate(f.g) * rot
    prefactor = TruncatedSeries.from_polynomial([1.0, -(cp.eta + cp.xi), cp.eta * cp.xi], inner.order)
    return multiply(prefactor, inner)


def eq2_cone_check(f: MapLike, cp: ConeParams, grid: SamplingGrid) -> VerificationReport:
    """``Re[(1 - eta z)(1 - xi z)(h' - e^{2i gamma} g')] > 0`` on the grid."""
    params = {
        "expression": "(1-eta z)(1-xi z)(h'-e^{2i gamma} g')",
        "eta": cp.eta,
        "xi": cp.xi,
        "gamma": cp.gamma.gamma,
        "order": _as_map(f).order,
    }
    return series_min_real(cone_series(f, cp), grid, "eq2_cone", params)


def nonvanishing_series(phi: TruncatedSeries, f: MapLike, d: DirectionLike, beta: complex, sigma: complex) -> TruncatedSeries:
    f = _as_map(f)
    rot = as_direction(d).rotation
    inner = times_z(differentiate(f.h) - differentiate(f.g) * rot)
    num = TruncatedSeries.from_polynomial([1.0, beta * sigma], inner.order)
    den = TruncatedSeries.from_polynomial([1.0, -sigma], inner.order)
    return hadamard(phi, multiply(divide(num, den), inner))


def eq3_nonvanishing_check(
    phi: TruncatedSeries,
    f: MapLike,
    d: DirectionLike,
    beta: complex,
    sigma: complex,
    grid: SamplingGrid,
) -> VerificationReport:
    """``phi * [(1 + beta sigma z)/(1 - sigma z) z (h' - e^{2i gamma} g')] != 0`` for ``0 < |z|``."""
    beta, sigma = complex(beta), complex(sigma)
    if abs(abs(beta) - 1) > 1e-12 or abs(abs(sigma) - 1) > 1e-12:
        raise ValueError("beta and sigma must have unit modulus")
    series = nonvanishing_series(phi, f, d, beta, sigma)
    pts = grid.points()
    mod = np.abs(_evaluate_all(lambda z: evaluate(series, z, r_cap=grid.r_cap), pts))
    k = np.unravel_index(int(np.argmin(mod)), mod.shape)
    slack = _safe_tail(series, grid.r_max)
    lowest = float(mod[k])
    return VerificationReport(
        check_name="eq3_nonvanishing",
        params={"beta": beta, "sigma": sigma, "gamma": as_direction(d).gamma, "bound": "lower", "order": series.order},
        extremal_value=lowest,
        witness=complex(pts[k]),
        margin=grid.margin,
        passed=bool(lowest - slack > grid.margin),
        tail_slack=slack,
        grid=grid.to_dict(),
    )


def unit_lattice(size: int = 8) -> list[complex]:
    return list(_unit_circle(size))


def eq3_lattice_check(
    phi: TruncatedSeries, f: MapLike, d: DirectionLike, grid: SamplingGrid, size: int = 8
) -> tuple[VerificationReport, list[VerificationReport]]:
    """Run the nonvanishing check over a ``size x size`` lattice of (beta, sigma).

    Returns a summary report (worst case over the lattice) and the individual reports.
    """
    reports = [
        eq3_nonvanishing_check(phi, f, d, beta, sigma, grid)
        for beta in unit_lattice(size)
        for sigma in unit_lattice(size)
    ]
    worst = min(reports, key=lambda rep: rep.extremal_value - rep.tail_slack)
    summary = VerificationReport(
        check_name="eq3_nonvanishing_lattice",
        params={
            "lattice": f"{size}x{size}",
            "worst_beta": worst.params["beta"],
            "worst_sigma": worst.params["sigma"],
            "passed_count": sum(r.passed for r in reports),
            "total": len(reports),
            "gamma": as_direction(d).gamma,
            "bound": "lower",
        },
        extremal_value=worst.extremal_value,
        witness=worst.witness,
        margin=grid.margin,
        passed=all(r.passed for r in reports),
        tail_slack=max(r.tail_slack for r in reports),
        grid=grid.to_dict(),
    )
    return summary, reports


def local_univalence_check(f: HarmonicMap, grid: SamplingGrid) -> VerificationReport:
    """``max |g'/h'|`` on the outermost ring (maximum modulus); passes below 1."""
    omega = dilatation(f)
    ring = grid.ring()
    mod = np.abs(_evaluate_all(lambda z: evaluate(omega, z, r_cap=grid.r_cap), ring))
    k = int(np.argmax(mod))
    slack = _safe_tail(omega, grid.r_max)
    peak = float(mod[k])
    return VerificationReport(
        check_name="local_univalence",
        params={"expression": "|g'/h'|", "ring": grid.r_max, "bound": "upper", "order": omega.order},
        extremal_value=peak,
        witness=complex(ring[k]),
        margin=1.0,
        passed=bool(peak + slack < 1.0),
        tail_slack=slack,
        grid=grid.to_dict(),
    )


def halfplane_check(f: HarmonicMap, d: DirectionLike, grid: SamplingGrid) -> VerificationReport:
    """Minimum of ``Re P`` with ``P = (h' + e^{2i gamma} g')/(h' - e^{2i gamma} g')``."""
    d = as_direction(d)
    pts = grid.points()
    P = halfplane_transform(f, d, pts, r_cap=grid.r_cap)
    rot = d.rotation
    den = np.abs(evaluate(differentiate(f.h), pts, r_cap=grid.r_cap) - rot * evaluate(differentiate(f.g), pts, r_cap=grid.r_cap))
    err = _safe_tail(differentiate(f.h), grid.r_max) + _safe_tail(differentiate(f.g), grid.r_max)
    # first-order perturbation of a quotient
    slack = float(np.max((1 + np.abs(P)) * err / np.maximum(den - err, 1e-300))) if err < math.inf else math.inf
    report = min_real_on_grid(
        lambda z: P, grid, check_name="halfplane", params={"gamma": d.gamma}, tail_slack=slack
    )
    return report


def typically_real_check(F: TruncatedSeries, grid: SamplingGrid) -> VerificationReport:
    """Three-part test that ``F`` is typically real.

    (a) real coefficients; (b) ``F`` is real on the real axis and ``Im F(z)``
    has the sign of ``Im z`` off it; (c) ``P = (1 - z^2) F / z`` has real coefficients, ``P(0) = 1``
    and positive real part.
    """
    _require_normalized(F)
    r_max = grid.r_max
    max_imag = float(np.max(np.abs(F.coeffs.imag)))
    real_ok = max_imag <= REALNESS_TOL

    pts = grid.points().reshape(-1)
    values = _evaluate_all(lambda z: evaluate(F, z, r_cap=grid.r_cap), pts)
    off_axis = pts.imag != 0
    zz = pts[off_axis]
    signed = np.sign(zz.imag) * values[off_axis].imag
    on_axis_imag = np.abs(values[~off_axis].imag)
    scale = float(np.sum(np.abs(F.coeffs) * r_max ** np.arange(F.order + 1)))
    sign_tol = _safe_tail(F, r_max) + REALNESS_TOL * scale
    j = int(np.argmin(signed))
    axis_max = float(on_axis_imag.max()) if on_axis_imag.size else 0.0
    sign_ok = bool(signed[j] >= -sign_tol and axis_max <= sign_tol)

    P = divide_by_z(multiply(one_minus_z2(F.order), F))
    p_imag = float(np.max(np.abs(P.coeffs.imag)))
    p0 = complex(P[0])
    rog = series_min_real(P, grid, "rogosinski_P")
    rog_ok = rog.passed and abs(p0 - 1) <= REALNESS_TOL and p_imag <= REALNESS_TOL

    subchecks = {
        "real_coefficients": {"max_imag": max_imag, "pass": real_ok},
        "sign_agreement": {
            "min_signed_imag": float(signed[j]),
            "max_imag_on_real_axis": axis_max,
            "witness": complex(zz[j]),
            "tolerance": sign_tol,
            "pass": sign_ok,
        },
        "rogosinski": {
            "P0": p0,
            "max_imag_coeff": p_imag,
            "min_re_P": rog.extremal_value,
            "tail_slack": rog.tail_slack,
            "pass": rog_ok,
        },
    }
    return VerificationReport(
        check_name="typically_real",
        params={"subchecks": subchecks, "bound": "lower", "order": F.order},
        extremal_value=rog.extremal_value,
        witness=rog.witness,
        margin=grid.margin,
        passed=bool(real_ok and sign_ok and rog_ok),
        tail_slack=rog.tail_slack,
        grid=grid.to_dict(),
    )


def convexity_series(phi: TruncatedSeries) -> TruncatedSeries:
    d1 = differentiate(phi)
    d2 = differentiate(d1)
    return 1.0 + times_z(divide(d2, d1))


def convexity_check(phi: TruncatedSeries, grid: SamplingGrid) -> VerificationReport:
    """``Re[1 + z phi''/phi'] > 0`` on the grid; failure comes with a witness."""
    d1 = differentiate(phi)
    if abs(d1[0]) <= RECIPROCAL_FLOOR:
        raise DerivativeVanishes("phi'(0) vanishes", witness=0j)
    pts = grid.points()
    mod = np.abs(evaluate(d1, pts, r_cap=grid.r_cap))
    k = np.unravel_index(int(np.argmin(mod)), mod.shape)
    if mod[k] <= DERIVATIVE_FLOOR:
        raise DerivativeVanishes(f"phi' vanishes near z = {complex(pts[k])}", witness=complex(pts[k]))
    return series_min_real(convexity_series(phi), grid, "convexity", {"expression": "1 + z phi''/phi'", "order": phi.order})


def _count_sign_changes(du: np.ndarray, dead_band: float) -> int:
    signs = np.where(du > dead_band, 1, np.where(du < -dead_band, -1, 0))
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        raise DegenerateProjection("projection is constant within the dead band")
    start = int(nonzero[0])
    order = np.roll(signs, -start)
    current = order[0]
    changes = 0
    for s in order[1:]:
        if s != 0 and s != current:
            changes += 1
            current = s
    if current != order[0]:
        changes += 1
    return changes


def direction_convexity_boundary_check(
    f: MapLike, d: DirectionLike, r: float, samples: int = 1024, r_cap: float = R_CAP
) -> VerificationReport:
    """Count turning points of ``Im(e^{-i gamma} f(r e^{it}))`` along the circle.

    Exactly two means every line parallel to ``e^{i gamma}`` crosses the image
    curve at most twice.  Heuristic only: subdisk images need not inherit
    direction convexity.
    """
    if samples < 1024:
        raise ValueError("direction convexity scan needs at least 1024 samples")
    if r > r_cap * (1 + 1e-12):
        raise ValueError(f"radius {r} exceeds cap {r_cap}")
    d = as_direction(d)
    z = r * _unit_circle(samples)
    if isinstance(f, HarmonicMap):
        w = evaluate_harmonic(f, z, r_cap=r_cap)
        slack = _safe_tail(f.h, r) + _safe_tail(f.g, r)
    else:
        w = evaluate(f, z, r_cap=r_cap)
        slack = _safe_tail(f, r)
    u = (w * d.unit.conjugate()).imag
    du = np.roll(u, -1) - u
    changes = _count_sign_changes(du, DEAD_BAND)
    k = int(np.argmax(u))
    return VerificationReport(
        check_name="direction_convexity_boundary",
        params={"gamma": d.gamma, "radius": r, "samples": samples, "sign_changes": changes, "dead_band": DEAD_BAND},
        extremal_value=float(changes),
        witness=complex(z[k]),
        margin=2.0,
        passed=changes == 2,
        tail_slack=slack,
        heuristic=True,
        grid={"radii": [r], "angles": samples},
    )


def radial_extremum_check(F: TruncatedSeries, grid: SamplingGrid) -> VerificationReport:
    """Heuristic look at whether sup/inf of ``Re F`` are approached toward z = +1 / -1.

    On each ring the grid maximum (minimum) of ``Re F`` is compared with the
    value at ``z = r`` (``z = -r``); the radial values must also move outward
    monotonically.  A finite truncation cannot decide the boundary-limit
    condition, so the report is always marked heuristic.
    """
    pts = grid.points()
    re = _evaluate_all(lambda z: evaluate(F, z, r_cap=grid.r_cap), pts).real
    radii = np.asarray(grid.radii)
    at_plus = evaluate(F, radii, r_cap=grid.r_cap).real
    at_minus = evaluate(F, -radii, r_cap=grid.r_cap).real
    gap_sup = re.max(axis=1) - at_plus
    gap_inf = at_minus - re.min(axis=1)
    gaps = np.maximum(gap_sup, gap_inf)
    tol = _safe_tail(F, grid.r_max) + 1e-12 * (1 + float(np.max(np.abs(re))))
    monotone = bool(np.all(np.diff(at_plus) > 0) and np.all(np.diff(at_minus) < 0))
    j = int(np.argmax(gaps))
    return VerificationReport(
        check_name="radial_extremum",
        params={
            "re_f_toward_plus_one": at_plus.tolist(),
            "re_f_toward_minus_one": at_minus.tolist(),
            "monotone": monotone,
            "bound": "upper",
            "note": "boundary sup/inf attainment is undecidable from a truncation; trend only",
        },
        extremal_value=float(gaps[j]),
        witness=complex(radii[j]),
        margin=tol,
        passed=bool(monotone and gaps[j] <= tol),
        tail_slack=tol,
        heuristic=True,
        grid=grid.to_dict(),
    )


def ring_minima_decay_check(
    evaluator: Callable, radii=(0.5, 0.9, 0.99, 0.999), angles: int = 4096, check_name: str = "ring_minima_decay"
) -> VerificationReport:
    """Ring minima of ``Re evaluator`` for a closed-form function defined up to |z| = 1.

    For a positive harmonic function the ring minimum decreases with the
    radius; a limit of 0 matches a real part that vanishes on the circle.
    Passes when all minima are positive and strictly decreasing.
    """
    radii = tuple(float(r) for r in radii)
    circle = _unit_circle(angles)
    minima, witnesses = [], []
    for r in radii:
        z = r * circle
        values = np.asarray(evaluator(z)).real
        k = int(np.argmin(values))
        minima.append(float(values[k]))
        witnesses.append(complex(z[k]))
    positive = all(m > 0 for m in minima)
    decreasing = all(b < a for a, b in zip(minima, minima[1:]))
    return VerificationReport(
        check_name=check_name,
        params={"ring_minima": minima, "positive": positive, "decreasing": decreasing, "bound": "lower"},
        extremal_value=minima[-1],
        witness=witnesses[-1],
        margin=0.0,
        passed=positive and decreasing,
        grid={"radii": list(radii), "angles": angles},
    )


def closed_form_agreement_check(
    series: TruncatedSeries,
    closed_form: Callable,
    grid: SamplingGrid,
    tol: float,
    check_name: str = "closed_form_agreement",
    params: dict | None = None,
) -> VerificationReport:
    """Largest ``|Re series(z) - closed_form(z)|`` over the grid; passes at or below ``tol``."""
    pts = grid.points()
    approx = _evaluate_all(lambda z: evaluate(series, z, r_cap=grid.r_cap), pts).real
    exact = np.asarray(closed_form(pts)).real
    dev = np.abs(approx - exact)
    k = np.unravel_index(int(np.argmax(dev)), dev.shape)
    worst = float(dev[k])
    return VerificationReport(
        check_name=check_name,
        params=dict(params or {}, bound="upper", tolerance=tol),
        extremal_value=worst,
        witness=complex(pts[k]),
        margin=tol,
        passed=worst <= tol,
        tail_slack=_safe_tail(series, grid.r_max),
        grid=grid.to_dict(),
    )
