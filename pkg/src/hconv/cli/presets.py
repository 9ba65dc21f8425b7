"""Scripted check pipelines, one per reproducible result.

Each preset builds a family, shears it, convolves it and runs a list of
verifier checks.  Every check is tagged with a category:

CERTIFIED    analytic grid check whose failure means the claim is not confirmed
HEURISTIC    boundary-curve or trend evidence; never affects the exit code
CONDITIONAL  only meaningful if a CANDIDATE convolver really belongs to DCP
REPORTED     measured and logged without an expected outcome
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..errors import HconvError, _WitnessError, DegenerateProjection
from ..families import (
    FAMILIES,
    DcpStatus,
    build_family,
    convolver_by_name,
    f_alpha_closed_form_real_part,
    f_theta_rho,
    parse_omega,
    phi_beta,
    phi_beta_status,
)
from ..harmonic import (
    ConeParams,
    Direction,
    analytic_prefunction,
    cis,
    harmonic_convolve,
    shear_construct,
)
from ..series import TruncatedSeries, default_order, differentiate, times_z
from ..verifiers import (
    SamplingGrid,
    VerificationReport,
    closed_form_agreement_check,
    convexity_check,
    direction_convexity_boundary_check,
    eq2_cone_check,
    eq3_lattice_check,
    halfplane_check,
    local_univalence_check,
    radial_extremum_check,
    ring_minima_decay_check,
    theorem_a_check,
    theorem_a_series,
    typically_real_check,
)

CLOSED_FORM_TOL = 1e-8
BOUNDARY_SAMPLES = 1024
DEFAULT_R_MAX = 0.9
# h' of the Koebe shear has coefficients growing like n^3, so at N = 256 the
# tail bound on |z| = 0.9 is about 1e-4; at 0.8 it drops below 1e-15
KOEBE_R_MAX = 0.8


class Category(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    HEURISTIC = "HEURISTIC"
    CONDITIONAL = "CONDITIONAL"
    REPORTED = "REPORTED"


@dataclass
class CheckOutcome:
    key: str
    category: Category
    report: VerificationReport
    expect_pass: bool | None = True
    note: str = ""

    @property
    def succeeded(self) -> bool | None:
        if self.expect_pass is None:
            return None
        return self.report.passed == self.expect_pass


@dataclass
class RunContext:
    params: dict
    grid: SamplingGrid
    order: int
    outcomes: list[CheckOutcome] = field(default_factory=list)
    conclusion_category: Category = Category.CERTIFIED

    def run(self, key: str, category: Category, check: Callable[[], VerificationReport], expect_pass=True, note=""):
        try:
            report = check()
        except (_WitnessError, DegenerateProjection) as exc:
            # a vanishing denominator is itself a failed check, with its witness
            witness = getattr(exc, "witness", None)
            report = VerificationReport(
                check_name=key,
                params={"error": type(exc).__name__, "message": str(exc)},
                extremal_value=math.nan,
                witness=complex(witness) if witness is not None else 0j,
                margin=self.grid.margin,
                passed=False,
                grid=self.grid.to_dict(),
            )
        if category is Category.CERTIFIED and report.heuristic:
            category = Category.HEURISTIC
        outcome = CheckOutcome(key, category, report, expect_pass, note)
        self.outcomes.append(outcome)
        return outcome


@dataclass(frozen=True)
class ReproPreset:
    id: str
    description: str
    default_params: dict
    runner: Callable[[RunContext], str]


# natural convexity direction and cone constants of each family
def _family_cone(family: str, params: dict) -> ConeParams:
    if family == "koebe_shear":
        return ConeParams(1, 1, 0.0)
    if family == "slanted":
        s = params["slant"]
        return ConeParams(cis(s), cis(s), math.pi / 2 - s)
    return ConeParams(-1, 1, math.pi / 2)


def _family_param(family: str, params: dict):
    key = {"f_alpha": "alpha", "f_theta": "theta", "slanted": "slant", "phi_beta": "beta"}.get(family)
    return None if key is None else params[key]


def _convolution_status(params: dict, order: int):
    return convolver_by_name(params["phi"], beta=params["beta"], order=order)


def _conclusion_category(status: DcpStatus) -> Category:
    return {
        DcpStatus.PROVEN_DCP: Category.CERTIFIED,
        DcpStatus.CANDIDATE: Category.CONDITIONAL,
        DcpStatus.NOT_DCP: Category.REPORTED,
    }[status]


def _hypothesis_checks(ctx: RunContext, family: str, F: TruncatedSeries, d: Direction):
    """Evidence that the prefunction is univalent and convex in direction ``d``."""
    if family in ("f_alpha", "f_theta", "phi_beta"):
        ctx.run("theorem_a_prefunction", Category.CERTIFIED, lambda: theorem_a_check(F, ctx.grid))
    elif family == "slanted":
        ctx.run("convexity_prefunction", Category.CERTIFIED, lambda: convexity_check(F, ctx.grid),
                note="a convex prefunction is convex in every direction")
    else:
        ctx.run(
            "direction_convexity_prefunction",
            Category.HEURISTIC,
            lambda: direction_convexity_boundary_check(F, d, ctx.grid.r_max, BOUNDARY_SAMPLES),
        )


def _convolution_pipeline(ctx: RunContext, F: TruncatedSeries, cone: ConeParams) -> str:
    """Shear, check the cone condition, convolve and check the convolved map."""
    p = ctx.params
    omega = parse_omega(p["omega"], ctx.order)
    f = shear_construct(F, omega, cone.gamma)
    conv = _convolution_status(p, ctx.order)
    ctx.params["phi_status"] = conv.status.value

    ctx.run("local_univalence", Category.CERTIFIED, lambda: local_univalence_check(f, ctx.grid))
    ctx.run("eq2_cone", Category.CERTIFIED, lambda: eq2_cone_check(f, cone, ctx.grid))
    category = _conclusion_category(conv.status)
    ctx.conclusion_category = category
    expect = True if category is not Category.REPORTED else None
    ctx.run("eq3_lattice", category, lambda: eq3_lattice_check(conv.series, f, cone.gamma, ctx.grid)[0], expect)

    fc = harmonic_convolve(f, conv.series)
    ctx.run("local_univalence_convolved", category, lambda: local_univalence_check(fc, ctx.grid), expect)
    ctx.run("halfplane_convolved", category, lambda: halfplane_check(fc, cone.gamma, ctx.grid), expect)
    ctx.run(
        "direction_convexity_convolved",
        Category.HEURISTIC,
        lambda: direction_convexity_boundary_check(fc, cone.gamma, ctx.grid.r_max, BOUNDARY_SAMPLES),
    )
    return f"convolution with {conv.name} lies in K_H(gamma = {cone.gamma.gamma!r}) [{conv.status.value}]"


def _family_run(default_family: str | None):
    def runner(ctx: RunContext) -> str:
        family = ctx.params.get("family") or default_family
        if family not in FAMILIES:
            raise HconvError(f"unknown family {family!r}")
        ctx.params["family"] = family
        F = build_family(family, _family_param(family, ctx.params), ctx.order)
        cone = _family_cone(family, ctx.params)
        _hypothesis_checks(ctx, family, F, cone.gamma)
        return _convolution_pipeline(ctx, F, cone)

    return runner


def _run_alpha_corollary(ctx: RunContext) -> str:
    alpha = ctx.params["alpha"]
    F = build_family("f_alpha", alpha, ctx.order)
    ctx.run("theorem_a_prefunction", Category.CERTIFIED, lambda: theorem_a_check(F, ctx.grid))
    ctx.run(
        "closed_form_theorem_a",
        Category.CERTIFIED,
        lambda: closed_form_agreement_check(
            theorem_a_series(F), lambda z: f_alpha_closed_form_real_part(alpha, z), ctx.grid, CLOSED_FORM_TOL,
            check_name="closed_form_theorem_a", params={"alpha": alpha},
        ),
    )
    return _convolution_pipeline(ctx, F, ConeParams(-1, 1, math.pi / 2))


def _run_theta_corollary(ctx: RunContext) -> str:
    theta = ctx.params["theta"]
    F = build_family("f_theta", theta, ctx.order)
    rho = f_theta_rho(theta)
    ctx.run("theorem_a_prefunction", Category.CERTIFIED, lambda: theorem_a_check(F, ctx.grid))
    ctx.run(
        "closed_form_theorem_a",
        Category.CERTIFIED,
        lambda: closed_form_agreement_check(
            theorem_a_series(F), rho, ctx.grid, CLOSED_FORM_TOL,
            check_name="closed_form_theorem_a", params={"theta": theta},
        ),
    )
    ctx.run("ring_minima_decay", Category.CERTIFIED, lambda: ring_minima_decay_check(rho))
    return _convolution_pipeline(ctx, F, ConeParams(-1, 1, math.pi / 2))


def _run_koebe_corollary(ctx: RunContext) -> str:
    F = build_family("koebe_shear", None, ctx.order)
    _hypothesis_checks(ctx, "koebe_shear", F, Direction(0.0))
    return _convolution_pipeline(ctx, F, ConeParams(1, 1, 0.0))


def _run_slanted_corollary(ctx: RunContext) -> str:
    s = ctx.params["slant"]
    F = build_family("slanted", s, ctx.order)
    _hypothesis_checks(ctx, "slanted", F, Direction(math.pi / 2 - s))
    return _convolution_pipeline(ctx, F, _family_cone("slanted", ctx.params))


def _run_radial_theorem(ctx: RunContext) -> str:
    family = ctx.params.get("family") or "f_alpha"
    if family not in ("f_alpha", "f_theta", "phi_beta"):
        raise HconvError(f"family {family!r} is not convex in the imaginary direction")
    ctx.params["family"] = family
    F = build_family(family, _family_param(family, ctx.params), ctx.order)
    ctx.run("radial_extremum", Category.HEURISTIC, lambda: radial_extremum_check(F, ctx.grid),
            note="boundary sup/inf condition can only be probed, not decided")
    ctx.run("theorem_a_prefunction", Category.CERTIFIED, lambda: theorem_a_check(F, ctx.grid))
    return _convolution_pipeline(ctx, F, ConeParams(-1, 1, math.pi / 2))


def _run_typically_real_theorem(ctx: RunContext) -> str:
    alpha, beta = ctx.params["alpha"], ctx.params["beta"]
    order = ctx.order
    F = build_family("f_alpha", alpha, order)
    pb = phi_beta(beta, order)
    ctx.run("typically_real_phi_beta", Category.CERTIFIED, lambda: typically_real_check(pb, ctx.grid))
    ctx.run("theorem_a_phi_beta", Category.CERTIFIED, lambda: theorem_a_check(pb, ctx.grid))
    zF = times_z(differentiate(F)).truncate(order)
    ctx.run("typically_real_zF", Category.CERTIFIED, lambda: typically_real_check(zF, ctx.grid))

    # the prefunction of the convolved map is (h + g) * phi_beta
    f = shear_construct(F, parse_omega(ctx.params["omega"], order), math.pi / 2)
    G = analytic_prefunction(harmonic_convolve(f, pb), math.pi / 2)
    ctx.params["phi_status"] = phi_beta_status(beta).value
    zG = times_z(differentiate(G)).truncate(order)
    ctx.run("typically_real_zG", Category.CERTIFIED, lambda: typically_real_check(zG, ctx.grid))
    ctx.run("theorem_a_convolved_prefunction", Category.CERTIFIED, lambda: theorem_a_check(G, ctx.grid))
    ctx.run(
        "local_univalence_convolved",
        Category.REPORTED,
        lambda: local_univalence_check(harmonic_convolve(f, pb), ctx.grid),
        expect_pass=None,
        note="proviso: the conclusion needs the convolved map to be sense-preserving",
    )
    ctx.run(
        "direction_convexity_convolved_prefunction",
        Category.HEURISTIC,
        lambda: direction_convexity_boundary_check(G, math.pi / 2, ctx.grid.r_max, BOUNDARY_SAMPLES),
    )
    return "(h + g) * phi_beta is typically real, univalent and convex in the imaginary direction"


def _run_phi_beta_remark(ctx: RunContext) -> str:
    beta = ctx.params["beta"]
    pb = phi_beta(beta, ctx.order)
    status = phi_beta_status(beta)
    ctx.params["phi_status"] = status.value
    convex_expected = status is DcpStatus.PROVEN_DCP
    out = ctx.run("convexity_phi_beta", Category.CERTIFIED, lambda: convexity_check(pb, ctx.grid), expect_pass=convex_expected)
    if out.report.passed:
        return "phi_beta is convex (PROVEN_DCP)"
    return "NOT_DCP confirmed: phi_beta is not convex"


_COMMON = {"omega": "z", "phi": "identity", "beta": 0.0}

PRESETS: dict[str, ReproPreset] = {
    p.id: p
    for p in (
        ReproPreset("thm3.1", "cone condition implies the convolution stays convex in the direction",
                    {**_COMMON, "family": "f_alpha", "alpha": 0.5, "theta": math.pi / 2, "slant": math.pi / 4},
                    _family_run("f_alpha")),
        ReproPreset("cor3.2", "alpha family convolved with a DCP function", {**_COMMON, "alpha": 0.5}, _run_alpha_corollary),
        ReproPreset("cor3.3", "theta family convolved with a DCP function", {**_COMMON, "theta": math.pi / 2}, _run_theta_corollary),
        ReproPreset("cor3.4", "Koebe shear convolved with a DCP function", dict(_COMMON), _run_koebe_corollary),
        ReproPreset("cor3.5", "slanted half-plane shear convolved with a DCP function", {**_COMMON, "slant": math.pi / 4},
                    _run_slanted_corollary),
        ReproPreset("thm3.6", "radial extremum condition implies the cone condition",
                    {**_COMMON, "family": "f_alpha", "alpha": 0.5, "theta": math.pi / 2}, _run_radial_theorem),
        ReproPreset("thm3.7", "alpha family convolved with phi_beta is typically real",
                    {"alpha": 0.5, "beta": 0.0, "omega": "z"}, _run_typically_real_theorem),
        ReproPreset("rem3.8", "phi_beta is not convex for beta in (-1, 1)", {"beta": 0.0}, _run_phi_beta_remark),
    )
}


@dataclass
class BundleResult:
    bundle: dict
    files: dict[str, str]
    exit_code: int


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def default_r_max(preset_id: str, params: dict) -> float:
    if preset_id == "cor3.4" or params.get("family") == "koebe_shear":
        return KOEBE_R_MAX
    return DEFAULT_R_MAX


def resolve_params(preset_id: str, overrides: dict) -> dict:
    preset = PRESETS[preset_id]
    params = dict(preset.default_params)
    for key, value in overrides.items():
        if key not in params:
            raise KeyError(f"preset {preset_id} has no parameter {key!r}; accepted: {', '.join(sorted(params))}")
        params[key] = value
    return params


def run_preset(preset_id: str, overrides: dict, grid: SamplingGrid | None = None, order: int | None = None) -> BundleResult:
    """Run a preset; construction errors propagate to the caller.

    Without an explicit grid the preset's default radius is used with rings
    every 0.05 and 512 angles.
    """
    preset = PRESETS[preset_id]
    params = resolve_params(preset_id, overrides)
    if grid is None:
        grid = SamplingGrid.default(r_max=default_r_max(preset_id, params))
    if order is None:
        order = default_order()
    ctx = RunContext(params=params, grid=grid, order=order)
    conclusion = preset.runner(ctx)

    files: dict[str, str] = {}
    rows = []
    for i, out in enumerate(ctx.outcomes, start=1):
        name = f"{i:02d}_{out.key}.json"
        body = out.report.to_dict()
        body["category"] = out.category.value
        body["expect_pass"] = out.expect_pass
        files[name] = _dumps(body)
        rows.append({
            "key": out.key,
            "file": name,
            "category": out.category.value,
            "pass": out.report.passed,
            "expect_pass": out.expect_pass,
            "succeeded": out.succeeded,
            "extremal_value": body["extremal_value"],
            "witness": body["witness"],
            "note": out.note,
        })

    certified_ok = all(o.succeeded for o in ctx.outcomes if o.category is Category.CERTIFIED)
    conditional = [o for o in ctx.outcomes if o.category is Category.CONDITIONAL]
    if not certified_ok:
        status = "FAILED"
    elif ctx.conclusion_category is Category.CONDITIONAL:
        status = "CONDITIONAL" if all(o.succeeded for o in conditional) else "CONDITIONAL_FAILED"
    elif ctx.conclusion_category is Category.REPORTED:
        # the convolver is outside DCP, so the result makes no claim
        status = "NOT_COVERED"
    else:
        status = "CERTIFIED"
    exit_code = 0 if certified_ok else 2

    bundle = {
        "preset": preset.id,
        "description": preset.description,
        "order": order,
        "params": _json_params(params),
        "grid": grid.to_dict() | {"margin": grid.margin, "r_cap": grid.r_cap},
        "checks": rows,
        "verdict": {"status": status, "conclusion": conclusion},
        "exit_code": exit_code,
    }
    files["bundle.json"] = _dumps(bundle)
    return BundleResult(bundle, files, exit_code)


def _json_params(params: dict) -> dict:
    return {k: params[k] for k in sorted(params)}


def write_bundle(result: BundleResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in result.files.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
