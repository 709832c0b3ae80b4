"""
Orchestrator: runs the L2 and Linf solvers for one request, assembles the
RunResult document, renders figures, re-verifies saved results and sweeps
the corpus.

Usage:
    outcome = run_request(RunRequest(f="sqrt11", degree=1, norm="both"))
    doc = outcome.to_json()
    files = compare(RunRequest(f="tanz3", degree=3), Path("out"))
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from cli import __version__
from diagnostics.contours import default_levels
from diagnostics.error_curve import DEFAULT_SAMPLES, ErrorCurve, error_curve, sup_from_curve
from diagnostics.optimality import (
    ORDERING_RTOL,
    InterpolationPoints,
    OrderingReport,
    effective_degree,
    l2_interpolation_points,
    linf_interpolation_points,
    near_circular_bounds,
    ordering_check,
)
from diagnostics.potential import GridSpec, circle_spread, potential_field
from diagnostics.result import ApproxResult
from funcs.corpus import AnalyticFunction, resolve
from l2_irka.engine import IrkaSolver
from l2_irka.optimality import DEFAULT_TOL, verify_optimality
from linf_lawson.engine import LawsonSolver
from render.svg import Dot, DotRole, potential_figure_spec, render_error_figure, to_svg
from shared.base_solver import BaseSolver
from shared.errors import ApproxError, InputError
from shared.profile_loader import get_threshold, load_profile, merge_profiles
from shared.storage import (
    Storage,
    load_run_result,
    poles_from_json,
    rational_from_json,
    result_to_json,
    samples_csv,
)

logger = logging.getLogger(__name__)

NORMS = ("l2", "linf")
NORM_CHOICES = ("l2", "linf", "both")
INIT_CHOICES = {"aaa": "aaa_seed", "ring": "ring"}

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_DIAGNOSTICS_PROFILE = Path(__file__).resolve().parent.parent / "diagnostics" / "profiles" / "default.yaml"


@dataclass(frozen=True)
class RunRequest:
    f: str
    degree: int
    norm: str = "both"
    samples: Optional[int] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    init: Optional[str] = None
    profile_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InputError(f"degree must be at least 1, got {self.degree}")
        if self.norm not in NORM_CHOICES:
            raise InputError(f"norm must be one of {', '.join(NORM_CHOICES)}, got {self.norm!r}")
        if self.samples is not None and self.samples < 2 * self.degree + 2:
            raise InputError(
                f"--samples {self.samples} too small for degree {self.degree} "
                f"(need at least {2 * self.degree + 2})"
            )
        if self.tol is not None and not self.tol > 0:
            raise InputError("tolerance must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise InputError("iteration cap must be positive")
        if self.init is not None and self.init not in INIT_CHOICES:
            raise InputError(f"init must be one of {', '.join(INIT_CHOICES)}, got {self.init!r}")

    @property
    def norms(self) -> Tuple[str, ...]:
        return NORMS if self.norm == "both" else (self.norm,)

    def echo(self) -> Dict[str, Any]:
        return {
            "f": self.f,
            "degree": self.degree,
            "norm": self.norm,
            "samples": self.samples,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "init": self.init,
            "profile": self.profile_path,
        }


# ------------------------------------------------------------------ #
#  Profiles and solvers
# ------------------------------------------------------------------ #

def _run_profile(request: RunRequest) -> Dict[str, Any]:
    """The --profile document: optional top-level sections l2_irka, linf_lawson, diagnostics."""
    if not request.profile_path:
        return {}
    profile = load_profile(Path(request.profile_path))
    for key in ("l2_irka", "linf_lawson", "diagnostics"):
        if key in profile and not isinstance(profile[key], dict):
            raise InputError(f"profile section {key!r} must be a mapping")
    return profile


def diagnostics_profile(overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return merge_profiles(load_profile(_DIAGNOSTICS_PROFILE), overrides or {})


def build_solver(norm: str, request: RunRequest, profile: Dict[str, Any]) -> BaseSolver:
    """Solver for one norm with the request's CLI-level overrides applied."""
    if norm == "l2":
        return IrkaSolver(
            profile_overrides=profile.get("l2_irka"),
            pole_tolerance=request.tol,
            max_iterations=request.max_iter,
            initialization=INIT_CHOICES.get(request.init or ""),
            seed_samples=request.samples,
        )
    if norm == "linf":
        return LawsonSolver(
            profile_overrides=profile.get("linf_lawson"),
            max_lawson_iterations=request.max_iter,
            samples=request.samples,
        )
    raise InputError(f"unknown norm {norm!r}")


# ------------------------------------------------------------------ #
#  One request
# ------------------------------------------------------------------ #

@dataclass(eq=False)
class RunOutcome:
    request: RunRequest
    function: AnalyticFunction
    envelopes: Dict[str, Dict[str, Any]]
    diagnostics: Dict[str, Any]
    ordering: Optional[OrderingReport] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def results(self) -> Dict[str, ApproxResult]:
        return {k: env["data"] for k, env in self.envelopes.items() if env["data"] is not None}

    @property
    def exit_code(self) -> int:
        kinds = [env["meta"]["error_kind"] for env in self.envelopes.values()]
        if "input" in kinds:
            return EXIT_INPUT
        if any(env["status"] != "success" for env in self.envelopes.values()):
            return EXIT_NUMERICAL
        if self.ordering is not None and not self.ordering.passed:
            return EXIT_NUMERICAL
        return EXIT_OK

    @property
    def errors(self) -> List[str]:
        out: List[str] = []
        for env in self.envelopes.values():
            out.extend(env["meta"]["errors"])
        if self.ordering is not None:
            out.extend(f"ordering: {v}" for v in self.ordering.violations)
        return out

    def to_json(self) -> Dict[str, Any]:
        """RunResult document; contains no timings so equal requests give equal bytes."""
        doc: Dict[str, Any] = {
            "request": self.request.echo(),
            "function": {"name": self.function.name, "source": self.function.source},
            "tool": {"name": "diskrat", "version": __version__},
            "status": {k: env["status"] for k, env in self.envelopes.items()},
            "errors": self.errors,
        }
        for norm, result in self.results.items():
            doc[norm] = result_to_json(result)
        if self.ordering is not None:
            doc["ordering"] = self.ordering.to_dict()
        doc.update(self.extras)
        return doc

    def error_curves(self) -> Dict[str, ErrorCurve]:
        M = int(get_threshold(self.diagnostics, "grid", "samples", default=DEFAULT_SAMPLES))
        return {norm: error_curve(self.function, r.approximant, M) for norm, r in self.results.items()}


def run_request(request: RunRequest, workers: int = 2) -> RunOutcome:
    """
    Run the requested solver(s). Input problems that are detectable before
    solving (function source, profile) raise InputError; solver failures are
    captured in the envelopes. With norm "both" the solvers run concurrently.
    """
    f = resolve(request.f)
    profile = _run_profile(request)
    diagnostics = diagnostics_profile(profile.get("diagnostics"))
    solvers = {norm: build_solver(norm, request, profile) for norm in request.norms}
    logger.info("running %s on %s at degree %d", "+".join(solvers), f.name, request.degree)

    if len(solvers) > 1 and workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(solvers))) as pool:
            futures = {norm: pool.submit(s.execute, f, request.degree) for norm, s in solvers.items()}
            envelopes = {norm: fut.result() for norm, fut in futures.items()}
    else:
        envelopes = {norm: s.execute(f, request.degree) for norm, s in solvers.items()}

    outcome = RunOutcome(request, f, envelopes, diagnostics)
    results = outcome.results
    if "l2" in results and "linf" in results:
        outcome.ordering = ordering_check(
            f,
            results["l2"].approximant,
            results["linf"].approximant,
            int(get_threshold(diagnostics, "grid", "samples", default=DEFAULT_SAMPLES)),
            float(get_threshold(diagnostics, "ordering", "rtol", default=ORDERING_RTOL)),
        )
        if not outcome.ordering.passed:
            logger.warning("norm ordering violated: %s", "; ".join(outcome.ordering.violations))
    for norm, env in envelopes.items():
        logger.info("%s: %s", norm, env["status"])
    return outcome


# ------------------------------------------------------------------ #
#  Figures
# ------------------------------------------------------------------ #

def interpolation_configuration(outcome: RunOutcome, norm: str) -> InterpolationPoints:
    result = outcome.results[norm]
    if norm == "l2":
        return l2_interpolation_points(result.approximant, result.poles)
    section = outcome.diagnostics.get("linf_interpolation", {})
    return linf_interpolation_points(
        outcome.function,
        result.approximant,
        result.degree,
        int(get_threshold(outcome.diagnostics, "grid", "samples", default=DEFAULT_SAMPLES)),
        inclusion_radius=float(section.get("inclusion_radius", 1.0 - 1e-9)),
        merge_distance=float(section.get("merge_distance", 1e-6)),
        doublet_distance=float(section.get("doublet_distance", 1e-5)),
        extra_degree=int(section.get("extra_degree", 4)),
    )


def _dots(result: ApproxResult, interp: InterpolationPoints) -> List[Dot]:
    dots = [Dot(complex(p), DotRole.POLE) for p in result.poles.finite]
    if result.norm == "l2":
        dots.append(Dot(0j, DotRole.INTERP))
        dots.extend(Dot(complex(p), DotRole.HERMITE) for p in interp.points[1:])
    else:
        dots.extend(Dot(complex(p), DotRole.INTERP) for p in interp.points)
    return dots


def figures(outcome: RunOutcome) -> Dict[str, str]:
    """SVG documents keyed by figure name: "error" plus "potential_<norm>" per result."""
    results = outcome.results
    if not results:
        return {}
    curves = outcome.error_curves()
    out = {"error": render_error_figure(curves.get("l2"), curves.get("linf"))}

    section = outcome.diagnostics.get("potential", {})
    grid = GridSpec(float(section.get("x_max", 1.6)), int(section.get("lattice_size", 161)))
    step = float(section.get("level_step", 0.5))
    workers = int(section.get("workers", 1))
    for norm, result in results.items():
        interp = interpolation_configuration(outcome, norm)
        field_ = potential_field(interp.expanded(), result.poles.finite, grid, workers)
        spec = potential_figure_spec(field_, _dots(result, interp), default_levels(field_.values, step))
        out[f"potential_{norm}"] = to_svg(spec)
        if norm == "l2":
            outcome.extras.setdefault("circle_spread", {})[norm] = circle_spread(
                interp.expanded(), result.poles.finite
            )
        if interp.messages:
            outcome.extras.setdefault("interpolation_messages", {})[norm] = list(interp.messages)
    return out


def compare(request: RunRequest, out_dir: Path) -> Tuple[RunOutcome, Dict[str, Path]]:
    """
    Both solvers, the ordering chain, the error figure and one potential
    figure per norm, all written into out_dir (which must exist).
    """
    store = Storage(out_dir)
    if request.norm != "both":
        raise InputError("compare always runs both norms")
    outcome = run_request(request)
    written: Dict[str, Path] = {}
    svgs = figures(outcome)
    for name, svg in svgs.items():
        written[name] = store.save_text(f"{name}.svg", svg)
    if outcome.results:
        written["samples"] = store.save_text("samples.csv", samples_csv(outcome.error_curves()))
    written["result"] = store.save_json("result.json", outcome.to_json())
    for norm, result in outcome.results.items():
        if not result.poles.finite:
            logger.info("%s approximant is a polynomial (%d poles at infinity)", norm, result.poles.count_at_infinity)
    return outcome, written


# ------------------------------------------------------------------ #
#  Verification of saved results
# ------------------------------------------------------------------ #

@dataclass(frozen=True)
class VerifyCheck:
    block: str
    name: str
    value: float
    passed: bool
    detail: str = ""


@dataclass(eq=False)
class VerifyReport:
    path: str
    checks: List[VerifyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [f"{c.block}: {c.name}" for c in self.checks if not c.passed]

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"block": c.block, "check": c.name, "value": f"{c.value:.3e}", "pass": c.passed, "detail": c.detail}
            for c in self.checks
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {"path": self.path, "passed": self.passed, "failures": self.failures(), "checks": self.rows()}


def verify_run(path: Path, tol: float = DEFAULT_TOL) -> VerifyReport:
    """
    Reload the approximants of a RunResult and recheck them against f: the
    interpolation conditions at the stored poles (L2) and the near-circularity
    bracket plus the stored sup norm (Linf).
    """
    doc = load_run_result(path)
    source = doc["request"].get("f")
    if not isinstance(source, str):
        raise InputError("request echo has no function source")
    f = resolve(source)
    report = VerifyReport(str(path))

    if "l2" in doc:
        block = doc["l2"]
        r = rational_from_json(block["approximant"])
        poles = poles_from_json(block)
        opt = verify_optimality(f, r, tol, poles=poles)
        if not opt.precondition_ok:
            report.checks.append(VerifyCheck("l2", "precondition", float("nan"), False, "; ".join(opt.messages)))
        for name, value in opt.residuals:
            report.checks.append(VerifyCheck("l2", name, value, value <= tol))

    if "linf" in doc:
        block = doc["linf"]
        r = rational_from_json(block["approximant"])
        M = block.get("diagnostic_samples") or DEFAULT_SAMPLES
        if not isinstance(M, int) or M < 16:
            raise InputError("diagnostic_samples must be an integer of at least 16")
        try:
            curve = error_curve(f, r, M)
        except ApproxError as exc:
            report.checks.append(VerifyCheck("linf", "error curve", float("nan"), False, str(exc)))
        else:
            sup = sup_from_curve(curve)
            stored = (block.get("norms") or {}).get("sup")
            if not isinstance(stored, (int, float)):
                raise InputError("linf block has no numeric norms.sup")
            drift = abs(sup - stored) / max(1.0, abs(stored))
            report.checks.append(VerifyCheck("linf", "sup norm reproduces", drift, drift <= tol))
            bounds = near_circular_bounds(curve, int(block["degree"]), effective_degree(r))
            report.checks.append(
                VerifyCheck(
                    "linf",
                    "winding precondition",
                    float(bounds.winding),
                    bounds.precondition_ok,
                    "; ".join(bounds.messages),
                )
            )
    return report


# ------------------------------------------------------------------ #
#  Corpus sweep
# ------------------------------------------------------------------ #

@dataclass(frozen=True)
class SweepEntry:
    name: str
    degree: int
    l2_status: str
    linf_status: str
    ordering: Optional[OrderingReport]

    @property
    def converged(self) -> bool:
        return self.l2_status == "success" and self.linf_status == "success"


def sweep(
    names: Iterable[str],
    degrees: Iterable[int],
    profile_path: Optional[str] = None,
    workers: int = 2,
) -> List[SweepEntry]:
    """Both solvers over a corpus x degree grid; ordering reports for converged pairs."""
    entries: List[SweepEntry] = []
    degrees = list(degrees)
    for name in names:
        for n in degrees:
            outcome = run_request(RunRequest(f=name, degree=n, norm="both", profile_path=profile_path), workers)
            status = {k: env["status"] for k, env in outcome.envelopes.items()}
            ordering = outcome.ordering if all(s == "success" for s in status.values()) else None
            entries.append(SweepEntry(name, n, status["l2"], status["linf"], ordering))
            logger.info("sweep %s n=%d: l2=%s linf=%s", name, n, status["l2"], status["linf"])
    return entries

