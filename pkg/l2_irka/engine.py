"""
TF-IRKA for best L2 approximation on the unit disk.

Each step samples f and f' at the reflections sigma = 1/conj(pi) of the
current poles, builds the Hermite interpolant that also matches f(0), and
takes its poles as the next pole set. The iteration stops once the poles
of the interpolant reproduce the poles the nodes were reflected from.

Usage:
    result = irka_iterate(resolve("sqrt11"), IrkaConfig(degree=1))
    result.poles, result.converged, result.optimality.passed

The node update is damped: sigma <- sigma + alpha (sigma_new - sigma),
with alpha halved whenever the fixed-point residual stops contracting.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from diagnostics.error_curve import DEFAULT_SAMPLES, error_curve, rms_norm
from diagnostics.result import ApproxResult, summarize
from l2_irka.loewner import (
    TAYLOR_RADIUS,
    TAYLOR_SAMPLES,
    HermiteSampleSet,
    bary_hermite_interpolant,
    ss_interpolant,
    unreflect,
)
from l2_irka.optimality import DEFAULT_TOL, OptimalityReport, verify_optimality
from linf_lawson.aaa import CircleGrid, aaa
from rational.barycentric import BarycentricRational, poles_bary, residues_bary
from rational.poles import INFINITY_THRESHOLD, PoleList, pole_displacement
from rational.state_space import StateSpaceRational, poles_ss
from shared.base_solver import BaseSolver
from shared.errors import ConstructionError, DegenerateError, InputError
from shared.profile_loader import default_profile_path, get_threshold, load_profile, merge_profiles

logger = logging.getLogger(__name__)

STOP_FIXED_POINT = "fixed_point"
STOP_EXACT = "exact"
STOP_STATIONARY = "stationary"
STOP_CAP = "iteration_cap"


class Initialization(str, Enum):
    AAA_SEED = "aaa_seed"
    RING = "ring"
    USER = "user"


class Form(str, Enum):
    BARYCENTRIC = "barycentric"
    STATE_SPACE = "state_space"


@dataclass(frozen=True)
class IrkaConfig:
    degree: int
    pole_tolerance: float = 1e-10
    max_iterations: int = 200
    initialization: Initialization = Initialization.AAA_SEED
    form: Form = Form.BARYCENTRIC
    initial_poles: Tuple[complex, ...] = ()
    # stationary stop: displacement shrank by less than stall_ratio over stall_window steps
    stall_window: int = 10
    stall_ratio: float = 0.5
    # damping
    contraction_ratio: float = 0.95
    min_step: float = 0.125
    # guards
    infinity_threshold: float = INFINITY_THRESHOLD
    far_modulus: float = 1e4
    # stalled poles beyond drift_modulus that grew by drift_growth over the window drift to infinity
    drift_modulus: float = 10.0
    drift_growth: float = 0.05
    collision_threshold: float = 1e-8
    ring_radius: float = 2.0
    ring_phase: float = 0.37
    seed_min_modulus: float = 1.05
    seed_samples: int = 200
    max_node_modulus: float = 0.99
    # exact reproduction check
    reproduce_samples: int = 64
    exact_rtol: float = 1e-13
    froissart_rtol: float = 1e-13
    taylor_radius: float = TAYLOR_RADIUS
    taylor_samples: int = TAYLOR_SAMPLES
    verify_tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InputError(f"degree must be at least 1, got {self.degree}")
        if not self.pole_tolerance > 0:
            raise InputError("pole_tolerance must be positive")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be positive")
        object.__setattr__(self, "initialization", Initialization(self.initialization))
        object.__setattr__(self, "form", Form(self.form))
        object.__setattr__(self, "initial_poles", tuple(complex(p) for p in self.initial_poles))
        if self.initialization is Initialization.USER and len(self.initial_poles) != self.degree:
            raise InputError(
                f"user initialization needs {self.degree} poles, got {len(self.initial_poles)}"
            )
        if not 0 < self.min_step <= 1:
            raise InputError("min_step must lie in (0, 1]")
        if self.stall_window < 1 or not 0 < self.stall_ratio <= 1:
            raise InputError("stall_window must be positive and stall_ratio must lie in (0, 1]")
        if not 1.0 < self.far_modulus <= self.infinity_threshold:
            raise InputError("far_modulus must lie in (1, infinity_threshold]")
        if not 1.0 < self.drift_modulus or not self.drift_growth > 0:
            raise InputError("drift_modulus must exceed 1 and drift_growth must be positive")

    @classmethod
    def from_profile(cls, profile: Dict[str, Any], degree: int, **overrides: Any) -> "IrkaConfig":
        """Build a config from an l2_irka profile; non-None overrides win."""
        g = lambda *keys, default: get_threshold(profile, *keys, default=default)  # noqa: E731
        values: Dict[str, Any] = {
            "pole_tolerance": float(g("iteration", "pole_tolerance", default=1e-10)),
            "max_iterations": int(g("iteration", "max_iterations", default=200)),
            "initialization": str(g("iteration", "initialization", default="aaa_seed")),
            "form": str(g("iteration", "form", default="barycentric")),
            "stall_window": int(g("iteration", "stall_window", default=10)),
            "stall_ratio": float(g("iteration", "stall_ratio", default=0.5)),
            "contraction_ratio": float(g("damping", "contraction_ratio", default=0.95)),
            "min_step": float(g("damping", "min_step", default=0.125)),
            "infinity_threshold": float(g("guards", "infinity_threshold", default=INFINITY_THRESHOLD)),
            "far_modulus": float(g("guards", "far_modulus", default=1e4)),
            "drift_modulus": float(g("guards", "drift_modulus", default=10.0)),
            "drift_growth": float(g("guards", "drift_growth", default=0.05)),
            "collision_threshold": float(g("guards", "collision_threshold", default=1e-8)),
            "ring_radius": float(g("guards", "ring_radius", default=2.0)),
            "ring_phase": float(g("guards", "ring_phase", default=0.37)),
            "seed_min_modulus": float(g("guards", "seed_min_modulus", default=1.05)),
            "seed_samples": int(g("guards", "seed_samples", default=200)),
            "max_node_modulus": float(g("guards", "max_node_modulus", default=0.99)),
            "reproduce_samples": int(g("exact", "samples", default=64)),
            "exact_rtol": float(g("exact", "rtol", default=1e-13)),
            "froissart_rtol": float(g("guards", "froissart_rtol", default=1e-13)),
            "taylor_radius": float(g("taylor", "radius", default=TAYLOR_RADIUS)),
            "taylor_samples": int(g("taylor", "samples", default=TAYLOR_SAMPLES)),
            "verify_tol": float(g("verify", "tol", default=DEFAULT_TOL)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(degree=degree, **values)


@dataclass(eq=False)
class IrkaResult:
    approximant: BarycentricRational
    pole_history: List[PoleList]
    converged: bool
    iterations: int
    stop_reason: str
    optimality: OptimalityReport
    samples: HermiteSampleSet
    state_space: Optional[StateSpaceRational] = None
    displacements: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def poles(self) -> PoleList:
        return self.pole_history[-1]

    @property
    def optimality_residuals(self) -> List[Tuple[str, float]]:
        return self.optimality.residuals


# ------------------------------------------------------------------ #
#  Initialization and node guards
# ------------------------------------------------------------------ #

def ring_poles(n: int, radius: float = 2.0, phase: float = 0.37) -> List[complex]:
    return [complex(radius * np.exp(1j * (2 * np.pi * k / n + phase))) for k in range(n)]


def initial_poles(f: Callable, config: IrkaConfig) -> Tuple[PoleList, List[str]]:
    """Starting pole set for the configured initialization."""
    n = config.degree
    ring = ring_poles(n, config.ring_radius, config.ring_phase)
    if config.initialization is Initialization.RING:
        return PoleList(tuple(ring)), []
    if config.initialization is Initialization.USER:
        return PoleList.from_values(config.initial_poles, config.infinity_threshold), []

    notes: List[str] = []
    fit = aaa(CircleGrid.sample(f, config.seed_samples), n)
    try:
        raw = fit.rational.poles().finite
    except DegenerateError as exc:
        notes.append(f"AAA seed poles unavailable ({exc}); using ring poles")
        raw = ()
    seeds: List[complex] = []
    for p in raw:
        if abs(p) <= 1.0:
            if p == 0:
                continue
            p = 1.0 / np.conj(p)
        if abs(p) < config.seed_min_modulus:
            p = p / abs(p) * config.seed_min_modulus
        seeds.append(complex(p))
    seeds = seeds[:n]
    if len(seeds) < n:
        seeds.extend(ring[len(seeds):])
    return PoleList(tuple(seeds)), notes


def _warn(warnings: List[str], message: str, *args: Any) -> None:
    text = message % args if args else message
    logger.warning(text)
    warnings.append(text)


def _separate(sigma: np.ndarray, threshold: float, warnings: List[str]) -> np.ndarray:
    sigma = sigma.copy()
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            gap = sigma[j] - sigma[i]
            limit = threshold * (1.0 + abs(sigma[i]))
            if abs(gap) < limit:
                direction = gap / abs(gap) if gap != 0 else 1.0
                shift = limit * direction
                sigma[i] -= shift
                sigma[j] += shift
                _warn(warnings, "nodes %s and %s collide; perturbed apart", sigma[i], sigma[j])
    return sigma


def nodes_from_poles(poles: PoleList, config: IrkaConfig, warnings: List[str]) -> Tuple[np.ndarray, int]:
    """Guarded reflection: feasible nodes strictly inside the disk plus the count at infinity."""
    tiny = 1.0 / config.infinity_threshold
    k = poles.count_at_infinity
    sigma: List[complex] = []
    for p in poles.finite:
        if abs(p) <= tiny:
            _warn(warnings, "pole at the origin treated as a pole at infinity")
            k += 1
            continue
        if abs(p) <= 1.0:
            _warn(warnings, "pole %s inside the closed disk reflected outside", p)
            s = complex(p)
        else:
            s = complex(1.0 / np.conj(p))
        if abs(s) < tiny:
            k += 1
            continue
        if abs(s) > config.max_node_modulus:
            s = s / abs(s) * config.max_node_modulus
        sigma.append(s)
    return _separate(np.array(sigma, dtype=complex), config.collision_threshold, warnings), k


def _match(old: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Reorder new so that new[i] is the greedy nearest neighbour of old[i]."""
    out = np.empty_like(old)
    available = list(range(len(new)))
    for i in np.argsort(np.abs(old), kind="stable"):
        j = min(available, key=lambda c: abs(new[c] - old[i]))
        out[i] = new[j]
        available.remove(j)
    return out


# ------------------------------------------------------------------ #
#  One step
# ------------------------------------------------------------------ #

def _prune_froissart(
    r: BarycentricRational, poles: PoleList, rtol: float, scale: float, warnings: List[str]
) -> PoleList:
    if not poles.finite:
        return poles
    p = poles.as_array()
    res = residues_bary(r, p)
    reach = np.maximum(np.abs(p) - 1.0, 1e-300)
    spurious = np.abs(res) / reach <= rtol * scale
    if not np.any(spurious):
        return poles
    for q in p[spurious]:
        _warn(warnings, "pole %s has negligible residue; counted at infinity", q)
    return PoleList(tuple(p[~spurious]), poles.count_at_infinity + int(np.count_nonzero(spurious)))


def _reproduces(f: Callable, r: BarycentricRational, config: IrkaConfig) -> bool:
    z = CircleGrid.roots_of_unity(config.reproduce_samples)
    fz = np.asarray(f(z), dtype=complex)
    with np.errstate(all="ignore"):
        err = np.sqrt(np.mean(np.abs(np.asarray(r(z)) - fz) ** 2))
    return bool(np.isfinite(err) and err <= config.exact_rtol * max(1.0, float(np.max(np.abs(fz)))))


def _far_to_infinity(poles: PoleList, far_modulus: float) -> PoleList:
    """Finite poles beyond far_modulus are counted at infinity."""
    far = [p for p in poles.finite if abs(p) > far_modulus]
    if not far:
        return poles
    logger.debug("%d poles beyond |z| = %.3g counted at infinity", len(far), far_modulus)
    near = tuple(p for p in poles.finite if abs(p) <= far_modulus)
    return PoleList(near, poles.count_at_infinity + len(far))


def _construct(
    s: HermiteSampleSet, config: IrkaConfig, warnings: List[str], scale: float
) -> Tuple[BarycentricRational, Optional[StateSpaceRational], PoleList]:
    r = bary_hermite_interpolant(s)
    h: Optional[StateSpaceRational] = None
    poles: Optional[PoleList] = None
    if config.form is Form.STATE_SPACE:
        h = ss_interpolant(s)
        try:
            poles = poles_ss(h, config.infinity_threshold)
        except DegenerateError as exc:
            logger.debug("state-space poles unavailable (%s); using the barycentric pencil", exc)
    if poles is None:
        poles = poles_bary(r, config.infinity_threshold)
    poles = _far_to_infinity(poles, config.far_modulus)
    poles = _prune_froissart(r, poles, config.froissart_rtol, scale, warnings)
    return r, h, poles


# ------------------------------------------------------------------ #
#  Iteration
# ------------------------------------------------------------------ #

def _stalled(displacements: List[float], config: IrkaConfig) -> bool:
    """The best displacement of the last stall_window steps is no better than stall_ratio times the best before."""
    w = config.stall_window
    if len(displacements) <= w:
        return False
    return min(displacements[-w:]) >= config.stall_ratio * min(displacements[:-w])


def _rising(history: List[PoleList], config: IrkaConfig) -> List[complex]:
    """Finite poles whose modulus rose at every step of the stall window, by drift_growth in all."""
    recent = history[-(config.stall_window + 1):]
    last = recent[-1]
    if len(recent) <= config.stall_window or any(len(p.finite) != len(last.finite) for p in recent):
        return []
    mods = np.array([sorted(abs(q) for q in p.finite) for p in recent]).reshape(len(recent), -1)
    rising = np.all(np.diff(mods, axis=0) > 0, axis=0)
    grown = mods[-1] >= (1.0 + config.drift_growth) * mods[0]
    ordered = sorted(last.finite, key=abs)
    return [ordered[i] for i in np.nonzero(rising & grown)[0]]


def irka_iterate(f: Callable, config: IrkaConfig) -> IrkaResult:
    """
    Run TF-IRKA from the configured initialization.

    A run whose displacement stalls on a flat stretch of the error surface,
    or at the rounding floor, stops as "stationary" once r satisfies the
    optimality conditions to verify_tol.

    Construction failures are raised as ConstructionError carrying the
    iteration index; hitting max_iterations returns converged=False with
    the full pole history.
    """
    poles0, warnings = initial_poles(f, config)
    history: List[PoleList] = [poles0]
    displacements: List[float] = []
    sigma, k = nodes_from_poles(poles0, config, warnings)
    scale = max(1.0, float(np.max(np.abs(f(CircleGrid.roots_of_unity(config.reproduce_samples))))))

    alpha = 1.0
    previous = math.inf
    drift_handled = False
    converged = False
    stop_reason = STOP_CAP
    r: Optional[BarycentricRational] = None
    h: Optional[StateSpaceRational] = None
    s: Optional[HermiteSampleSet] = None
    iterations = 0

    for it in range(1, config.max_iterations + 1):
        iterations = it
        try:
            s = HermiteSampleSet.from_function(f, sigma, k, config.taylor_radius, config.taylor_samples)
            r, h, poles = _construct(s, config, warnings, scale)
        except DegenerateError as exc:
            raise ConstructionError(str(exc), it) from exc
        history.append(poles)

        if _reproduces(f, r, config):
            converged, stop_reason = True, STOP_EXACT
            logger.info("IRKA iteration %d: f reproduced exactly", it)
            break

        disp = pole_displacement(poles, unreflect(sigma, k, config.infinity_threshold))
        displacements.append(disp)
        logger.info("IRKA iteration %d: pole displacement %.3e, step %.4g", it, disp, alpha)
        if disp <= config.pole_tolerance:
            converged, stop_reason = True, STOP_FIXED_POINT
            break
        if _stalled(displacements, config):
            rising = _rising(history, config)
            if rising and not drift_handled and min(abs(p) for p in rising) > config.drift_modulus:
                drift_handled = True
                _warn(warnings, "%d poles drifting outward past |z| = %.3g counted at infinity",
                      len(rising), min(abs(p) for p in rising))
                poles = PoleList(
                    tuple(p for p in poles.finite if p not in rising), poles.count_at_infinity + len(rising)
                )
            elif not rising and verify_optimality(f, r, config.verify_tol, poles).passed:
                converged, stop_reason = True, STOP_STATIONARY
                logger.info("IRKA iteration %d: displacement stalled at %.3e with optimality satisfied", it, disp)
                break

        sigma_new, k_new = nodes_from_poles(poles, config, warnings)
        if math.isfinite(previous) and disp > config.contraction_ratio * previous and alpha > config.min_step:
            alpha = max(alpha / 2.0, config.min_step)
            logger.debug("IRKA iteration %d: damping step to %.4g", it, alpha)
        previous = disp
        if k_new == k and len(sigma_new) == len(sigma) and alpha < 1.0:
            sigma = _separate(
                sigma + alpha * (_match(sigma, sigma_new) - sigma), config.collision_threshold, warnings
            )
        else:
            sigma = sigma_new
        k = k_new

    if not converged:
        _warn(warnings, "IRKA did not converge in %d iterations", config.max_iterations)
    assert r is not None and s is not None
    report = verify_optimality(f, r, config.verify_tol, poles=history[-1])
    return IrkaResult(
        approximant=r,
        pole_history=history,
        converged=converged,
        iterations=iterations,
        stop_reason=stop_reason,
        optimality=report,
        samples=s,
        state_space=h,
        displacements=displacements,
        warnings=warnings,
    )


@dataclass(frozen=True)
class MultistartRun:
    rotation: float
    moduli: List[float]
    converged: bool
    rms: float
    poles: PoleList = field(default_factory=PoleList)


def multistart(
    f: Callable, config: IrkaConfig, rotations: Sequence[float], workers: int = 1
) -> List[MultistartRun]:
    """IRKA from ring initializations rotated by each angle; runs are independent."""

    def run(theta: float) -> MultistartRun:
        cfg = replace(config, initialization=Initialization.RING, ring_phase=config.ring_phase + theta)
        res = irka_iterate(f, cfg)
        return MultistartRun(
            theta, res.poles.moduli(), res.converged, rms_norm(error_curve(f, res.approximant)), res.poles
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, rotations))
    return [run(theta) for theta in rotations]


def l2_best(
    f: Callable,
    n: int,
    config: Optional[IrkaConfig] = None,
    diagnostic_samples: int = DEFAULT_SAMPLES,
) -> ApproxResult:
    """irka_iterate followed by re-measurement on the diagnostic grid."""
    config = config or IrkaConfig(degree=n)
    if config.degree != n:
        config = replace(config, degree=n)
    res = irka_iterate(f, config)
    return summarize(
        f,
        res.approximant,
        "l2",
        n,
        M=diagnostic_samples,
        poles=res.poles,
        iterations=res.iterations,
        converged=res.converged,
        warnings=list(res.warnings),
        state_space=res.state_space,
        optimality=res.optimality,
        history=list(res.pole_history),
    )


class IrkaSolver(BaseSolver):
    """
    L2 solver driven by profiles/default.yaml; keyword overrides replace
    individual IrkaConfig fields.
    """

    def __init__(
        self,
        profile_path: Optional[str] = None,
        profile_overrides: Optional[Dict[str, Any]] = None,
        **overrides: Any,
    ) -> None:
        path = Path(profile_path) if profile_path else default_profile_path(__file__)
        self.profile = merge_profiles(load_profile(path), profile_overrides or {})
        self.overrides = overrides
        self.diagnostic_samples = int(
            get_threshold(self.profile, "diagnostics", "samples", default=DEFAULT_SAMPLES)
        )
        super().__init__(
            solver_name="l2_irka",
            profile_name=self.profile.get("name", "l2_irka_default"),
        )

    def config_for(self, degree: int) -> IrkaConfig:
        return IrkaConfig.from_profile(self.profile, degree, **self.overrides)

    def solve(self, f: Any, degree: int) -> ApproxResult:
        return l2_best(f, degree, self.config_for(degree), self.diagnostic_samples)
