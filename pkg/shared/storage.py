"""
RunResult documents: JSON (de)serialization of approximants and results,
CSV sample dumps and a small file store for one output directory.

Floats are written with Python's shortest round-trip repr, so a reloaded
approximant evaluates bit-for-bit like the one that was saved. Complex
numbers are [re, im] pairs; non-finite floats become null.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

import numpy as np

from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.errors import ApproxError, InputError

logger = logging.getLogger(__name__)

REQUIRED_BLOCK_KEYS = ("degree", "approximant", "poles", "poles_at_infinity", "norms", "converged")


# ------------------------------------------------------------------ #
#  Complex values
# ------------------------------------------------------------------ #

def _real(x: float) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def complex_pairs(values: Iterable[complex]) -> List[List[Optional[float]]]:
    return [[_real(np.real(v)), _real(np.imag(v))] for v in values]


def pairs_to_complex(pairs: Any, what: str = "values") -> np.ndarray:
    """[[re, im], ...] -> complex array; InputError on anything else."""
    if not isinstance(pairs, list):
        raise InputError(f"{what} must be a list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=complex)
    for idx, pair in enumerate(pairs):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise InputError(f"{what}[{idx}] is not a numeric [re, im] pair")
        out[idx] = complex(pair[0], pair[1])
    return out


def clean(obj: Any) -> Any:
    """Make an object tree JSON-safe: numpy scalars to Python, NaN/inf to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_real(obj.real), _real(obj.imag)]
    return obj


# ------------------------------------------------------------------ #
#  Approximants and results
# ------------------------------------------------------------------ #

def rational_to_json(r: BarycentricRational) -> Dict[str, Any]:
    return {
        "support": complex_pairs(r.support),
        "values": complex_pairs(r.values),
        "weights": complex_pairs(r.weights),
    }


def rational_from_json(doc: Any) -> BarycentricRational:
    if not isinstance(doc, dict):
        raise InputError("approximant must be an object with support, values and weights")
    try:
        arrays = [pairs_to_complex(doc[key], key) for key in ("support", "values", "weights")]
    except KeyError as exc:
        raise InputError(f"approximant is missing {exc.args[0]!r}") from exc
    try:
        return BarycentricRational(*arrays)
    except ApproxError as exc:
        raise InputError(f"approximant is invalid: {exc}") from exc


def poles_from_json(block: Mapping[str, Any]) -> PoleList:
    finite = pairs_to_complex(block.get("poles"), "poles")
    count = block.get("poles_at_infinity")
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise InputError("poles_at_infinity must be a nonnegative integer")
    try:
        return PoleList(tuple(finite), count)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def result_to_json(result: Any) -> Dict[str, Any]:
    """One per-norm block of a RunResult from a diagnostics ApproxResult."""
    block: Dict[str, Any] = {
        "degree": result.degree,
        "approximant": rational_to_json(result.approximant),
        "poles": complex_pairs(result.poles.finite),
        "poles_at_infinity": result.poles.count_at_infinity,
        "polynomial": len(result.poles.finite) == 0,
        "zeros": complex_pairs(result.zeros),
        "effective_degree": result.effective_degree,
        "norms": {"rms": result.stats.rms, "sup": result.stats.sup},
        "winding": result.stats.winding,
        "circularity": result.stats.circularity,
        "min_modulus": result.stats.min_modulus,
        "diagnostic_samples": result.stats.samples,
        "iterations": result.iterations,
        "converged": result.converged,
        "warnings": list(result.warnings),
    }
    if result.optimality is not None:
        block["optimality"] = result.optimality.to_dict()
    if result.bounds is not None:
        block["bounds"] = result.bounds.to_dict()
    return clean(block)


def validate_run_result(doc: Any) -> Dict[str, Any]:
    """Structural check of a loaded RunResult; InputError names the first problem."""
    if not isinstance(doc, dict):
        raise InputError("run result must be a JSON object")
    if not isinstance(doc.get("request"), dict):
        raise InputError("run result has no request echo")
    blocks = [k for k in ("l2", "linf") if k in doc]
    if not blocks:
        raise InputError("run result has neither an l2 nor a linf block")
    for key in blocks:
        block = doc[key]
        if not isinstance(block, dict):
            raise InputError(f"{key} block must be an object")
        missing = [name for name in REQUIRED_BLOCK_KEYS if name not in block]
        if missing:
            raise InputError(f"{key} block is missing {', '.join(missing)}")
    return doc


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_run_result(path: Path) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    return validate_run_result(doc)


def samples_csv(curves: Mapping[str, Any]) -> str:
    """Error samples as rows (norm, theta, re, im) for every named ErrorCurve."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["norm", "theta", "re", "im"])
    for name, curve in curves.items():
        for theta, e in zip(curve.theta, curve.samples):
            writer.writerow([name, repr(float(theta)), repr(float(e.real)), repr(float(e.imag))])
    return buf.getvalue()


class Storage:
    """
    Writes run artifacts into one directory that must already exist.
    """

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = Path(out_dir)
        if not self.out_dir.is_dir():
            raise InputError(f"output directory {self.out_dir} does not exist")

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def save_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        target.write_text(text, encoding="utf-8")
        logger.debug("wrote %s (%d bytes)", target, len(text))
        return target

    def save_json(self, name: str, doc: Mapping[str, Any]) -> Path:
        return self.save_text(name, dumps(doc))


def write_text(path: Path, text: str) -> Path:
    """Write to a file whose parent directory must exist."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    return Storage(parent).save_text(path.name, text)


def write_json(path: Path, doc: Mapping[str, Any]) -> Path:
    return write_text(path, dumps(doc))

